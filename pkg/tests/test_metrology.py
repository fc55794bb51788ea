import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twinfock.errors import DomainError
from twinfock.metrology import (
    INF,
    FourPhotonModel,
    MESModel,
    TwinFockModel,
    TwoPhotonModel,
    beating_region,
    limits,
    phase_uncertainty,
    scan_photon_number,
    twin_fock_uncertainty_at_zero,
    uncertainty_curve,
)
from twinfock.projection import ProjectionOutcome, apply_loss

from oracles import central_difference

MODELS = [
    TwinFockModel(1),
    TwinFockModel(2),
    TwinFockModel(7),
    TwinFockModel(50),
    MESModel(1),
    MESModel(4),
    MESModel(9),
    TwoPhotonModel(1.0),
    TwoPhotonModel(0.953),
    TwoPhotonModel(0.3),
    FourPhotonModel(0.0),
    FourPhotonModel(0.93),
    FourPhotonModel(1.0),
]
STANDARD_GRID = np.linspace(-math.pi, math.pi, 97)


def brute_uncertainty(model, phi, h=1e-6):
    """Error propagation with a finite-difference slope."""
    p = model.probability(phi)
    slope = central_difference(model.probability, phi, h)
    return math.sqrt(p * (1 - p)) / abs(slope)


@pytest.mark.parametrize("model", [m for m in MODELS if getattr(m, "n", 0) <= 20], ids=repr)
def test_derivative_matches_finite_difference(model):
    for phi in STANDARD_GRID:
        fd = central_difference(model.probability, phi, 1e-5)
        assert abs(model.derivative(phi) - fd) < 1e-6


def test_large_n_derivative_five_point():
    # a 3-point stencil at h=1e-5 carries ~N^3 h^2 truncation error at N=50
    m = TwinFockModel(50)
    h = 1e-4
    for phi in STANDARD_GRID:
        f = m.probability
        fd = (-f(phi + 2 * h) + 8 * f(phi + h) - 8 * f(phi - h) + f(phi - 2 * h)) / (12 * h)
        assert abs(m.derivative(phi) - fd) < 1e-6 * max(1.0, abs(fd))


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_probability_in_unit_interval(model):
    p = model.probability(np.linspace(-7, 7, 2001))
    assert np.all((p >= 0) & (p <= 1))


@pytest.mark.parametrize("model", [m for m in MODELS if not (isinstance(m, TwoPhotonModel) and m.visibility < 0.5)], ids=repr)
def test_limit_is_continuous(model):
    at_zero = phase_uncertainty(model, 0.0).delta_phi
    near = phase_uncertainty(model, 1e-3).delta_phi
    assert math.isfinite(at_zero)
    assert near == pytest.approx(at_zero, rel=0.01)


class TestPhaseUncertainty:
    def test_n1(self):
        assert phase_uncertainty(TwinFockModel(1), 0.0).delta_phi == pytest.approx(0.5, abs=1e-12)

    def test_n2(self):
        assert phase_uncertainty(TwinFockModel(2), 0.0).delta_phi == pytest.approx(1 / math.sqrt(12), abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 4, 7])
    def test_mes_is_one_over_n(self, n):
        for phi in np.linspace(0.05, 3.0, 40):
            assert phase_uncertainty(MESModel(n), phi).delta_phi == pytest.approx(1 / n, rel=1e-9)

    def test_mes_extremum_takes_limit(self):
        # sin(4 phi) = 0 at pi/4 forces P = 0, a 0/0 point with limit 1/N
        assert phase_uncertainty(MESModel(4), math.pi / 4).delta_phi == pytest.approx(0.25, rel=1e-9)

    def test_flat_fringe_diverges(self):
        assert phase_uncertainty(TwoPhotonModel(0.0), 0.4).delta_phi == INF
        assert phase_uncertainty(TwoPhotonModel(0.953), math.pi / 2).delta_phi == INF

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    def test_matches_brute_force_away_from_extrema(self, model):
        for phi in np.linspace(0.11, 1.4, 14):
            d = phase_uncertainty(model, phi).delta_phi
            if not math.isfinite(d) or d > 1e3:
                continue
            assert d == pytest.approx(brute_uncertainty(model, phi), rel=1e-5)

    @pytest.mark.parametrize("n", range(1, 51))
    def test_limit_path_agrees_with_closed_limit(self, n):
        assert abs(phase_uncertainty(TwinFockModel(n), 0.0).delta_phi - twin_fock_uncertainty_at_zero(n)) < 1e-9

    @pytest.mark.parametrize("n", [1, 2, 5, 13, 29, 50])
    def test_zero_phase_is_optimal(self, n):
        m = TwinFockModel(n)
        best = twin_fock_uncertainty_at_zero(n)
        _, _, d = uncertainty_curve(m, np.linspace(0.003, math.pi - 0.003, 500))
        assert np.all(d >= best - 1e-9)

    def test_rejects_nonfinite_phase(self):
        with pytest.raises(DomainError):
            phase_uncertainty(TwinFockModel(1), math.nan)

    def test_curve_matches_pointwise(self):
        m = FourPhotonModel(0.93)
        phis = np.linspace(0, math.pi, 50)
        _, _, d = uncertainty_curve(m, phis)
        assert list(d) == [phase_uncertainty(m, f).delta_phi for f in phis]

    @pytest.mark.parametrize("model", MODELS, ids=repr)
    @pytest.mark.parametrize("eta", [0.1, 0.5, 0.9])
    def test_loss_invariance(self, model, eta):
        scale = apply_loss(ProjectionOutcome(1.0), eta).success_scale
        _, _, lossless = uncertainty_curve(model, STANDARD_GRID)
        _, _, lossy = uncertainty_curve(model, STANDARD_GRID, success_scale=scale)
        finite = np.isfinite(lossless)
        np.testing.assert_array_equal(np.isfinite(lossy), finite)
        assert np.max(np.abs(lossy[finite] - lossless[finite])) <= 1e-12


class TestClosedLimit:
    def test_values(self):
        assert twin_fock_uncertainty_at_zero(1) == 0.5
        assert twin_fock_uncertainty_at_zero(2) == pytest.approx(0.2886751345948129, abs=1e-15)

    def test_approaches_root_two_heisenberg(self):
        ratios = [twin_fock_uncertainty_at_zero(n) * 2 * n for n in range(1, 2001)]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert max(ratios) < math.sqrt(2)
        assert ratios[-1] == pytest.approx(math.sqrt(2), abs=1e-3)


class TestLimits:
    @pytest.mark.parametrize(
        "n,sql,hl", [(4, 0.5, 0.25), (2, 0.7071067811865476, 0.5), (1, 1.0, 1.0)]
    )
    def test_values(self, n, sql, hl):
        lim = limits(n)
        assert (lim.sql, lim.hl) == pytest.approx((sql, hl), abs=1e-15)

    @given(st.integers(1, 10**6))
    def test_hl_below_sql(self, n):
        lim = limits(n)
        assert lim.hl <= lim.sql

    def test_rejects_zero(self):
        with pytest.raises(DomainError):
            limits(0)


class TestScan:
    def test_first_rows(self):
        rows = scan_photon_number(2)
        assert rows[0].delta_phi == rows[0].hl == 0.5
        assert (rows[1].delta_phi, rows[1].sql, rows[1].hl) == pytest.approx((0.288675, 0.5, 0.25), abs=1e-6)

    def test_monotone_and_slope(self):
        rows = scan_photon_number(200)
        d = [r.delta_phi for r in rows]
        assert all(b < a for a, b in zip(d, d[1:]))
        slope = math.log(rows[199].delta_phi / rows[99].delta_phi) / math.log(400 / 200)
        assert -1.01 < slope < -0.99


class TestBeatingRegion:
    def test_four_photon(self):
        assert beating_region(FourPhotonModel(0.93), 4) == pytest.approx(0.885, abs=0.005)

    def test_boundary_is_a_first_crossing(self):
        m = FourPhotonModel(0.93)
        b = beating_region(m)
        _, _, d = uncertainty_curve(m, np.linspace(0, b - 1e-5, 2000))
        assert np.all(d < 0.5)
        assert brute_uncertainty(m, b) == pytest.approx(0.5, abs=1e-4)

    def test_mes_never_crosses(self):
        assert beating_region(MESModel(4), 4) is None

    def test_two_photon(self):
        m = TwoPhotonModel(0.953)
        b = beating_region(m, 2)
        assert 0 < b < math.pi / 2
        assert brute_uncertainty(m, b) == pytest.approx(1 / math.sqrt(2), abs=1e-5)

    def test_not_found_when_worse_at_zero(self):
        # V = 0.3 gives delta_phi(0) = 0.5 sqrt(1.3/0.6) > 0.7071
        assert beating_region(TwoPhotonModel(0.3), 2) is None
