"""Phase estimation with twin-Fock states and projection measurement."""

__version__ = "0.1.0"

from .errors import DomainError, FitError
from .experiment import (
    CountRecord,
    FitResult,
    fit_model,
    p2_model,
    p4_model,
    synthesize_counts,
    visibility,
)
from .fock import (
    ModeLabel,
    PhotonMoments,
    TwoModeState,
    apply_50_50_bs,
    apply_phase_shift,
    inner_product,
    photon_number_moments,
    twin_fock_after_bs,
)
from .metrology import (
    INF,
    DetectionModel,
    FourPhotonModel,
    LimitPair,
    MESModel,
    MetrologyPoint,
    TwinFockModel,
    TwoPhotonModel,
    beating_region,
    limits,
    phase_uncertainty,
    scan_photon_number,
    twin_fock_uncertainty_at_zero,
    uncertainty_curve,
)
from .projection import (
    ProjectionOutcome,
    apply_loss,
    projection_closed_form,
    projection_constructive,
)
