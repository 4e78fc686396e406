"""Magnetic-field sensing with isolated and coupled radical-pair spin systems."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError, InsufficientPeaksError, NoCrossingError, NumericalError, RPSenseError, ValidationError,
)
from .linalg import SpectralDecomposition, eigendecompose, kron, trace_product  # noqa: E402
from .model import (  # noqa: E402
    FieldParams, ModelSpec, NetworkTopology, PairParams, SpinRole, build_network_hamiltonian,
    build_pair_hamiltonian, preset_topology, spin_operator, to_physical_millitesla,
)
from .observables import (  # noqa: E402
    ResponseCurve, ResponsePattern, YieldParams, closed_form_phi_gab, closed_form_phi_init, find_kstar,
    response_curve, response_pattern, sensitivity, sensitivity_ratio_R, singlet_yield,
    total_singlet_yield, total_yield_timedomain_oracle, yield_instant,
)
from .peaks import Peak, FieldEstimate, detect_peaks, estimate_field, infer_field, predict_peaks_g4  # noqa: E402
from .states import InitialStateKind, initial_density, singlet_projector  # noqa: E402
