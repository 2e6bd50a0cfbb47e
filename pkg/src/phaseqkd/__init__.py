"""BB84 with weak coherent pulses: a phase-aware eavesdropping attack and
the multiphoton security bound for phase-randomized sources."""

from .attack import (
    UkdPovm,
    build_ukd_povm,
    conclusive_probability,
    detection_rate_bound,
    induced_error_rate,
    perp_vectors,
    resend_state,
)
from .linalg import HermitianOperator, Povm, StateVector, expectation, inner_product, min_eigenvalue
from .security import SecurityReport, max_secure_mu, secure_verdict
from .simulate import Attack, ProtocolStats, RunConfig, run_protocol
from .source import Basis, SourceConfig, SourceKind, bb84_signal_P, photon_statistics

__version__ = "0.1.0"
