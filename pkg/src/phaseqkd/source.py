"""Weak coherent-pulse BB84 sources.

Two sources are modelled:

* ``SourceKind.P`` emits coherent states ``|sqrt(mu) e^{i theta}>`` with a
  phase the eavesdropper knows. Its signals are represented as amplitudes on
  the qutrit space {vacuum, one photon in mode 0, one photon in mode 1}; the
  two-or-more photon part is kept only as a probability (the norm deficit).
* ``SourceKind.R`` randomizes the phase, which turns each pulse into a Poisson
  mixture of photon-number states. It is represented operationally: draw a
  photon number, then attach the single-photon polarization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .linalg import QUBIT_LABELS, QUTRIT_LABELS, StateVector

SQRT2 = math.sqrt(2.0)


class SourceKind(enum.Enum):
    R = "R"
    P = "P"


class Basis(enum.IntEnum):
    Z = 0
    X = 1


@dataclass(frozen=True)
class SourceConfig:
    kind: SourceKind
    mu: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SourceKind(self.kind))
        _check_mu(self.mu)

    @property
    def alpha(self) -> complex:
        """Coherent amplitude ``sqrt(mu) * exp(i theta)``."""
        return math.sqrt(self.mu) * complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class PhotonStats:
    p0: float
    p1: float
    pM: float


def _check_mu(mu: float) -> None:
    if not mu >= 0:
        raise ValueError(f"mean photon number must be non-negative, got {mu}")


def photon_statistics(mu: float) -> PhotonStats:
    """Vacuum, single-photon and multiphoton probabilities of a Poisson source."""
    _check_mu(mu)
    p0 = math.exp(-mu)
    p1 = mu * p0
    # -expm1(-mu) - mu*exp(-mu) avoids cancellation for small mu.
    pM = -math.expm1(-mu) - p1
    return PhotonStats(p0=p0, p1=p1, pM=max(pM, 0.0))


def sample_photon_number(mu: float, rng: np.random.Generator, size: int | None = None):
    _check_mu(mu)
    return rng.poisson(mu, size)


def single_photon_state(bit: int, basis: Basis | int, phi: float = 0.0) -> StateVector:
    """BB84 polarization qubit.

    The X basis is the rotated pair ``(e^{i phi}|0> +/- e^{-i phi}|1>)/sqrt(2)``,
    with ``+`` carrying key bit 0.
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    if Basis(basis) is Basis.Z:
        amps = [1.0, 0.0] if bit == 0 else [0.0, 1.0]
    else:
        sign = 1.0 if bit == 0 else -1.0
        amps = [np.exp(1j * phi) / SQRT2, sign * np.exp(-1j * phi) / SQRT2]
    return StateVector(np.array(amps, dtype=complex), QUBIT_LABELS)


def bb84_signal_P(
    bit: int, basis: Basis | int, mu: float, phi: float = 0.0, theta: float = 0.0
) -> StateVector:
    """Phase-coherent BB84 signal truncated to at most one photon.

    Returns ``e^{-mu/2} (1, alpha c0, alpha c1)`` where ``(c0, c1)`` is the
    single-photon polarization. Its squared norm ``e^{-mu}(1 + mu)`` falls short
    of one by exactly the multiphoton probability.
    """
    alpha = SourceConfig(SourceKind.P, mu, theta=theta).alpha
    pol = single_photon_state(bit, basis, phi).amplitudes
    amps = math.exp(-mu / 2) * np.concatenate(([1.0], alpha * pol))
    return StateVector(amps, QUTRIT_LABELS)


def bb84_signal_set(mu: float, phi: float = 0.0, theta: float = 0.0) -> dict[tuple[int, Basis], StateVector]:
    """All four signals keyed by ``(bit, basis)``."""
    return {
        (bit, basis): bb84_signal_P(bit, basis, mu, phi, theta)
        for bit in (0, 1)
        for basis in Basis
    }
