"""Unambiguous key discrimination (UKD) intercept/resend attack.

Eve knows the signal phase, keeps only pulses with fewer than two photons, and
measures the resulting qutrit with a three-outcome POVM. A conclusive outcome
names the key bit with certainty (but not the basis); Eve then resends a
single photon halfway between the two BB84 states carrying that bit. An
inconclusive outcome, or a multiphoton pulse, is blocked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    QUBIT_LABELS,
    QUTRIT_LABELS,
    HermitianOperator,
    Povm,
    StateVector,
    expectation,
    inner_product,
)
from .source import SQRT2, Basis, bb84_signal_P, single_photon_state

# 1/2 -/+ 1/(2 sqrt 2): about 0.146 and 0.854.
C_MINUS = 0.5 - 1.0 / (2.0 * SQRT2)
C_PLUS = 0.5 + 1.0 / (2.0 * SQRT2)

CONCLUSIVE_WEIGHT = 0.5

OUTCOMES = ("BIT0", "BIT1", "DK")


class DegenerateSignalError(ValueError):
    """The two signals sharing a key bit do not span a plane (mu == 0)."""


def _orthogonal_complement(rows: list[np.ndarray]) -> np.ndarray:
    # Gram-Schmidt the rows, then project out the standard basis vector that
    # leaves the largest residual.
    basis: list[np.ndarray] = []
    for r in rows:
        v = r - sum(np.vdot(e, r) * e for e in basis)
        nv = np.linalg.norm(v)
        if nv < 1e-13 * max(np.linalg.norm(r), 1.0):
            raise DegenerateSignalError("signals are linearly dependent")
        basis.append(v / nv)
    best = None
    for k in range(len(rows[0])):
        e_k = np.zeros(len(rows[0]), dtype=complex)
        e_k[k] = 1.0
        v = e_k - sum(np.vdot(e, e_k) * e for e in basis)
        if best is None or np.linalg.norm(v) > np.linalg.norm(best):
            best = v
    best = best / np.linalg.norm(best)
    return _fix_phase(best)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # Largest-magnitude component made exactly real and positive.
    k = int(np.argmax(np.abs(v)))
    out = v * (abs(v[k]) / v[k])
    out[k] = abs(v[k])
    return out


def perp_vectors(mu: float, phi: float = 0.0, theta: float = 0.0) -> tuple[StateVector, StateVector]:
    """Unit vectors orthogonal to the bit-0 pair and to the bit-1 pair.

    Returns ``(v0perp, v1perp)``: ``v0perp`` is orthogonal to both signals that
    encode key bit 0, so finding it rules bit 0 out.
    """
    if not mu > 0:
        raise DegenerateSignalError(f"need mu > 0 for a unique perpendicular, got {mu}")
    out = []
    for bit in (0, 1):
        rows = [bb84_signal_P(bit, b, mu, phi, theta).amplitudes for b in Basis]
        out.append(StateVector(_orthogonal_complement(rows), QUTRIT_LABELS))
    return out[0], out[1]


def normalization_constants(mu: float) -> tuple[float, float]:
    """Closed-form ``(N0, N1)`` normalizing the phi = 0 perpendiculars.

    ``N0**-2 = (2 + sqrt2)(1 + C_PLUS mu)`` and ``N1**-2 = (2 + sqrt2)(1 + C_MINUS mu)``.
    """
    return (
        1.0 / math.sqrt((2.0 + SQRT2) * (1.0 + C_PLUS * mu)),
        1.0 / math.sqrt((2.0 + SQRT2) * (1.0 + C_MINUS * mu)),
    )


def perp_vectors_closed_form(mu: float) -> tuple[StateVector, StateVector]:
    """phi = 0 perpendiculars written out component by component."""
    a = math.sqrt(mu)
    n0, n1 = normalization_constants(mu)
    v0 = n0 * np.array([-a - a / SQRT2, 1 + 1 / SQRT2, 1 / SQRT2], dtype=complex)
    v1 = n1 * np.array([-a / SQRT2, 1 + 1 / SQRT2, 1 / SQRT2], dtype=complex)
    return StateVector(v0, QUTRIT_LABELS), StateVector(v1, QUTRIT_LABELS)


@dataclass(frozen=True)
class UkdPovm:
    mu: float
    phi: float
    theta: float
    v0perp: StateVector
    v1perp: StateVector
    povm: Povm
    n0: float | None = None
    n1: float | None = None

    @property
    def e0(self) -> HermitianOperator:
        return self.povm["BIT0"]

    @property
    def e1(self) -> HermitianOperator:
        return self.povm["BIT1"]

    @property
    def edk(self) -> HermitianOperator:
        return self.povm["DK"]

    def signal(self, bit: int, basis: Basis | int) -> StateVector:
        return bb84_signal_P(bit, basis, self.mu, self.phi, self.theta)

    def outcome_probabilities(self, bit: int, basis: Basis | int) -> np.ndarray:
        """``[p(BIT0), p(BIT1), p(DK)]``; the remainder up to 1 is the multiphoton weight."""
        return self.povm.probabilities(self.signal(bit, basis))

    def conclusive_probability(self, bit: int, basis: Basis | int | None = None) -> float:
        """Probability that Eve identifies ``bit`` when Alice sends it.

        With ``basis=None`` the two bases are averaged, as Alice picks them
        equiprobably. At phi = 0 both bases give the same value.
        """
        element = self.e0 if bit == 0 else self.e1
        bases = list(Basis) if basis is None else [Basis(basis)]
        return float(np.mean([expectation(self.signal(bit, b), element) for b in bases]))


def build_ukd_povm(mu: float, phi: float = 0.0, theta: float = 0.0) -> UkdPovm:
    """Three-outcome measurement ``E0 = |v1perp><v1perp|/2``, ``E1 = |v0perp><v0perp|/2``,
    ``E_DK = I - E0 - E1``.

    The weight 1/2 keeps ``E_DK`` positive for every ``mu`` because the largest
    eigenvalue of ``(|a><a| + |b><b|)/2`` is ``(1 + |<a|b>|)/2``. Positivity and
    completeness are re-checked by :class:`Povm`, which raises
    :class:`~phaseqkd.linalg.PovmError` naming the offending eigenvalue.
    """
    v0, v1 = perp_vectors(mu, phi, theta)
    e0 = HermitianOperator.projector(v1, CONCLUSIVE_WEIGHT)
    e1 = HermitianOperator.projector(v0, CONCLUSIVE_WEIGHT)
    edk = HermitianOperator.identity(3) - e0 - e1
    povm = Povm((e0, e1, edk), OUTCOMES)
    n0 = n1 = None
    if phi == 0.0 and theta == 0.0:
        n0, n1 = normalization_constants(mu)
    return UkdPovm(mu, phi, theta, v0, v1, povm, n0, n1)


def conclusive_probability(bit: int, mu: float) -> float:
    """Closed-form conclusive probability at phi = 0.

    ``C_MINUS * mu e^{-mu} / (1 + c mu)`` where ``c = C_MINUS`` for key bit 0 and
    ``c = C_PLUS`` for key bit 1, so bit 0 is identified slightly more often.
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    c = C_MINUS if bit == 0 else C_PLUS
    return C_MINUS * mu * math.exp(-mu) / (1.0 + c * mu)


def detection_rate_bound(mu: float) -> float:
    """Lower bound on Bob's detection rate under the attack, valid for both key bits.

    Approaches ``C_MINUS * mu``, about 0.146 of the honest rate, as mu -> 0.
    """
    if mu < 0:
        raise ValueError(f"mean photon number must be non-negative, got {mu}")
    return C_MINUS * mu * math.exp(-mu) / (1.0 + C_PLUS * mu)


def resend_state(bit: int, phi: float = 0.0) -> StateVector:
    """Single photon midway between the Z and X states carrying ``bit``.

    The X state is rephased so its overlap with the Z state is positive before
    adding; without that, ``|1> + |->`` would point away from both.
    """
    z = single_photon_state(bit, Basis.Z, phi).amplitudes
    x = single_photon_state(bit, Basis.X, phi).amplitudes
    ov = np.vdot(x, z)
    v = z + x * (ov / abs(ov))
    return StateVector(_fix_phase(v / np.linalg.norm(v)), QUBIT_LABELS)


def induced_error_rate() -> float:
    """Bit error rate Bob sees on sifted signals forwarded by Eve: 1/2 - 1/(2 sqrt 2)."""
    return C_MINUS


def resend_error_rates(phi: float = 0.0) -> dict[tuple[int, Basis], float]:
    """Wrong-bit probability for each sifted ``(bit, basis)``, from the resend states."""
    rates = {}
    for bit in (0, 1):
        r = resend_state(bit, phi)
        for basis in Basis:
            wrong = single_photon_state(1 - bit, basis, phi)
            rates[(bit, basis)] = abs(inner_product(wrong, r)) ** 2
    return rates
