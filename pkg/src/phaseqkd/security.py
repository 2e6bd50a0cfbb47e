"""Security verdicts for the phase-randomized source.

With a random phase the source is a Poisson photon-number mixture. Of the
signals Bob detects, at most a fraction ``Delta = p_M / p_D`` were multiphoton
pulses, and the phase error rate then differs from the observed bit error rate
by less than ``Delta / 2``. Two-way post-processing tolerates error rates up to
0.189 in both, which fixes the largest safe mean photon number.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .attack import detection_rate_bound, induced_error_rate

THRESHOLD_ONE_WAY = 0.110
THRESHOLD_TWO_WAY = 0.189

# The attack's error rate is usually quoted to three decimals (0.146), so an
# observed rate that close to it is treated as reproducible by the attack.
ATTACK_MATCH_TOLERANCE = 1e-3


class VerdictR(enum.Enum):
    SECURE = "SECURE"
    NOT_PROVEN = "NOT_PROVEN"


class VerdictP(enum.Enum):
    BROKEN = "BROKEN"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SecurityReport:
    mu: float
    delta: float
    p_d: float
    p_m: float
    big_delta: float
    delta_p_bound: float
    verdict_R: VerdictR
    verdict_P: VerdictP
    mu_star: float
    threshold_one_way: float = THRESHOLD_ONE_WAY
    threshold_two_way: float = THRESHOLD_TWO_WAY
    # Bob's detector efficiency is assumed not to depend on his basis choice.
    basis_independent_detector: bool = field(default=True)


def multiphoton_bound(mu: float) -> float:
    """Upper bound ``mu**2 / 2`` on the multiphoton probability."""
    return 0.5 * mu * mu


def multiphoton_fraction(p_m: float, p_d: float) -> float:
    if not 0.0 < p_d <= 1.0:
        raise ValueError(f"detection rate must lie in (0, 1], got {p_d}")
    if not 0.0 <= p_m <= 1.0:
        raise ValueError(f"multiphoton probability must lie in [0, 1], got {p_m}")
    frac = p_m / p_d
    if frac > 1.0:
        raise ValueError(
            f"multiphoton probability {p_m} exceeds detection rate {p_d}: "
            "more multiphotons than detections"
        )
    return frac


def multiphoton_fraction_bound(mu: float) -> float:
    """``Delta(mu)`` against the attack's detection rate, without the ``<= 1`` check.

    Works out to ``mu e^mu (1 + 0.854 mu) / (2 * 0.146)``, strictly increasing in ``mu``.
    """
    return multiphoton_bound(mu) / detection_rate_bound(mu)


def phase_error_bound(delta: float, big_delta: float) -> float:
    """Worst-case phase error rate, ``delta + big_delta / 2``."""
    return delta + 0.5 * big_delta


def _verdict_r(delta: float, delta_p: float) -> VerdictR:
    if delta < THRESHOLD_TWO_WAY and delta_p < THRESHOLD_TWO_WAY:
        return VerdictR.SECURE
    return VerdictR.NOT_PROVEN


def _verdict_p(delta: float) -> VerdictP:
    if delta >= induced_error_rate() - ATTACK_MATCH_TOLERANCE:
        return VerdictP.BROKEN
    return VerdictP.UNKNOWN


def secure_verdict(delta: float, mu: float, p_d: float | None = None) -> SecurityReport:
    """Verdicts for both sources at bit error rate ``delta`` and mean photon number ``mu``.

    Args:
        delta: Observed bit error rate.
        mu: Mean photon number per pulse.
        p_d: Detection rate per emitted pulse. Defaults to the rate Bob would see
            under the UKD attack, which is the comparison of interest.

    Returns:
        A :class:`SecurityReport`. ``p_m`` is the ``mu**2 / 2`` bound, so the
        verdict agrees with :func:`max_secure_mu`.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"bit error rate must lie in [0, 1], got {delta}")
    if not mu > 0:
        raise ValueError(f"mean photon number must be positive, got {mu}")
    if p_d is None:
        p_d = detection_rate_bound(mu)
    p_m = multiphoton_bound(mu)
    big_delta = multiphoton_fraction(p_m, p_d)
    delta_p = phase_error_bound(delta, big_delta)
    return SecurityReport(
        mu=mu,
        delta=delta,
        p_d=p_d,
        p_m=p_m,
        big_delta=big_delta,
        delta_p_bound=delta_p,
        verdict_R=_verdict_r(delta, delta_p),
        verdict_P=_verdict_p(delta),
        mu_star=max_secure_mu(delta),
    )


def max_secure_mu(delta: float, xtol: float = 1e-12) -> float:
    """Largest mean photon number for which the random-phase source is provably secure.

    Solves ``Delta(mu) = 2 (0.189 - delta)``. Returns 0 when ``delta >= 0.189``.
    """
    if delta < 0:
        raise ValueError(f"bit error rate must be non-negative, got {delta}")
    margin = 2.0 * (THRESHOLD_TWO_WAY - delta)
    if margin <= 0:
        return 0.0
    hi = 1.0
    while multiphoton_fraction_bound(hi) < margin:
        hi *= 2.0
    return brentq(lambda m: multiphoton_fraction_bound(m) - margin, 1e-300, hi, xtol=xtol)

