"""Monte Carlo BB84 runs with an optional UKD intercept/resend eavesdropper.

Signals are processed in fixed blocks of ``BLOCK_SIZE`` indices. Block ``b``
draws from ``numpy.random.default_rng(SeedSequence(seed, spawn_key=(b,)))``, so
the random stream is a function of ``(seed, b)`` alone. Workers take disjoint
sets of blocks and return integer counters that are summed in block order,
which makes the result identical for every worker count.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .attack import build_ukd_povm, resend_state
from .linalg import inner_product, sample_categorical
from .source import Basis, SourceConfig, SourceKind, sample_photon_number, single_photon_state

BLOCK_SIZE = 1 << 16

# Outcome indices of Eve's measurement; MULTI is the residual weight.
BIT0, BIT1, DK, MULTI = 0, 1, 2, 3


class Attack(enum.Enum):
    NONE = "none"
    UKD = "ukd"


@dataclass(frozen=True)
class RunConfig:
    n_signals: int
    source: SourceConfig
    attack: Attack = Attack.NONE
    channel_transmittance: float = 1.0
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "attack", Attack(self.attack))
        if int(self.n_signals) != self.n_signals or self.n_signals < 1:
            raise ValueError(f"n_signals must be a positive integer, got {self.n_signals}")
        if not 0.0 < self.channel_transmittance <= 1.0:
            raise ValueError(
                f"channel transmittance must lie in (0, 1], got {self.channel_transmittance}"
            )
        if int(self.workers) != self.workers or self.workers < 1:
            raise ValueError(f"workers must be a positive integer, got {self.workers}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.attack is Attack.UKD:
            if self.source.kind is not SourceKind.P:
                raise ValueError("the UKD attack needs the phase-coherent source P")
            if not self.source.mu > 0:
                raise ValueError("the UKD attack needs mu > 0")


@dataclass(frozen=True)
class ProtocolStats:
    sent: int
    detected: int
    sifted: int
    errors: int
    eve_agreements: int | None = None
    sent_by_bit: tuple[int, int] = (0, 0)
    detected_by_bit: tuple[int, int] = (0, 0)

    @property
    def detection_rate(self) -> float:
        return self.detected / self.sent

    @property
    def detection_rate_se(self) -> float:
        p = self.detection_rate
        return math.sqrt(p * (1 - p) / self.sent)

    @property
    def error_rate_hat(self) -> float | None:
        return self.errors / self.sifted if self.sifted else None

    @property
    def error_rate_se(self) -> float | None:
        return binomial_se(self.errors, self.sifted) if self.sifted else None

    @property
    def eve_agreement(self) -> float | None:
        """Fraction of sifted positions where Eve's recorded bit equals Alice's."""
        if self.eve_agreements is None or not self.sifted:
            return None
        return self.eve_agreements / self.sifted

    def conclusive_rate_by_bit(self, bit: int) -> float:
        return self.detected_by_bit[bit] / self.sent_by_bit[bit]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sent_by_bit"] = list(self.sent_by_bit)
        d["detected_by_bit"] = list(self.detected_by_bit)
        for name in ("detection_rate", "detection_rate_se", "error_rate_hat",
                     "error_rate_se", "eve_agreement"):
            d[name] = getattr(self, name)
        return d

    def __add__(self, other: ProtocolStats) -> ProtocolStats:
        eve = None
        if self.eve_agreements is not None or other.eve_agreements is not None:
            eve = (self.eve_agreements or 0) + (other.eve_agreements or 0)
        return ProtocolStats(
            sent=self.sent + other.sent,
            detected=self.detected + other.detected,
            sifted=self.sifted + other.sifted,
            errors=self.errors + other.errors,
            eve_agreements=eve,
            sent_by_bit=tuple(a + b for a, b in zip(self.sent_by_bit, other.sent_by_bit)),
            detected_by_bit=tuple(
                a + b for a, b in zip(self.detected_by_bit, other.detected_by_bit)
            ),
        )


def binomial_se(k: int, n: int) -> float:
    p = k / n
    return math.sqrt(p * (1 - p) / n)


def sift(alice_basis, bob_basis, alice_bit, bob_bit, detected):
    """Keep detected positions where Alice and Bob used the same basis.

    All arguments are equal-length arrays. Returns ``(alice_bits, bob_bits, keep)``
    where ``keep`` is the boolean mask over the raw positions.
    """
    alice_basis = np.asarray(alice_basis)
    keep = np.asarray(detected, dtype=bool) & (alice_basis == np.asarray(bob_basis))
    return np.asarray(alice_bit)[keep], np.asarray(bob_bit)[keep], keep


def estimate_error_rate(alice_bits, bob_bits) -> tuple[float, float]:
    """Sifted error rate and its binomial standard error."""
    alice_bits = np.asarray(alice_bits)
    n = alice_bits.size
    if n == 0:
        raise ValueError("cannot estimate an error rate from an empty sifted key")
    k = int(np.count_nonzero(alice_bits != np.asarray(bob_bits)))
    return k / n, binomial_se(k, n)


def _prob_bob_reads_zero(states: dict, phi: float) -> np.ndarray:
    # table[s, b] = P(Bob reads 0 | incoming state s, Bob basis b)
    table = np.empty((len(states), 2))
    for s, psi in states.items():
        for b in Basis:
            table[s, b] = abs(inner_product(single_photon_state(0, b, phi), psi)) ** 2
    return table


@dataclass(frozen=True)
class _Plan:
    """Per-run constants shared read-only by all blocks."""

    config: RunConfig
    # outcome weights for Alice's signal index 2*bit + basis (UKD only)
    eve_weights: np.ndarray | None = None
    bob_zero: np.ndarray = field(default_factory=lambda: np.empty(0))


def _make_plan(config: RunConfig) -> _Plan:
    src = config.source
    if config.attack is Attack.UKD:
        ukd = build_ukd_povm(src.mu, src.phi, src.theta)
        weights = np.empty((4, 3))
        for bit in (0, 1):
            for basis in Basis:
                # Rounding can leave ~1e-18 of negative weight on impossible outcomes.
                weights[2 * bit + basis] = np.clip(ukd.outcome_probabilities(bit, basis), 0, None)
        # Bob receives resend_state(eve_bit).
        bob_zero = _prob_bob_reads_zero({b: resend_state(b, src.phi) for b in (0, 1)}, src.phi)
        return _Plan(config, weights, bob_zero)
    # Honest channel: Bob receives Alice's polarization, indexed 2*bit + basis.
    states = {2 * bit + basis: single_photon_state(bit, basis, src.phi)
              for bit in (0, 1) for basis in Basis}
    return _Plan(config, None, _prob_bob_reads_zero(states, src.phi))


def _run_block(plan: _Plan, block: int) -> ProtocolStats:
    cfg = plan.config
    start = block * BLOCK_SIZE
    n = min(BLOCK_SIZE, cfg.n_signals - start)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(block,)))

    # Alice's choice indexed as 2*bit + basis, uniform over the four signals.
    signal = rng.integers(0, 4, n)
    a_bit = signal >> 1
    a_basis = signal & 1

    eve_bit = None
    if cfg.attack is Attack.UKD:
        outcome = sample_categorical(plan.eve_weights, rng, classes=signal)
        detected = outcome <= BIT1
        eve_bit = (outcome == BIT1).astype(np.int64)
        incoming = eve_bit
    else:
        photons = sample_photon_number(cfg.source.mu, rng, n)
        p_click = 1.0 - (1.0 - cfg.channel_transmittance) ** photons
        detected = rng.random(n) < p_click
        incoming = signal

    # Bob's basis and outcome are drawn only where something arrives; Alice's
    # basis is already fixed, so this is the same as drawing them for all.
    hit = np.flatnonzero(detected)
    b_basis = rng.integers(0, 2, hit.size)
    b_bit = (rng.random(hit.size) >= plan.bob_zero[incoming[hit], b_basis]).astype(np.int64)

    alice_key, bob_key, keep = sift(a_basis[hit], b_basis, a_bit[hit], b_bit, np.ones(hit.size, bool))
    errors = int(np.count_nonzero(alice_key != bob_key))
    eve_agreements = None
    if eve_bit is not None:
        eve_agreements = int(np.count_nonzero(eve_bit[hit][keep] == alice_key))
    n_bit1 = int(np.count_nonzero(a_bit))
    det_bit1 = int(np.count_nonzero(a_bit[hit]))
    return ProtocolStats(
        sent=n,
        detected=hit.size,
        sifted=int(keep.sum()),
        errors=errors,
        eve_agreements=eve_agreements,
        sent_by_bit=(n - n_bit1, n_bit1),
        detected_by_bit=(hit.size - det_bit1, det_bit1),
    )


def run_protocol(config: RunConfig) -> ProtocolStats:
    """Simulate ``config.n_signals`` BB84 rounds and return aggregate counters.

    Under the UKD attack, Eve's outcome for each pulse is drawn from the exact
    outcome probabilities of her POVM on Alice's truncated signal, with the
    multiphoton weight as an extra blocked outcome. Conclusive outcomes are
    forwarded as a single photon that Bob always detects; everything else is
    blocked. Without an attack, each photon survives the channel independently
    and any surviving photon clicks Bob's ideal detector.
    """
    plan = _make_plan(config)
    n_blocks = -(-config.n_signals // BLOCK_SIZE)
    empty = ProtocolStats(0, 0, 0, 0, 0 if config.attack is Attack.UKD else None)
    if config.workers == 1:
        parts = [_run_block(plan, b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(lambda b: _run_block(plan, b), range(n_blocks)))
    total = empty
    for part in parts:
        total = total + part
    return total
