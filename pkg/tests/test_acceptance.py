"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary section at the end
of the session lists every criterion in order.
"""

import json
import math

import numpy as np
import pytest

from phaseqkd.attack import (
    C_MINUS,
    build_ukd_povm,
    conclusive_probability,
    induced_error_rate,
    normalization_constants,
    resend_error_rates,
)
from phaseqkd.cli import cmd_analyze, main
from phaseqkd.linalg import expectation, min_eigenvalue
from phaseqkd.security import VerdictP, VerdictR, max_secure_mu, multiphoton_fraction_bound
from phaseqkd.simulate import Attack, RunConfig, run_protocol
from phaseqkd.source import Basis, SourceConfig, SourceKind

GRID_MU = (0.005, 0.024, 0.1, 0.3)
GRID_PHI = (0.0, math.pi / 8, math.pi / 4)
SEED = 20240601


def sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


@pytest.fixture(scope="module")
def ukd_run():
    cfg = RunConfig(10**6, SourceConfig(SourceKind.P, 0.1), Attack.UKD, seed=SEED)
    return run_protocol(cfg)


def test_c01_povm_validity(criterion):
    worst_sum = 0.0
    worst_eig = math.inf
    for mu in GRID_MU:
        for phi in GRID_PHI:
            ukd = build_ukd_povm(mu, phi)
            total = ukd.e0.entries + ukd.e1.entries + ukd.edk.entries
            worst_sum = max(worst_sum, float(np.abs(total - np.eye(3)).max()))
            worst_eig = min(worst_eig, *(min_eigenvalue(e) for e in (ukd.e0, ukd.e1, ukd.edk)))
    criterion(1, "POVM validity", worst_sum <= 1e-12 and worst_eig >= -1e-12,
              f"max |sum - I| = {worst_sum:.1e}, min eigenvalue = {worst_eig:.3e}")


def test_c02_unambiguity(criterion):
    worst = 0.0
    for mu in GRID_MU:
        for phi in GRID_PHI:
            ukd = build_ukd_povm(mu, phi)
            for basis in Basis:
                worst = max(worst,
                            expectation(ukd.signal(0, basis), ukd.e1),
                            expectation(ukd.signal(1, basis), ukd.e0))
    criterion(2, "unambiguity", worst < 1e-12, f"largest wrong-bit weight = {worst:.1e}")


def test_c03_closed_forms(criterion):
    worst = 0.0
    for mu in (0.01, 0.1, 0.5):
        ukd = build_ukd_povm(mu)
        for bit in (0, 1):
            for basis in Basis:
                op = expectation(ukd.signal(bit, basis), ukd.e0 if bit == 0 else ukd.e1)
                worst = max(worst, abs(op - conclusive_probability(bit, mu)))
        n0, n1 = normalization_constants(mu)
        # The construction normalizes the perpendiculars, so the raw closed-form
        # vectors scaled by N must come out with unit norm.
        a = math.sqrt(mu)
        raw0 = np.array([-a - a / math.sqrt(2), 1 + 1 / math.sqrt(2), 1 / math.sqrt(2)])
        raw1 = np.array([-a / math.sqrt(2), 1 + 1 / math.sqrt(2), 1 / math.sqrt(2)])
        worst = max(worst, abs(n0 - 1 / np.linalg.norm(raw0)), abs(n1 - 1 / np.linalg.norm(raw1)))
        worst = max(worst,
                    float(np.abs(ukd.v0perp.amplitudes - n0 * raw0).max()),
                    float(np.abs(ukd.v1perp.amplitudes - n1 * raw1).max()))
    criterion(3, "closed-form agreement", worst <= 1e-12, f"max deviation = {worst:.1e}")


def test_c04_headline_numbers(criterion):
    rates = resend_error_rates()
    spread = max(abs(r - C_MINUS) for r in rates.values())
    delta = induced_error_rate()
    mu_star = max_secure_mu(0.146)
    below = multiphoton_fraction_bound(0.0235)
    above = multiphoton_fraction_bound(0.0245)
    ok = (
        delta == 0.5 - 1 / (2 * math.sqrt(2))
        and round(delta, 7) == 0.1464466
        and spread < 1e-12
        and abs(mu_star - 0.0240) <= 0.0005
        and below < 0.086
        and not above < 0.086
    )
    criterion(4, "headline numbers", ok,
              f"delta = {delta:.7f}, mu* = {mu_star:.5f}, "
              f"Delta(0.0235) = {below:.4f}, Delta(0.0245) = {above:.4f}")


def test_c05_monte_carlo(criterion, ukd_run):
    s = ukd_run
    e_ok = abs(s.error_rate_hat - 0.146447) <= 3 * sigma(0.146447, s.sifted)
    d_ok = abs(s.detection_rate - 0.012635) <= 3 * sigma(0.012635, s.sent)
    criterion(5, "Monte Carlo concordance", e_ok and d_ok and s.eve_agreement == 1.0,
              f"error = {s.error_rate_hat:.5f} (n = {s.sifted}), "
              f"detection = {s.detection_rate:.6f}, eve_agreement = {s.eve_agreement}")


def test_c06_honest_baseline(criterion):
    cfg = RunConfig(10**6, SourceConfig(SourceKind.R, 0.1), Attack.NONE, 1.0, seed=SEED)
    s = run_protocol(cfg)
    p = 1 - math.exp(-0.1)
    ok = abs(s.detection_rate - p) <= 3 * sigma(p, s.sent) and s.errors == 0
    criterion(6, "honest baseline", ok,
              f"detection = {s.detection_rate:.6f} vs {p:.6f}, errors = {s.errors}")


def test_c07_asymmetry(criterion, ukd_run):
    # Bit 1 must be identified strictly more often than bit 0, both analytically
    # (closed form and operator route) and in the Monte Carlo aggregate.
    analytic = []
    for mu in (1e-4, 1e-3, 0.01, 0.024, 0.1, 0.3, 0.5):
        ukd = build_ukd_povm(mu)
        analytic.append(conclusive_probability(1, mu) > conclusive_probability(0, mu))
        analytic.append(ukd.conclusive_probability(1) > ukd.conclusive_probability(0))
    s = ukd_run
    r0, r1 = s.conclusive_rate_by_bit(0), s.conclusive_rate_by_bit(1)
    sd = math.sqrt(sigma(r0, s.sent_by_bit[0]) ** 2 + sigma(r1, s.sent_by_bit[1]) ** 2)
    mc = r1 - r0 > 3 * sd
    criterion(7, "bit-1 conclusive probability exceeds bit 0", all(analytic) and mc,
              f"analytic at mu=0.1: bit0 = {conclusive_probability(0, 0.1):.6f}, "
              f"bit1 = {conclusive_probability(1, 0.1):.6f}; "
              f"MC r1 - r0 = {(r1 - r0) / sd:+.2f} sigma")


def test_c08_linear_scaling(criterion):
    def analytic(mu):
        return 0.5 * (conclusive_probability(0, mu) + conclusive_probability(1, mu))

    a_ratio = (analytic(1e-3) / 1e-3) / (analytic(1e-4) / 1e-4)
    # Same expected count of detections (about 8800) at both points.
    runs = {}
    for mu, n in ((1e-3, 6 * 10**7), (1e-4, 6 * 10**8)):
        cfg = RunConfig(n, SourceConfig(SourceKind.P, mu), Attack.UKD, seed=SEED)
        runs[mu] = run_protocol(cfg).detection_rate / mu
    mc_ratio = runs[1e-3] / runs[1e-4]
    ok = abs(a_ratio - 1) <= 0.05 and abs(mc_ratio - 1) <= 0.05
    criterion(8, "linear-in-mu detection rate", ok,
              f"analytic ratio = {a_ratio:.5f}, MC ratio = {mc_ratio:.4f}, "
              f"small-mu limit of p_D/mu = {C_MINUS:.4f}")


def test_c09_end_to_end(criterion):
    report = cmd_analyze(0.02, 0.146)["source_R"]
    ok = report["verdict_R"] is VerdictR.SECURE and report["verdict_P"] is VerdictP.BROKEN
    criterion(9, "source R secure, source P broken",
              ok, f"verdict_R = {report['verdict_R'].value}, verdict_P = {report['verdict_P'].value}")


def test_c10_determinism(criterion, capsys):
    argv = ["simulate", "--mu", "0.1", "--attack", "ukd", "--n-signals", "500000", "--seed", "77"]
    outputs = []
    for workers in ("1", "1", "3", "3"):
        assert main(argv + ["--workers", workers]) == 0
        outputs.append(capsys.readouterr().out)
    same_bytes = outputs[0] == outputs[1] and outputs[2] == outputs[3]
    stats = [json.loads(o)["stats"] for o in outputs]
    same_stats = stats[0] == stats[2]
    base = RunConfig(3 * 10**5, SourceConfig(SourceKind.R, 0.1), seed=77)
    honest_same = run_protocol(base) == run_protocol(
        RunConfig(3 * 10**5, SourceConfig(SourceKind.R, 0.1), seed=77, workers=4))
    criterion(10, "determinism", same_bytes and same_stats and honest_same,
              f"byte-identical repeats = {same_bytes}, stats stable across workers = {same_stats and honest_same}")
