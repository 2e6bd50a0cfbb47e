"""Command-line front end: ``phaseqkd {analyze,simulate,sweep,threshold}``.

A flat ``key = value`` config file (``--config``) may supply defaults for any
flag of the chosen verb; flags on the command line win. Keys use the flag
spelling without dashes (``n-signals`` and ``n_signals`` are both accepted).

Exit status: 0 on success, 2 on usage or validation errors, 1 otherwise.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import attack, security
from .simulate import Attack, RunConfig, run_protocol
from .source import SourceConfig, SourceKind, photon_statistics

SWEEP_COLUMNS = (
    "mu", "p0", "p1", "pM", "p_d_attack", "p_d_honest",
    "conclusive_prob_bit0", "conclusive_prob_bit1",
    "big_delta", "delta_p_bound", "verdict_R",
)


class UsageError(Exception):
    pass


def fmt(x):
    """Round floats to 9 significant digits so outputs diff byte-for-byte."""
    if isinstance(x, float):
        if not math.isfinite(x):
            return None
        return float(f"{x:.9g}")
    if isinstance(x, dict):
        return {k: fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    if hasattr(x, "value"):
        return x.value
    return x


def _dump_json(obj) -> str:
    return json.dumps(fmt(obj), indent=2) + "\n"


def _dump_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: f"{v:.9g}" if isinstance(v, float) else fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _dump_jsonl(rows: list[dict]) -> str:
    return "".join(json.dumps(fmt(r)) + "\n" for r in rows)


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive), or a single number."""
    parts = text.split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"malformed grid {text!r}; expected start:stop:step") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError(f"malformed grid {text!r}; expected start:stop:step")
    start, stop, step = nums
    if step <= 0 or stop < start:
        raise UsageError(f"grid {text!r} must be ascending with a positive step")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def attack_summary(mu: float, phi: float) -> dict:
    ukd = attack.build_ukd_povm(mu, phi)
    p0 = ukd.conclusive_probability(0)
    p1 = ukd.conclusive_probability(1)
    rates = attack.resend_error_rates(phi)
    return {
        "conclusive_prob_bit0": p0,
        "conclusive_prob_bit1": p1,
        "p_d_attack": min(p0, p1),
        "p_d_attack_mean": 0.5 * (p0 + p1),
        "induced_delta": float(np.mean(list(rates.values()))),
        "eve_knowledge": "total",
    }


def cmd_analyze(mu: float, delta: float, phi: float = 0.0) -> dict:
    if not mu > 0:
        raise UsageError(f"--mu must be positive, got {mu}")
    summary = attack_summary(mu, phi)
    report = security.secure_verdict(delta, mu, summary["p_d_attack"])
    return {
        "mu": mu,
        "delta": delta,
        "phi": phi,
        "source_P": summary,
        "source_R": vars(report),
    }


def cmd_simulate(config: RunConfig) -> dict:
    stats = run_protocol(config)
    src = config.source
    return {
        "config": {
            "n_signals": config.n_signals,
            "source": {"kind": src.kind.value, "mu": src.mu, "theta": src.theta, "phi": src.phi},
            "attack": config.attack.value,
            "channel_transmittance": config.channel_transmittance,
            "seed": config.seed,
            "workers": config.workers,
        },
        "stats": stats.to_dict(),
    }


def sweep_row(mu: float, delta: float, phi: float = 0.0) -> dict:
    stats = photon_statistics(mu)
    summary = attack_summary(mu, phi)
    big_delta = security.multiphoton_bound(mu) / summary["p_d_attack"]
    delta_p = security.phase_error_bound(delta, big_delta)
    return {
        "mu": mu,
        "p0": stats.p0,
        "p1": stats.p1,
        "pM": stats.pM,
        "p_d_attack": summary["p_d_attack"],
        "p_d_honest": 1.0 - stats.p0,
        "conclusive_prob_bit0": summary["conclusive_prob_bit0"],
        "conclusive_prob_bit1": summary["conclusive_prob_bit1"],
        "big_delta": big_delta,
        "delta_p_bound": delta_p,
        # Delta > 1 cannot come from a real run; it only means the bound is useless.
        "verdict_R": security._verdict_r(delta, delta_p).value,
    }


def cmd_sweep(mu_grid: list[float], delta: float, phi: float = 0.0) -> list[dict]:
    if not mu_grid:
        raise UsageError("empty mu grid")
    if any(b <= a for a, b in zip(mu_grid, mu_grid[1:])):
        raise UsageError("mu grid must be strictly ascending")
    if mu_grid[0] <= 0:
        raise UsageError("mu grid values must be positive")
    return [sweep_row(mu, delta, phi) for mu in mu_grid]


def cmd_threshold(delta: float) -> dict:
    if not 0.0 <= delta <= security.THRESHOLD_TWO_WAY:
        raise UsageError(f"--delta must lie in [0, {security.THRESHOLD_TWO_WAY}], got {delta}")
    return {"delta": delta, "mu_star": security.max_secure_mu(delta), "xtol": 1e-12}


def _common(p: argparse.ArgumentParser, fmt_default: str) -> None:
    p.add_argument("--format", choices=("json", "csv"), default=fmt_default)
    p.add_argument("--out", default="-", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phaseqkd", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat key = value file with flag defaults")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("analyze", help="attack figures and security verdicts at one mu")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--delta", type=float, default=attack.induced_error_rate())
    p.add_argument("--phi", type=float, default=0.0)
    _common(p, "json")

    p = sub.add_parser("simulate", help="Monte Carlo BB84 run")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--n-signals", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--transmittance", type=float, default=1.0)
    p.add_argument("--attack", choices=("none", "ukd"), default="none")
    p.add_argument("--source", choices=("P", "R"), default=None,
                   help="default: P under attack, R otherwise")
    p.add_argument("--phi", type=float, default=0.0)
    _common(p, "json")

    p = sub.add_parser("sweep", help="analytic table over a mu grid")
    p.add_argument("--mu-grid", required=True, help="start:stop:step, stop inclusive")
    p.add_argument("--delta", type=float, default=attack.induced_error_rate())
    p.add_argument("--phi", type=float, default=0.0)
    _common(p, "csv")

    p = sub.add_parser("threshold", help="largest provably secure mu for a bit error rate")
    p.add_argument("--delta", type=float, required=True)
    _common(p, "json")
    return parser


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    # Only --config and the verb are needed here; the full parse comes later,
    # once config values have relaxed the required flags.
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    ns, rest = pre.parse_known_args(argv)
    choices = parser._subparsers._group_actions[0].choices
    verb = next((a for a in rest if a in choices), None)
    if not ns.config or verb is None:
        return
    sub = choices[verb]
    known = {a.dest for a in sub._actions} - {"help"}
    values = read_config(ns.config)
    unknown = sorted(set(values) - known)
    if unknown:
        raise UsageError(f"unknown config keys for {verb}: {', '.join(unknown)}")
    for action in sub._actions:
        if action.dest in values:
            action.required = False
    # argparse runs string defaults through each action's type converter.
    sub.set_defaults(**values)


def run(argv: list[str]) -> tuple[str, str]:
    """Execute one command; returns ``(text, destination)``."""
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    return _render(args), args.out


def _render(args: argparse.Namespace) -> str:
    if args.verb == "analyze":
        result = cmd_analyze(args.mu, args.delta, args.phi)
        if args.format == "csv":
            flat = {**{k: v for k, v in result.items() if not isinstance(v, dict)},
                    **result["source_P"], **result["source_R"]}
            return _dump_csv([flat], flat.keys())
        return _dump_json(result)
    if args.verb == "simulate":
        kind = args.source or ("P" if args.attack == "ukd" else "R")
        config = RunConfig(
            n_signals=args.n_signals,
            source=SourceConfig(SourceKind(kind), args.mu, phi=args.phi),
            attack=Attack(args.attack),
            channel_transmittance=args.transmittance,
            seed=args.seed,
            workers=args.workers,
        )
        result = cmd_simulate(config)
        if args.format == "csv":
            flat = {**result["config"], **result["stats"]}
            flat["source"] = result["config"]["source"]["kind"]
            return _dump_csv([flat], flat.keys())
        return _dump_json(result)
    if args.verb == "sweep":
        rows = cmd_sweep(parse_grid(args.mu_grid), args.delta, args.phi)
        if args.format == "csv":
            return _dump_csv(rows, SWEEP_COLUMNS)
        return _dump_jsonl(rows)
    result = cmd_threshold(args.delta)
    if args.format == "csv":
        return _dump_csv([result], result.keys())
    return _dump_json(result)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        text, out = run(argv)
        if out != "-":
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0)
    except (UsageError, ValueError, OSError) as exc:
        print(f"phaseqkd: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"phaseqkd: internal error: {exc!r}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
