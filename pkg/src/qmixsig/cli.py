"""``qmixsig`` command-line driver.

Exit codes: 0 success, 2 unreadable or inconsistent input, 3 capacity
exceeded, 4 numeric domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .calibration import build_calibration_table
from .encoding import build_level_lut, discretize_lognormal, lut_synthesis_cost
from .errors import CapacityError, DomainError, ModelError, ShapeError
from .pricing import LinearPayoff, compare_pipelines, price_baseline, price_proposed
from .qae import AmplitudeProblem, QaeConfig, canonical_qae
from .reporting import (
    PROBLEM_DEFAULTS,
    WALK_DEFAULTS,
    emit_comparison_table,
    load_config,
    provenance_header,
)
from .walk import (
    AccumulatorEncoding,
    WalkModel,
    auto_encoding,
    build_walk_circuit,
    classical_monte_carlo,
    decode_mean_sum,
    quantum_price_distribution,
)

EXIT_OK, EXIT_PARSE, EXIT_CAPACITY, EXIT_DOMAIN = 0, 2, 3, 4


def _problem(cfg):
    dist = discretize_lognormal(float(cfg["mu"]), float(cfg["sigma"]), int(cfg["levels"]))
    levels = dist.levels
    # normalize over the register-grid positions used by the spread baseline
    g = 2 ** int(cfg["input_bits"]) // levels
    lo, hi = 0.5 / g - 0.5, levels - 0.5 - 0.5 / g
    payoff = LinearPayoff.normalized(float(cfg["slope"]), float(cfg["offset"]), levels, positions=[lo, hi])
    return dist, payoff


def _walk(cfg):
    model = WalkModel.affine(
        int(cfg["days"]),
        int(cfg["step_bits"]),
        float(cfg["step_min"]),
        float(cfg["step_delta"]),
        float(cfg["drift"]),
        float(cfg["S0"]),
    )
    lam = cfg["lambda"]
    enc = auto_encoding(model) if lam in (None, "auto") else AccumulatorEncoding(float(lam))
    return model, enc


def cmd_encode_dist(args, cfg):
    dist = discretize_lognormal(float(cfg["mu"]), float(cfg["sigma"]), int(cfg["levels"]))
    lut = build_level_lut(dist, int(cfg["input_bits"]))
    cost = lut_synthesis_cost(lut)
    if args.lut_out:
        Path(args.lut_out).write_text(provenance_header("encode-dist", cfg, args.seed) + lut.to_text())
    summary = (f"# synthesis: gate_count={cost.gate_count} depth={cost.depth} "
               f"model={cost.model_name} thresholds={cost.thresholds}\n")
    return summary + dist.to_csv(), summary


def cmd_calibrate(args, cfg):
    table = build_calibration_table(args.bits)
    return table.to_csv(), f"calibration table: {table.size} entries\n"


def cmd_price(which):
    def handler(args, cfg):
        dist, payoff = _problem(cfg)
        if which == "baseline":
            reports = [price_baseline(dist, payoff, int(cfg["input_bits"]))]
        else:
            lut = build_level_lut(dist, int(cfg["input_bits"]))
            table = build_calibration_table(int(cfg["calib_bits"]))
            if which == "proposed":
                reports = [price_proposed(dist, payoff, lut, table)]
            else:
                reports = compare_pipelines(dist, payoff, lut, table).reports
        tab = emit_comparison_table(reports)
        return tab.to_csv(), tab.to_text()
    return handler


def cmd_walk_sim(args, cfg):
    model, enc = _walk(cfg)
    if args.shots:
        dist = classical_monte_carlo(model, args.shots, args.seed)
        source = f"classical-monte-carlo shots={args.shots}"
    else:
        dist = quantum_price_distribution(model, enc)
        source = "statevector"
    summary = (f"# source: {source}\n# lambda: {float(enc.lam)!r}\n"
               f"# mean_sum: {float(dist.mean_sum)!r}\n# mean_price: {float(dist.mean_price)!r}\n")
    return summary + dist.to_csv(), summary


def cmd_qae_estimate(args, cfg):
    model, enc = _walk(cfg)
    circuit, acc = build_walk_circuit(model, enc)
    if args.shots:
        config = QaeConfig(args.m_eval, "sampled", args.shots, args.seed)
    else:
        config = QaeConfig(args.m_eval)
    result = canonical_qae(AmplitudeProblem(circuit, acc), config)
    mean = decode_mean_sum(result.amplitude_estimate, enc)
    summary = (f"# amplitude_estimate: {float(result.amplitude_estimate)!r}\n# grid_index: {result.grid_index}\n"
               f"# mean_sum: {float(mean)!r}\n# lambda: {float(enc.lam)!r}\n")
    return summary + result.to_csv(), summary


COMMANDS = {
    "encode-dist": (cmd_encode_dist, PROBLEM_DEFAULTS),
    "calibrate": (cmd_calibrate, {}),
    "price-baseline": (cmd_price("baseline"), PROBLEM_DEFAULTS),
    "price-proposed": (cmd_price("proposed"), PROBLEM_DEFAULTS),
    "compare": (cmd_price("compare"), PROBLEM_DEFAULTS),
    "walk-sim": (cmd_walk_sim, WALK_DEFAULTS),
    "qae-estimate": (cmd_qae_estimate, WALK_DEFAULTS),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmixsig", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bits", type=int, default=12, help="calibration table resolution")
        p.add_argument("--shots", type=int, default=0, help="sample instead of exact evaluation")
        p.add_argument("--m-eval", type=int, default=6, help="QAE evaluation qubits")
        if name == "encode-dist":
            p.add_argument("--lut-out", help="also write the level LUT here")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler, defaults = COMMANDS[args.command]
    try:
        cfg = load_config(args.config, defaults)
        if args.command == "calibrate":
            cfg = {"bits": args.bits}
        elif args.command == "qae-estimate":
            cfg = dict(cfg, m_eval=args.m_eval, shots=args.shots)
        elif args.command == "walk-sim" and args.shots:
            cfg = dict(cfg, shots=args.shots)
        body, summary = handler(args, cfg)
    except (OSError, json.JSONDecodeError, ShapeError, ModelError, KeyError, TypeError) as exc:
        print(f"qmixsig: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"qmixsig: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except DomainError as exc:
        print(f"qmixsig: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = provenance_header(args.command, cfg, args.seed) + body
    if args.out:
        Path(args.out).write_text(text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
