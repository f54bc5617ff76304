"""Command-line front end.

Subcommands: verify-quantum, fbl, run, experiment, attack-report, fixture.
Exit codes: 0 on success, 1 on validation failure, 2 on runtime failure.
All structured output is JSON; the attack-optimizer boundary is CSV.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import quantum
from .coding import (
    channel_capacity,
    channel_dispersion,
    extractable_key_length,
    ppv_max_payload,
    secrecy_capacity,
)
from .protocol import (
    SessionConfig,
    SetupError,
    available_engines,
    process_by_name,
    run_experiment,
    run_session,
)

__all__ = ["main"]

EVE_CROSSOVER_DEFAULT = 1.0 / 3.0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _emit(payload, path=None):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_config_file(path) -> dict:
    """Flat key=value lines; '#' starts a comment. Keys use flag spelling."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def cmd_verify_quantum(args) -> int:
    process = process_by_name(args.process)
    validity = quantum.validate_process_matrix(process.operator)
    combs = {
        order: quantum.validate_comb(process.operator, order)
        for order in ("A<B", "B<A")
    }
    p_succ = quantum.game_success_probability(process)
    report = {
        "process": args.process,
        "game_success": p_succ,
        "validity": {"passed": validity.passed, "residuals": validity.residuals},
        "combs": {
            order: {"passed": rep.passed, "residuals": rep.residuals}
            for order, rep in combs.items()
        },
    }
    _emit(report, args.output)
    if not args.output:
        sys.stdout.write(f"p_succ = {p_succ:.9f}\n")
    return 0 if validity.passed else 1


def cmd_fbl(args) -> int:
    payload = ppv_max_payload(args.n, args.eps, args.p)
    ell = extractable_key_length(args.n, args.eps, args.delta, args.p, args.pe)
    report = {
        "n": args.n,
        "eps": args.eps,
        "delta": args.delta,
        "p": args.p,
        "p_eve": args.pe,
        "capacity": channel_capacity(args.p),
        "dispersion": channel_dispersion(args.p),
        "payload_bits": payload,
        "secrecy_capacity": secrecy_capacity(args.p, args.pe),
        "eve_dispersion": channel_dispersion(args.pe),
        "key_length_bits": ell,
        "no_extractable_key": ell < 0,
    }
    _emit(report, args.output)
    return 0


def _session_config(args) -> SessionConfig:
    return SessionConfig(
        n=args.n,
        codec=args.codec,
        channel=args.channel,
        p=args.p,
        process=args.process,
        q0=args.q0,
        master_seed=args.seed,
        trial_index=args.trial,
        pa_length=args.pa_length,
        retry_uncorrectable=args.retry,
        round_cap_multiplier=args.cap_mult,
        engine=args.engine,
    )


def cmd_run(args) -> int:
    config = _session_config(args)
    if args.transcript:
        with open(args.transcript, "w") as fh:
            stats = run_session(config, transcript=fh)
    else:
        stats = run_session(config)
    _emit(stats.to_json(), args.output)
    return 0 if stats.failure_reason != "timeout" else 2


def cmd_experiment(args) -> int:
    config = _session_config(args)
    agg = run_experiment(config, args.trials, workers=args.workers)
    _emit(agg, args.output)
    return 0


def read_attack_csv(path):
    """Rows of the attack-curve CSV: (Q, eve_value, ab_value, status)."""
    rows = []
    with open(path) as fh:
        header = None
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if header is None:
                header = [p.lower() for p in parts]
                expected = ["q", "eve_value", "ab_value", "status"]
                if header != expected:
                    raise ValueError(f"expected CSV columns {expected}, got {header}")
                continue
            if len(parts) != 4:
                raise ValueError(f"malformed CSV row: {line!r}")
            rows.append((float(parts[0]), float(parts[1]), float(parts[2]), parts[3]))
    if not rows:
        raise ValueError(f"{path} holds no attack-curve rows")
    return sorted(rows, key=lambda r: r[0])


def attack_intersection(rows):
    """Q* where the eavesdropper curve crosses the compliance diagonal."""
    prev = None
    for q, eve, _, status in rows:
        if status != "optimal":
            continue
        gap = eve - q
        if prev is not None and prev[1] > 0 >= gap:
            q0, g0 = prev
            return q0 + (q - q0) * g0 / (g0 - gap)
        prev = (q, gap)
    return None


def cmd_attack_report(args) -> int:
    rows = read_attack_csv(args.csv)
    eve_vals = [r[1] for r in rows if r[3] == "optimal"]
    monotone = all(a >= b - 1e-6 for a, b in zip(eve_vals, eve_vals[1:]))
    q_star = attack_intersection(rows)
    nearest = min(rows, key=lambda r: abs(r[0] - args.q0))
    lines = [
        f"{'Q':>8}  {'eve':>8}  {'A-B':>8}  status",
        *(
            f"{q:8.4f}  {eve:8.4f}  {ab:8.4f}  {status}"
            for q, eve, ab, status in rows
        ),
        f"eve curve monotone non-increasing: {'yes' if monotone else 'NO'}",
        f"intersection Q* = {q_star:.4f}" if q_star is not None else "intersection: none found",
        f"closest row to Q0={args.q0}: Q={nearest[0]:.4f} eve={nearest[1]:.4f}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.output:
        _emit(
            {
                "rows": len(rows),
                "monotone": monotone,
                "q_star": q_star,
                "q0": args.q0,
                "eve_at_q0": nearest[1],
            },
            args.output,
        )
    return 0


def cmd_fixture(args) -> int:
    quantum.export_fixture(args.output_path)
    sys.stdout.write(f"wrote quantum fixture to {args.output_path}\n")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="icoqkd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output", default=None, help="write JSON here instead of stdout")
        p.add_argument("--config", default=None, help="key=value defaults file")

    p = sub.add_parser("verify-quantum", help="validate a process and score the game")
    p.add_argument(
        "--process",
        default="wcns",
        choices=["wcns", "white-noise", "comb-a-b", "comb-b-a"],
    )
    add_common(p)
    p.set_defaults(func=cmd_verify_quantum)

    p = sub.add_parser("fbl", help="finite-blocklength calculators")
    p.add_argument("--n", type=int, default=1990)
    p.add_argument("--eps", type=float, default=1e-5)
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--p", type=float, default=0.1666)
    p.add_argument("--pe", type=float, default=EVE_CROSSOVER_DEFAULT)
    add_common(p)
    p.set_defaults(func=cmd_fbl)

    for name, helptext in [
        ("run", "run one key-agreement session"),
        ("experiment", "run many sessions and aggregate"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--channel", default="bsc", choices=["bsc", "quantum"])
        p.add_argument("--p", type=float, default=0.1465)
        p.add_argument(
            "--process",
            default="wcns",
            choices=["wcns", "white-noise", "comb-a-b", "comb-b-a"],
        )
        p.add_argument("--codec", default="ideal,1990")
        p.add_argument("--n", type=int, default=1990)
        p.add_argument("--q0", type=float, default=0.8334)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trial", type=int, default=0)
        p.add_argument("--pa-length", type=int, default=None)
        p.add_argument("--retry", action="store_true")
        p.add_argument("--cap-mult", type=float, default=10.0)
        p.add_argument("--engine", default="auto", choices=["auto", *available_engines()])
        add_common(p)
        if name == "run":
            p.add_argument("--transcript", default=None, help="JSONL audit log path")
            p.set_defaults(func=cmd_run)
        else:
            p.add_argument("--trials", type=int, default=100)
            p.add_argument("--workers", type=int, default=1)
            p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("attack-report", help="render an attack-curve CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--q0", type=float, default=0.8334)
    add_common(p)
    p.set_defaults(func=cmd_attack_report)

    p = sub.add_parser("fixture", help="export quantum constants for the optimizer")
    p.add_argument("-o", "--output-path", default="quantum_fixture.json")
    p.set_defaults(func=cmd_fixture)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        # a config file provides defaults; explicit flags win
        if "--config" in argv:
            at = argv.index("--config")
            if at + 1 >= len(argv):
                raise ValueError("--config requires a file path")
            overrides = _read_config_file(argv[at + 1])
            extra = []
            for key, value in overrides.items():
                flag = "--" + key.replace("_", "-")
                if flag in argv:
                    continue
                if value.lower() in ("true", "false"):
                    if value.lower() == "true":
                        extra.append(flag)
                else:
                    extra += [flag, value]
            argv = argv[:1] + extra + argv[1:]
        args = parser.parse_args(argv)
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    try:
        return args.func(args)
    except (SetupError, ValueError, FileNotFoundError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"runtime failure: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
