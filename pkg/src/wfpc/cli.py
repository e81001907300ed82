"""Command-line front end.

Subcommands: power, fairness, simulate, sweep, complexity, fit-zipf.
Results are CSV. ``--config FILE`` reads a flat JSON object whose keys are
flag names (``max_it`` or ``max-it``); explicit flags override it. With
``--out`` the resolved configuration is echoed next to the CSV output as
``config.json``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import complexity, scheme, sim
from .adversary import CAUTIOUS, NONE, AdversaryConfig
from .protocol import ProtocolConfig
from .scheme import EnumerationTooLargeError, VotingScheme, WeightFn
from .weights import WeightVector, fit_zipf, read_values, zipf_weights

log = logging.getLogger("wfpc")

DEFAULT_SPLITS = (0.1, 0.25, 0.5)


class UsageError(Exception):
    pass


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(args, name: str, text: str) -> None:
    """Write ``text`` to ``<out>/<name>`` (plus the config echo) or stdout."""
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    atomic_write(out / name, text)
    atomic_write(out / "config.json", echo_config(args))
    print(out / name)


def echo_config(args) -> str:
    skip = {"func", "config", "out", "verbose"}
    resolved = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return json.dumps(resolved, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- arguments


def _add_weights(p):
    p.add_argument("--zipf-s", type=float, default=1.0, help="Zipf exponent of the weights (default: %(default)s)")
    p.add_argument("--n", type=int, default=2, help="number of nodes (default: %(default)s)")
    p.add_argument("--weights-file", default=None, help="one weight per line; overrides --zipf-s/--n")
    p.add_argument("--f", default="id", help="sampling weight: const, id or pow:<alpha> (default: %(default)s)")
    p.add_argument("--g", default="const", help="opinion weight: const, id or pow:<alpha> (default: %(default)s)")
    p.add_argument("--k", type=int, default=20, help="quorum size (default: %(default)s)")
    p.add_argument(
        "--budget", type=int, default=scheme.DEFAULT_BUDGET, help="exact enumeration term budget (default: %(default)s)"
    )


def _add_experiment(p, n_default=100):
    p.add_argument("--n", type=int, default=n_default, help="number of identities N (default: %(default)s)")
    p.add_argument("--k", type=int, default=20, help="quorum size (default: %(default)s)")
    p.add_argument("--tau", type=float, default=0.66, help="first-round threshold (default: %(default)s)")
    p.add_argument("--beta", type=float, default=0.3, help="random thresholds on [beta, 1-beta] (default: %(default)s)")
    p.add_argument("--l", type=int, default=10, help="stable rounds before finalizing (default: %(default)s)")
    p.add_argument("--max-it", type=int, default=50, help="round cap (default: %(default)s)")
    p.add_argument("--q", type=float, default=0.25, help="adversarial weight fraction (default: %(default)s)")
    p.add_argument(
        "--strategy", choices=[CAUTIOUS, NONE], default=CAUTIOUS, help="adversary strategy (default: %(default)s)"
    )
    p.add_argument("--s", type=float, default=1.0, help="Zipf exponent of honest weights (default: %(default)s)")
    p.add_argument("--p0", type=float, default=0.66, help="initial mass fraction with opinion 1 (default: %(default)s)")
    p.add_argument("--f", default="id", help="sampling weight (default: %(default)s)")
    p.add_argument("--g", default="const", help="opinion weight (default: %(default)s)")
    p.add_argument("--reply-drop", type=float, default=0.0, help="per-query drop probability (default: %(default)s)")
    p.add_argument("--reps", type=int, default=300, help="repetitions per point (default: %(default)s)")
    p.add_argument("--workers", type=int, default=1, help="worker processes (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wfpc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed for all randomness (default: %(default)s)")
        p.add_argument("--out", default=None, help="output directory (default: stdout)")
        p.add_argument("--config", default=None, help="flat JSON file of flag defaults")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = sub.add_parser("power", help="voting power of each node")
    _add_weights(p)
    p.add_argument("--method", choices=["exact", "mc"], default="exact", help="(default: %(default)s)")
    p.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo samples (default: %(default)s)")
    common(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("fairness", help="power change when a node splits its weight")
    _add_weights(p)
    p.add_argument("--node", type=int, default=0, help="node index, 0 = heaviest (default: %(default)s)")
    p.add_argument(
        "--split-ratios", type=_floats, default=None, help="comma-separated ratios (default: 0.1,0.25,0.5)"
    )
    p.add_argument("--precision", choices=["float", "exact"], default="float", help="(default: %(default)s)")
    common(p)
    p.set_defaults(func=cmd_fairness)

    p = sub.add_parser("simulate", help="repeated runs of one configuration")
    _add_experiment(p)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="failure rate along one parameter axis")
    _add_experiment(p)
    p.add_argument("--axis", choices=list(sim.AXES), required=True)
    p.add_argument("--values", type=_floats, required=True, help="comma-separated axis values")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("complexity", help="expected (and optionally simulated) query load per rank")
    p.add_argument("--n", type=int, default=1000, help="number of nodes (default: %(default)s)")
    p.add_argument("--s", type=float, default=1.0, help="Zipf exponent (default: %(default)s)")
    p.add_argument("--k", type=int, default=20, help="quorum size (default: %(default)s)")
    p.add_argument("--rounds", type=int, default=0, help="simulate this many rounds of telemetry (default: off)")
    common(p)
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("fit-zipf", help="fit a Zipf exponent to a value file")
    p.add_argument("--input", required=True, help="one positive value per line")
    p.add_argument("--max-rank", type=int, default=None, help="fit only the top ranks")
    common(p)
    p.set_defaults(func=cmd_fit_zipf)
    return parser


# ---------------------------------------------------------------- commands


def _scheme(args) -> VotingScheme:
    try:
        return VotingScheme(WeightFn.parse(args.f), WeightFn.parse(args.g))
    except ValueError as e:
        raise UsageError(str(e)) from None


def _weights(args) -> WeightVector:
    if args.weights_file:
        return WeightVector(read_values(args.weights_file))
    return zipf_weights(args.zipf_s, args.n)


def cmd_power(args) -> None:
    w = _weights(args)
    try:
        report = scheme.voting_power(w, _scheme(args), args.k, args.method, args.samples, args.seed, args.budget)
    except EnumerationTooLargeError as e:
        raise UsageError(f"{e} (--method mc)") from None
    _emit(args, "power.csv", _csv(["rank", "weight", "voting_power", "std_err"], scheme.power_rows(w, report)))


def cmd_fairness(args) -> None:
    w = _weights(args)
    sch = _scheme(args)
    node = int(w.order[args.node])
    ratios = args.split_ratios or list(DEFAULT_SPLITS)
    whole = scheme.voting_power_exact(w, sch, args.k, budget=args.budget)[node]
    rows = []
    for x in ratios:
        gap = scheme.fairness_gap(w, sch, args.k, node, x, precision=args.precision, budget=args.budget)
        rows.append((float(x), float(whole), float(whole - gap), gap))
    _emit(args, "fairness.csv", _csv(["x", "v_original", "v_split_sum", "gap"], rows))


def _experiment(args) -> sim.ExperimentConfig:
    protocol = ProtocolConfig(
        N=args.n,
        k=args.k,
        tau=args.tau,
        beta=args.beta,
        l=args.l,
        max_it=args.max_it,
        scheme=_scheme(args),
        seed=args.seed,
        reply_drop=args.reply_drop,
    )
    return sim.ExperimentConfig(
        protocol=protocol,
        adversary=AdversaryConfig(args.q, args.strategy),
        p0=args.p0,
        s=args.s,
        repetitions=args.reps,
    )


def cmd_simulate(args) -> None:
    cfg = _experiment(args)
    res = sim.run_experiment(cfg, workers=args.workers)
    result_csv = sim.rows_to_csv([res.row("")])
    telemetry = complexity.telemetry_csv(res.query_telemetry())
    if args.out is None:
        sys.stdout.write(result_csv)
        return
    _emit(args, "result.csv", result_csv)
    atomic_write(Path(args.out) / "telemetry.csv", telemetry)


def cmd_sweep(args) -> None:
    cfg = _experiment(args)
    table = sim.sweep(cfg, args.axis, args.values, workers=args.workers)
    _emit(args, f"sweep_{args.axis}.csv", table.to_csv())


def cmd_complexity(args) -> None:
    profile = complexity.query_load_profile(args.n, args.s, args.k)
    if args.rounds > 0:
        cfg = sim.ExperimentConfig(
            protocol=ProtocolConfig(N=args.n, k=args.k, l=1, max_it=1, seed=args.seed),
            adversary=AdversaryConfig(0.0, NONE),
            s=args.s,
            repetitions=1,
        )
        observed = sim.measure_query_load(cfg, args.rounds, args.seed)
        text = complexity.telemetry_csv(complexity.compare_telemetry(profile, observed, args.rounds))
    else:
        text = complexity.telemetry_csv(profile)
    log.info(
        "load class %s, fair gossip threshold %d",
        complexity.asymptotic_class(args.s),
        complexity.fair_gossip_threshold(args.n, args.s),
    )
    _emit(args, "complexity.csv", text)


def cmd_fit_zipf(args) -> None:
    fit = fit_zipf(read_values(args.input), max_rank=args.max_rank)
    _emit(args, "fit.csv", _csv(["s", "C", "r_squared", "points"], [(fit.s, fit.C, fit.r_squared, fit.N)]))


# ---------------------------------------------------------------- entry


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    if not isinstance(data, dict) or any(isinstance(v, (dict, list)) for v in data.values()):
        raise UsageError(f"config {path} must be a flat JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        overrides = _load_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = set(overrides) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        subparser.set_defaults(**overrides)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        args.func(args)
    except UsageError as e:
        print(f"wfpc: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"wfpc: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
