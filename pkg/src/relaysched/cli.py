"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 invariant or verification
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import os
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, build_config, read_config_file
from .harness import (SlotRecord, Trajectory, audit_trajectory, dominance_from_costs,
                      exhaustive_theorem1_sweep, lemma2_exhaustive_sweep, run_costs, run_replications)
from .model import Control, SystemState, derive_flows, step
from .policies import REGISTRY

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_IO = 0, 1, 2, 3
OUTPUT_ENV = "RELAYSCHED_OUTPUT_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def trace_header(L: int, K: int) -> list[str]:
    return (["rep", "t"] + [f"x_{i}" for i in range(L + 1)] + [f"y_{j}" for j in range(K + 1)]
            + ["cs_bits", "cr_bits", "u1", "u2", "u3"] + [f"a_{i}" for i in range(1, L + 1)]
            + ["cost_x", "cost_y"])


def _bits(flags) -> str:
    return "".join("1" if c else "0" for c in flags)


def trace_rows(trajectories):
    for tr in trajectories:
        for rec in tr.records:
            s = rec.state
            yield [tr.replication, rec.t, *s.x, *s.y, _bits(s.cs), _bits(s.cr), *rec.control,
                   *rec.arrivals[1:], sum(s.x), sum(s.y)]


def write_trace(path, trajectories, L: int, K: int, stamp: bool = False) -> None:
    with open(path, "w", newline="") as fh:
        if stamp:
            fh.write(f"# generated {_dt.datetime.now(_dt.timezone.utc).isoformat()}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(trace_header(L, K))
        w.writerows(trace_rows(trajectories))


def read_trace(path) -> list[Trajectory]:
    """Rebuild recorded trajectories from a trace file.

    A replication without rows (horizon 0) leaves nothing to rebuild and is absent.
    """
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(rows)
    header = next(reader)
    L = sum(1 for h in header if h.startswith("x_")) - 1
    K = sum(1 for h in header if h.startswith("y_")) - 1
    by_rep: dict = {}
    for row in reader:
        vals = row
        rep, t = int(vals[0]), int(vals[1])
        k = 2
        x = tuple(int(v) for v in vals[k:k + L + 1]); k += L + 1
        y = tuple(int(v) for v in vals[k:k + K + 1]); k += K + 1
        cs = tuple(c == "1" for c in vals[k]); cr = tuple(c == "1" for c in vals[k + 1]); k += 2
        control = Control(*(int(v) for v in vals[k:k + 3])); k += 3
        arrivals = (0,) + tuple(int(v) for v in vals[k:k + L])
        state = SystemState(x, y, cs, cr)
        by_rep.setdefault(rep, []).append(SlotRecord(t, state, control, derive_flows(state, control), arrivals))
    out = []
    for rep, recs in sorted(by_rep.items()):
        final = step(recs[-1].state, recs[-1].control, recs[-1].arrivals)
        states = [r.state for r in recs] + [final]
        out.append(Trajectory(rep, SystemState(recs[0].state.x, recs[0].state.y), final,
                              [sum(s.x) for s in states], [sum(s.y) for s in states], recs))
    return out


def write_records(path, records, stamp: bool = False) -> None:
    with open(path, "w") as fh:
        if stamp:
            fh.write(json.dumps({"record": "header",
                                 "generated": _dt.datetime.now(_dt.timezone.utc).isoformat()}) + "\n")
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--L", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--policy", dest="policies", action="append", help="registry name, repeatable")
    p.add_argument("--checkpoint", dest="checkpoints", type=int, action="append")
    p.add_argument("--initial-x", dest="initial_x", type=int, nargs="+")
    p.add_argument("--initial-y", dest="initial_y", type=int, nargs="+")
    p.add_argument("--alpha", type=float)
    p.add_argument("--format", choices=["csv", "jsonl"])
    p.add_argument("--output", help="output directory (default: $%s or .)" % OUTPUT_ENV)
    p.add_argument("--reproducible", action="store_true", help="omit the timestamp header")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relaysched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="write per-slot traces for each policy")
    _add_experiment_flags(sim)
    dom = sub.add_parser("dominance", help="test the first policy against every other one")
    _add_experiment_flags(dom)
    ver = sub.add_parser("verify", help="exhaustive interchange and LCQ/SQ/LCQ sweeps")
    ver.add_argument("--dim-max", type=int, default=5)
    ver.add_argument("--vector-entry-max", type=int, default=6)
    ver.add_argument("--L-max", type=int, default=3)
    ver.add_argument("--K-max", type=int, default=3)
    ver.add_argument("--entry-max", type=int, default=3)
    ver.add_argument("--output", help="output directory (default: $%s or .)" % OUTPUT_ENV)
    ver.add_argument("--reproducible", action="store_true")
    sub.add_parser("list-policies", help="print the policy registry")
    return parser


def config_from_args(args) -> ExperimentConfig:
    file_values = read_config_file(args.config) if args.config else {}
    keys = ("L", "K", "p", "q", "horizon", "replications", "seed", "policies", "checkpoints",
            "initial_x", "initial_y", "alpha", "format")
    return build_config(file_values, {k: getattr(args, k) for k in keys})


def _outdir(args) -> Path:
    out = Path(args.output or os.environ.get(OUTPUT_ENV) or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = config_from_args(args)
    out = _outdir(args)
    status = EXIT_OK
    for name in cfg.policies:
        trajs = run_replications(cfg, name)
        problems = [p for tr in trajs for p in audit_trajectory(tr)]
        path = out / f"trace_{name}.{cfg.format}"
        if cfg.format == "csv":
            write_trace(path, trajs, cfg.L, cfg.K, stamp=not args.reproducible)
        else:
            cols = trace_header(cfg.L, cfg.K)
            rows = ({"record": "slot", **dict(zip(cols, r))} for r in trace_rows(trajs))
            write_records(path, rows, stamp=not args.reproducible)
        mean_x = sum(tr.cost_x[-1] for tr in trajs) / len(trajs)
        mean_y = sum(tr.cost_y[-1] for tr in trajs) / len(trajs)
        print(f"{name}: {len(trajs)} replications x {cfg.horizon} slots -> {path}; "
              f"final mean SS {mean_x:.3f}, RS {mean_y:.3f}; {len(problems)} invariant violations")
        if problems:
            status = EXIT_FAILED
    return status


def cmd_dominance(args) -> int:
    cfg = config_from_args(args)
    if len(cfg.policies) < 2:
        raise ConfigError("dominance needs at least two --policy values (reference first)")
    if cfg.replications < 1000:
        raise ConfigError(f"dominance needs >= 1000 replications (got {cfg.replications})")
    out = _outdir(args)
    checkpoints = cfg.effective_checkpoints()
    ref = cfg.policies[0]
    ref_costs = run_costs(cfg, ref)
    records, total = [], 0
    for other in cfg.policies[1:]:
        rep = dominance_from_costs(ref_costs, run_costs(cfg, other), checkpoints, cfg.alpha, (ref, other))
        records += rep.records()
        total += len(rep.violations)
        print(f"{ref} vs {other}: {len(rep.violations)} violations (eps={rep.epsilon:.4f}, n={rep.replications})")
    path = out / "dominance.jsonl"
    write_records(path, records, stamp=not args.reproducible)
    print(f"report -> {path}")
    return EXIT_FAILED if total else EXIT_OK


def cmd_verify(args) -> int:
    out = _outdir(args)
    lem = lemma2_exhaustive_sweep(args.dim_max, args.vector_entry_max)
    thm = exhaustive_theorem1_sweep(args.L_max, args.K_max, args.entry_max)
    write_records(out / "lemma2.jsonl", lem.records(), stamp=not args.reproducible)
    write_records(out / "theorem1.jsonl", thm.records(), stamp=not args.reproducible)
    print(f"lemma2: {lem.cases} cases, {lem.mismatches} mismatches; "
          f"theorem1: {thm.states} states, {thm.membership_failures} membership failures, "
          f"{thm.empty_intersections} empty intersections")
    return EXIT_FAILED if lem.mismatches or thm.membership_failures else EXIT_OK


def cmd_list_policies(args) -> int:
    for name, cls in REGISTRY.items():
        doc = (cls.__doc__ or "").strip().splitlines()
        print(f"{name}\t{cls.__name__}\t{doc[0] if doc else ''}")
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "dominance": cmd_dominance, "verify": cmd_verify,
            "list-policies": cmd_list_policies}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
