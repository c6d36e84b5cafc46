"""Command-line front end.

Subcommands
-----------
run       run an experiment config (JSON) and write metrics CSV + summary
verify    lockstep check of a collapsed learner against the explicit
          mixture; exits 2 when any per-step gap exceeds the tolerance
gen       write a synthetic stream to CSV
snapshot  run a tree learner partway through a stream and save a resumable
          state file
restore   resume from a snapshot and continue, writing continuation metrics

Exit codes: 0 success, 1 configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import datagen, harness
from .adaptive_tree import AdaptiveTreeRegressor
from .fixed_tree import FixedTreeRegressor

SNAPSHOT_SCHEMA = 1


def _fail(message: str, code: int = 1) -> int:
    print(f"pwltree: {message}", file=sys.stderr)
    return code


def _cmd_run(args) -> int:
    try:
        config = harness.ExperimentConfig.from_file(args.config)
        result = harness.run_experiment(config)
    except (harness.ConfigError, harness.TrialDiverged) as exc:
        return _fail(str(exc))
    prefix = args.out or config.output or Path(args.config).stem
    metrics_path = f"{prefix}_metrics.csv"
    summary_path = f"{prefix}_summary.json"
    harness.write_metrics_csv(result, metrics_path)
    harness.write_summary_json(result, summary_path)
    for name, metrics in result.metrics.items():
        print(f"{name}: final normalized error {metrics.final_norm_err:.6g} "
              f"over {len(metrics)} steps ({metrics.trials} trials)")
    for failure in result.failures:
        print(f"warning: {failure}", file=sys.stderr)
    print(f"wrote {metrics_path} and {summary_path}")
    return 0


def _cmd_verify(args) -> int:
    try:
        gap = harness.verify_equivalence(args.mode, args.depth, args.steps, args.seed)
    except (harness.ConfigError, ValueError) as exc:
        return _fail(str(exc))
    print(f"max per-step relative gap over {args.steps} steps (depth {args.depth}, "
          f"{args.mode}): {gap:.3e}")
    if gap > args.tol:
        return _fail(f"gap {gap:.3e} exceeds tolerance {args.tol:.1e}", code=2)
    return 0


def _cmd_gen(args) -> int:
    params = {}
    if args.noise_var is not None:
        params["noise_var"] = args.noise_var
    try:
        stream = datagen.generate(args.kind, args.n, seed=args.seed, **params)
    except (TypeError, ValueError) as exc:
        return _fail(str(exc))
    datagen.stream_to_csv(stream, args.out)
    print(f"wrote {len(stream)} rows to {args.out}")
    return 0


def _build_tree_learner(spec: dict):
    params = dict(spec)
    kind = params.pop("kind")
    if kind == "dft":
        return FixedTreeRegressor(**params)
    if kind == "dat":
        return AdaptiveTreeRegressor(**params)
    raise harness.ConfigError(f"snapshots support tree learners only, not {kind!r}")


def _write_segment_metrics(path, name, offset, e2) -> None:
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["t", "learner", "e2", "cum_e2", "norm_err"])
        cum = np.cumsum(e2)
        for k in range(len(e2)):
            t = offset + k + 1
            writer.writerow([t, name, repr(float(e2[k])), repr(float(cum[k])),
                             repr(float(cum[k] / (k + 1)))])


def _run_segment(learner, stream, start, steps):
    x_ext = stream.extended
    stop = start + steps
    if stop > len(stream):
        raise harness.ConfigError(f"stream has {len(stream)} steps; cannot run to {stop}")
    e2 = np.empty(steps)
    for k, t in enumerate(range(start, stop)):
        y, e = learner.step(x_ext[t], stream.targets[t])
        e2[k] = e * e
    return e2


def _cmd_snapshot(args) -> int:
    spec = {"kind": args.mode, "depth": args.depth, "mu": args.mu}
    if args.mode == "dat":
        spec["s_plus"] = args.s_plus
    stream_spec = {"kind": args.stream, "n": args.n}
    try:
        stream = harness.build_stream(stream_spec, args.seed)
        learner = _build_tree_learner({**spec, "dim": stream.dim})
        e2 = _run_segment(learner, stream, 0, args.steps)
    except (harness.ConfigError, ValueError) as exc:
        return _fail(str(exc))
    snapshot = {
        "schema": SNAPSHOT_SCHEMA,
        "learner": spec,
        "state": learner.state_snapshot(),
        "t": learner.t,
        "stream": stream_spec,
        "seed": args.seed,
        "position": args.steps,
    }
    with open(args.out, "w") as fh:
        json.dump(snapshot, fh, indent=2)
        fh.write("\n")
    if args.metrics:
        _write_segment_metrics(args.metrics, args.mode, 0, e2)
    print(f"snapshot after {args.steps} steps written to {args.out}")
    return 0


def _cmd_restore(args) -> int:
    try:
        with open(args.snapshot) as fh:
            snapshot = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read snapshot: {exc}")
    if snapshot.get("schema") != SNAPSHOT_SCHEMA:
        return _fail(f"unsupported snapshot schema {snapshot.get('schema')!r}")
    try:
        stream = harness.build_stream(snapshot["stream"], snapshot["seed"])
        learner = _build_tree_learner({**snapshot["learner"], "dim": stream.dim})
        learner.load_state(snapshot["state"])
        learner.t = snapshot["t"]
        e2 = _run_segment(learner, stream, snapshot["position"], args.steps)
    except (harness.ConfigError, ValueError, KeyError) as exc:
        return _fail(f"malformed snapshot: {exc}")
    if args.metrics:
        _write_segment_metrics(args.metrics, snapshot["learner"]["kind"],
                               snapshot["position"], e2)
    if args.state_out:
        with open(args.state_out, "w") as fh:
            json.dump(learner.state_snapshot(), fh, indent=2)
            fh.write("\n")
    print(f"continued {args.steps} steps from position {snapshot['position']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pwltree",
                                     description="tree-partition mixture regressors")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", help="JSON experiment config")
    p_run.add_argument("--out", help="output prefix (default: config stem)")
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="check collapsed vs explicit mixture")
    p_verify.add_argument("--depth", type=int, required=True)
    p_verify.add_argument("--steps", type=int, required=True)
    p_verify.add_argument("--mode", choices=("dft", "dat"), required=True)
    p_verify.add_argument("--seed", type=int, default=harness.default_seed())
    p_verify.add_argument("--tol", type=float, default=1e-9)
    p_verify.set_defaults(func=_cmd_verify)

    p_gen = sub.add_parser("gen", help="write a synthetic stream to CSV")
    p_gen.add_argument("kind", choices=sorted(datagen.GENERATORS))
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--seed", type=int, default=harness.default_seed())
    p_gen.add_argument("--noise-var", type=float, default=None)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen)

    p_snap = sub.add_parser("snapshot", help="run partway and save resumable state")
    p_snap.add_argument("--mode", choices=("dft", "dat"), required=True)
    p_snap.add_argument("--depth", type=int, default=2)
    p_snap.add_argument("--mu", type=float, default=0.005)
    p_snap.add_argument("--s-plus", type=float, default=0.01)
    p_snap.add_argument("--stream", choices=sorted(datagen.GENERATORS), default="matched")
    p_snap.add_argument("--n", type=int, required=True, help="total stream length")
    p_snap.add_argument("--steps", type=int, required=True, help="steps to run before saving")
    p_snap.add_argument("--seed", type=int, default=harness.default_seed())
    p_snap.add_argument("--out", required=True, help="snapshot JSON path")
    p_snap.add_argument("--metrics", help="optional CSV of the pre-snapshot segment")
    p_snap.set_defaults(func=_cmd_snapshot)

    p_restore = sub.add_parser("restore", help="resume from a snapshot")
    p_restore.add_argument("--snapshot", required=True)
    p_restore.add_argument("--steps", type=int, required=True)
    p_restore.add_argument("--metrics", help="CSV of the continuation segment")
    p_restore.add_argument("--state-out", help="optional final state JSON")
    p_restore.set_defaults(func=_cmd_restore)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
