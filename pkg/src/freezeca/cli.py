"""Command-line entry point ``freezeca``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, blockcode, classifier, engine, io, percolation, rng, tmca, twophase
from .errors import BudgetExceeded, FreezeCAError, ObstacleVerificationFailed
from .rules import NeighborFamily, RuleKernel, canonicalize_family, rule_from_family

EXIT_OK, EXIT_INPUT, EXIT_BUILD = 0, 2, 3

# flags that do not change results and stay out of the recorded config
_UNRECORDED = {"threads", "config", "func"}


class InputError(Exception):
    pass


class BuildError(Exception):
    pass


def _von_neumann_pairs() -> NeighborFamily:
    vn = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    return canonicalize_family({a, b} for i, a in enumerate(vn) for b in vn[i + 1 :])


NAMED_FAMILIES = {
    "h": lambda: canonicalize_family([{(0, 1), (1, 1)}]),
    "bp2": _von_neumann_pairs,
}
TWOPHASE = {"twophase-f": twophase.f_kernel, "twophase-g": twophase.g_kernel,
            "twophase-h": twophase.h_kernel}


def _params(args) -> twophase.TwoPhaseParams:
    try:
        return twophase.TwoPhaseParams(args.n_block, Fraction(args.eps1), Fraction(args.eps2),
                                       Fraction(args.delta))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"two-phase parameters: {exc}") from exc


def resolve_rule(args) -> RuleKernel:
    if args.family:
        try:
            return rule_from_family(io.load_family(args.family), name=Path(args.family).stem)
        except (OSError, KeyError, TypeError, json.JSONDecodeError, ValueError) as exc:
            raise InputError(f"cannot read family {args.family}: {exc}") from exc
    if args.rule in NAMED_FAMILIES:
        return rule_from_family(NAMED_FAMILIES[args.rule](), name=args.rule)
    if args.rule in TWOPHASE:
        return TWOPHASE[args.rule](_params(args))
    raise InputError(f"unknown rule {args.rule!r}; choose from "
                     f"{sorted(NAMED_FAMILIES) + sorted(TWOPHASE)} or pass --family")


def resolved_config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in _UNRECORDED}
    return {"version": __version__, "config": cfg}


def emit_json(args, payload: dict, default_name: str | None = None) -> None:
    payload = {**payload, **resolved_config(args)}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        out = Path(args.out)
        if out.is_dir() and default_name:
            out = out / default_name
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    else:
        sys.stdout.write(text)


# -- commands ------------------------------------------------------------------


def cmd_classify(args) -> int:
    try:
        e = io.load_family(args.family_file)
    except (OSError, KeyError, TypeError, json.JSONDecodeError, ValueError) as exc:
        raise InputError(f"cannot read family {args.family_file}: {exc}") from exc
    try:
        res = classifier.classify(e, with_obstacle=not args.no_obstacle)
    except ObstacleVerificationFailed as exc:
        raise BuildError(str(exc)) from exc
    emit_json(args, {"family": e.to_json(), **res.to_json()})
    return EXIT_OK


def _initial(args, k: RuleKernel) -> engine.Window:
    boundary = engine.Boundary(args.boundary)
    if args.init:
        try:
            cells = io.load_cells(args.init)
        except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read initial configuration {args.init}: {exc}") from exc
        return engine.Window(cells, boundary)
    p = Fraction(args.p)
    if not 0 <= p <= 1:
        raise InputError(f"p={args.p} is not a probability")
    u = rng.uniforms(args.seed, [0], args.width, args.height)[0]
    return engine.Window(percolation.threshold(u, p), boundary)


def _write_frame(args, out: Path, t: int, cells: np.ndarray) -> str:
    fmt = "pbm" if args.format in (None, "pbm", "csv") else "json"
    name = f"step_{t:06d}.{fmt}"
    if fmt == "pbm":
        io.write_pbm(out / name, cells, binary=args.pbm_binary)
    else:
        (out / name).write_text(json.dumps(io.grid_to_json(cells)) + "\n")
    return name


def cmd_simulate(args) -> int:
    k = resolve_rule(args)
    w = _initial(args, k)
    out = Path(args.out) if args.out else None
    frames = []
    if out:
        out.mkdir(parents=True, exist_ok=True)
        frames.append(_write_frame(args, out, 0, w.cells))
    changes, fixed = [], False
    t = 0
    while t < args.horizon:
        nxt = engine.step(w, k)
        n = int((nxt.cells != w.cells).sum())
        if n == 0:
            fixed = True
            break
        w, t = nxt, t + 1
        changes.append(n)
        if out and args.snapshot_every and t % args.snapshot_every == 0:
            frames.append(_write_frame(args, out, t, w.cells))
    if not fixed:
        fixed = bool((engine.step(w, k).cells == w.cells).all())
    if out and t > 0 and (not args.snapshot_every or t % args.snapshot_every):
        frames.append(_write_frame(args, out, t, w.cells))
    warnings = []
    if w.boundary is not engine.Boundary.PERIODIC and w.exact_margin > 0:
        warnings.append(f"cells within {w.exact_margin} of the border are not exact")
    report = {
        "rule": k.name,
        "steps_taken": t,
        "fixed": fixed,
        "changed_cells_per_step": changes,
        "final_ones": int(w.cells.sum()),
        "cells": int(w.cells.size),
        "frames": frames,
        "warnings": warnings,
    }
    payload = {**report, **resolved_config(args)}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        (out / "report.json").write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _p_grid(args) -> list[float]:
    try:
        grid = [float(Fraction(s)) for s in args.p_grid.split(",") if s.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad --p-grid: {exc}") from exc
    if not grid or any(not 0 <= p <= 1 for p in grid):
        raise InputError("--p-grid needs densities in [0, 1]")
    return grid


def cmd_scan(args) -> int:
    k = resolve_rule(args)
    grid = _p_grid(args)
    res = percolation.fixation_scan(k, grid, args.width, args.height, args.horizon, args.trials,
                                    seed=args.seed, threads=args.threads, batch=args.batch)
    meta = dict(res.metadata)
    if args.rule in TWOPHASE and not args.family:
        meta["params"] = _params(args).to_json()
        meta["label"] = "exploratory, non-gating: desk-scale blocks cannot show the limiting behavior"
    meta.update(resolved_config(args))
    csv = res.to_csv()
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(csv)
        out.with_suffix(out.suffix + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    elif args.format == "json":
        sys.stdout.write(json.dumps({"rows": [r.__dict__ for r in res.rows], **meta}, indent=2,
                                    sort_keys=True) + "\n")
    else:
        sys.stdout.write(csv)
    if args.plot:
        from .plotting import plot_scan

        plot_scan(res, args.plot, title=f"{k.name}, {args.width}x{args.height}, horizon {args.horizon}")
    return EXIT_OK


def _load_tm(path) -> tmca.TMSpec:
    try:
        return tmca.TMSpec.load(path)
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read Turing machine {path}: {exc}") from exc


def cmd_tmca(args) -> int:
    tm = _load_tm(args.tm_file)
    if args.action == "build":
        ct = tmca.compile_tm(tm)
        code = blockcode.BlockCode.for_alphabet(ct.alphabet.size, ct.alphabet.m)
        emit_json(args, {"alphabet": ct.summary(), "block_side": code.n,
                         "normalized_machine": ct.tm.to_json()}, "build.json")
        return EXIT_OK
    try:
        ct, pattern = tmca.halting_obstacle(tm, args.budget, seed=args.seed)
    except BudgetExceeded as exc:
        raise BuildError(str(exc)) from exc
    except RuntimeError as exc:
        raise BuildError(str(exc)) from exc
    if args.action == "obstacle":
        emit_json(args, {"pattern": tmca.pattern_to_json(ct, pattern),
                         "height": int(pattern.shape[0]), "width": int(pattern.shape[1])},
                  "obstacle.json")
        return EXIT_OK
    fixed = tmca.verify_fixed(ct, pattern, steps=args.steps, contexts=args.contexts, seed=args.seed)
    code = blockcode.BlockCode.for_alphabet(ct.alphabet.size, ct.alphabet.m)
    gt = blockcode.gt_kernel(code, ct)
    g = np.random.default_rng(args.seed)
    commute = 0
    for _ in range(args.contexts):
        x = g.integers(0, ct.alphabet.size, size=(pattern.shape[0] + 4, pattern.shape[1] + 4), dtype=np.uint8)
        x[2:-2, 2:-2] = pattern
        a = blockcode.encode_array(code, ct.kernel.apply_valid(x))
        b = gt.apply_valid(blockcode.encode_array(code, x))
        off = gt.radius - code.n
        commute += np.array_equal(a[off : a.shape[0] - off, off : a.shape[1] - off], b)
    ok = fixed and commute == args.contexts
    emit_json(args, {"obstacle_fixed": fixed, "block_side": code.n,
                     "commutation_passed": commute, "commutation_trials": args.contexts,
                     "passed": ok}, "verify.json")
    return EXIT_OK if ok else EXIT_BUILD


# -- parser --------------------------------------------------------------------


def _rule_flags(p):
    p.add_argument("--rule", default="h", help="h, bp2, twophase-f, twophase-g or twophase-h")
    p.add_argument("--family", help="neighbor family JSON file; overrides --rule")
    p.add_argument("--n-block", type=int, default=4, help="block side for two-phase rules")
    p.add_argument("--eps1", default="1/4")
    p.add_argument("--eps2", default="1/2")
    p.add_argument("--delta", default="1/8")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads; never changes results")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--format", choices=["json", "csv", "pbm"], help="output format")
    common.add_argument("--config", help="JSON file of option defaults; flags take precedence")

    parser = argparse.ArgumentParser(prog="freezeca", description=__doc__)
    parser.add_argument("--version", action="version", version=f"freezeca {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("classify", parents=[common], help="classify a monotone rule from its neighbor family")
    p.add_argument("family_file")
    p.add_argument("--no-obstacle", action="store_true", help="skip building the obstacle witness")
    p.set_defaults(func=cmd_classify)
    subs["classify"] = p

    p = sub.add_parser("simulate", parents=[common], help="run a rule and write snapshots")
    _rule_flags(p)
    p.add_argument("--p", default="0.5", help="Bernoulli density of the initial configuration")
    p.add_argument("--init", help="initial configuration (PBM or JSON grid)")
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=128)
    p.add_argument("--horizon", type=int, default=256)
    p.add_argument("--boundary", choices=[b.value for b in engine.Boundary], default="periodic")
    p.add_argument("--snapshot-every", type=int, default=0, help="also write every k-th step")
    p.add_argument("--pbm-binary", action="store_true", help="write P4 instead of P1")
    p.set_defaults(func=cmd_simulate)
    subs["simulate"] = p

    p = sub.add_parser("scan", parents=[common], help="fixation frequency over a density grid")
    _rule_flags(p)
    p.add_argument("--p-grid", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=128)
    p.add_argument("--horizon", type=int, default=256)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--batch", type=int, default=50, help="trials per work item")
    p.add_argument("--plot", help="also render the curve to this PNG")
    p.set_defaults(func=cmd_scan)
    subs["scan"] = p

    p = sub.add_parser("tmca", parents=[common], help="Turing machine reduction")
    p.add_argument("action", choices=["build", "obstacle", "verify"])
    p.add_argument("tm_file")
    p.add_argument("--budget", type=int, default=10_000, help="step budget for the direct run")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--contexts", type=int, default=20)
    p.set_defaults(func=cmd_tmca)
    subs["tmca"] = p
    return parser, subs


def parse(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise InputError("config must be a JSON object")
        known = {a.dest for a in subs[args.command]._actions}
        unknown = set(cfg) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        subs[args.command].set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse(argv)
        return args.func(args)
    except InputError as exc:
        print(f"freezeca: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BuildError as exc:
        print(f"freezeca: construction failed: {exc}", file=sys.stderr)
        return EXIT_BUILD
    except FreezeCAError as exc:
        print(f"freezeca: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
