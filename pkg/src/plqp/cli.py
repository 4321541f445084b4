"""Batch command-line front end.

Commands read grid CSV files and JSON configs, and write JSON reports (and
grid/ledger artifacts under an output directory).  Output is deterministic:
identical inputs, config, and seed produce byte-identical JSON.  Seeds only
affect candidate generation order in heuristic searches; the exact solvers
ignore them.

Exit codes: 0 success, 2 malformed input, 3 solver infeasibility.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import shutil
import sys
from pathlib import Path

import numpy as np

from . import gridio
from .bottleneck import winf, winf_permutation_oracle
from .dynamics import bb_verify, continuity_residual, reconstruct_velocity
from .errors import InfeasibleError, InputError
from .functionals import isop
from .measures import (
    DiscreteMeasure,
    GridSpec,
    dilate_curve,
    make_multiball,
    make_ramp_ball,
    translate_curve,
)
from .mms import (
    GridSearchFamily,
    RadialFamily,
    ResolventProblem,
    StepPartition,
    run_scheme,
    solution_ledger,
)
from .plmetric import PLMetricParams, dqp
from .transport import monotone_1d, wq, wq_permutation_oracle


def _parse_exponent(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _dump_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(directory: Path) -> None:
    files = sorted(p for p in directory.rglob("*") if p.is_file() and p.name != "manifest.json")
    manifest = {
        "files": [
            {"path": str(p.relative_to(directory)), "sha256": _sha256(p)} for p in files
        ]
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_grid(path: str):
    return gridio.read_grid(path)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_dist(args) -> dict:
    a = _load_grid(args.grid_a)
    b = _load_grid(args.grid_b)
    q = _parse_exponent(args.q)
    p = _parse_exponent(args.p)
    val = dqp(a, b, PLMetricParams(q, p))
    return {
        "q": "inf" if math.isinf(q) else q,
        "p": "inf" if math.isinf(p) else p,
        "total": val.total,
        "transport_part": val.w_part,
        "lp_part": val.lp_part,
        "quantization_bound": val.quantization_bound,
    }


def cmd_isop(args) -> dict:
    g = _load_grid(args.grid)
    v = isop(g)
    return {
        "value": v.value,
        "numerator_tv": v.numerator,
        "denominator_norm": v.denominator,
        "exponents": list(v.exponents),
        "grid_h": g.spec.h,
        "tolerance_note": "first-order grid quantity; compare at <= 5% against closed forms",
    }


def _anchor_from_config(cfg: dict):
    if "grid_file" in cfg:
        return _load_grid(cfg["grid_file"])
    grid = cfg["grid"]
    n = int(grid["n"])
    extent = float(grid["extent"])
    h = extent / n
    spec = GridSpec(2, (n, n), h, (-extent / 2 + h / 2, -extent / 2 + h / 2))
    guard = float(cfg.get("guard", 1e-3))
    if cfg["kind"] == "ramp_ball":
        return make_ramp_ball(spec, tuple(cfg["center"]), cfg["R"], cfg["w"], guard=guard)
    if cfg["kind"] == "multiball":
        return make_multiball(
            spec,
            [tuple(c) for c in cfg["centers"]],
            cfg["radii"],
            cfg["weights"],
            cfg["w"],
            guard=guard,
        )
    raise InputError(f"unknown anchor kind {cfg.get('kind')!r}")


def cmd_mms(args) -> dict:
    cfg = json.loads(Path(args.config).read_text()) if Path(args.config).exists() else None
    if cfg is None:
        raise InputError(f"config file not found: {args.config}")
    # flag overrides for the config fields
    if args.tau is not None:
        cfg["tau"] = args.tau
        cfg.pop("taus", None)
    if args.steps is not None:
        cfg["steps"] = args.steps
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.family is not None:
        cfg.setdefault("family", {})["kind"] = args.family
    anchor = _anchor_from_config(cfg["anchor"])
    fam_cfg = cfg["family"]
    if fam_cfg["kind"] == "radial":
        family = RadialFamily.from_anchor(
            anchor,
            [tuple(c) for c in fam_cfg["centers"]],
            fam_cfg["outer_radii"],
            rings=int(fam_cfg.get("rings", 8)),
            levels=int(fam_cfg.get("levels", 32)),
        )
    elif fam_cfg["kind"] == "grid":
        family = GridSearchFamily(
            quantum=float(fam_cfg.get("quantum", 1e-3)),
            budget=int(fam_cfg.get("budget", 200)),
            coarse_bins=int(fam_cfg.get("coarse_bins", 12)),
        )
    else:
        raise InputError(f"unknown family kind {fam_cfg.get('kind')!r}")
    if "taus" in cfg:
        partition = StepPartition(tuple(float(t) for t in cfg["taus"]))
    else:
        partition = StepPartition.uniform(float(cfg["tau"]), int(cfg["steps"]))
    prob = ResolventProblem(cfg.get("phi", "isop"), partition.steps[0], anchor, family)
    sol = run_scheme(anchor, partition, prob, cross_check_every=int(cfg.get("cross_check_every", 0)))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ledger = solution_ledger(sol)
    ledger["seed"] = int(cfg.get("seed", 0))
    (out_dir / "ledger.json").write_text(json.dumps(ledger, indent=2, sort_keys=True) + "\n")
    for k, state in enumerate(sol.states):
        gridio.write_grid(state, out_dir / f"state_{k:04d}.csv")
    _write_manifest(out_dir)
    return {"out": str(out_dir), "steps": len(partition.steps), "phi_final": sol.phi_values[-1]}


def cmd_bb(args) -> dict:
    a = _load_grid(args.grid_a)
    b = _load_grid(args.grid_b)
    rep = bb_verify(a, b, steps=args.steps)
    payload = {
        "winf": rep.winf_value,
        "winf_quantization_bound": rep.quantization_bound,
        "achieved_norm": rep.achieved_norm,
        "steps": rep.steps,
        "lower_tolerance": rep.lower_tol,
        "lower_bound_ok": bool(rep.lower_ok),
        "gap": rep.gap,
        "gap_tolerance_note": "gap is a grid quantity, O(h) for rigid pairs",
    }
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "bb_report.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
        _write_manifest(out_dir)
    return payload


def cmd_curve(args) -> dict:
    g = _load_grid(args.grid)
    times = [float(t) for t in args.times.split(",")]
    if args.kind == "translate":
        V = tuple(float(x) for x in args.param.split(","))
        traj = translate_curve(g, V, times)
    elif args.kind == "dilate":
        traj = dilate_curve(g, float(args.param), times)
    else:
        raise InputError(f"unknown curve kind {args.kind!r}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    gridio.save_trajectory(traj, out_dir, stem="curve")
    rep = continuity_residual(traj)
    payload = {
        "kind": args.kind,
        "times": times,
        "residual_max": rep.max_defect,
        "residual_l1": rep.l1_defect,
        "panel_version": rep.panel_version,
    }
    (out_dir / "residuals.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_manifest(out_dir)
    return payload


def cmd_reconstruct(args) -> dict:
    traj = gridio.load_trajectory(args.manifest)
    rec = reconstruct_velocity(traj, norm=args.norm)
    return {
        "norm": args.norm,
        "interval_sup_norms": list(rec.sup_norms),
        "interval_face_norms": list(rec.face_norms),
        "residuals": list(rec.residuals),
        "tolerance_note": "face norms bound |m|/f on faces with f >= 1e-9",
    }


def cmd_oracle(args) -> dict:
    # three independently seeded cross-check loops
    worst_winf = 0.0
    worst_wq = 0.0
    worst_1d = 0.0
    rng = np.random.default_rng(args.seed)
    for _ in range(args.instances):
        m = int(rng.integers(2, 7))
        a = DiscreteMeasure(rng.uniform(0, 10, (m, 2)), np.full(m, 1.0 / m))
        b = DiscreteMeasure(rng.uniform(0, 10, (m, 2)), np.full(m, 1.0 / m))
        worst_winf = max(worst_winf, abs(winf(a, b).value - winf_permutation_oracle(a, b)))
    rng = np.random.default_rng(args.seed + 1)
    q = 2.0
    for _ in range(args.instances):
        m = int(rng.integers(2, 7))
        a = DiscreteMeasure(rng.uniform(0, 10, (m, 2)), np.full(m, 1.0 / m))
        b = DiscreteMeasure(rng.uniform(0, 10, (m, 2)), np.full(m, 1.0 / m))
        worst_wq = max(worst_wq, abs(wq(a, b, q).cost - wq_permutation_oracle(a, b, q)))
    rng = np.random.default_rng(args.seed + 2)
    for _ in range(args.instances):
        m = int(rng.integers(2, 9))
        k = int(rng.integers(2, 9))
        a = DiscreteMeasure(rng.uniform(0, 10, (m, 1)), rng.dirichlet(np.ones(m)))
        b = DiscreteMeasure(rng.uniform(0, 10, (k, 1)), rng.dirichlet(np.ones(k)))
        worst_1d = max(worst_1d, abs(wq(a, b, 1.5).cost - monotone_1d(a, b, 1.5)))
    return {
        "instances": args.instances,
        "seed": args.seed,
        "winf_vs_permutation_max_abs": worst_winf,
        "wq_vs_permutation_max_abs": worst_wq,
        "wq_vs_monotone1d_max_abs": worst_1d,
        "tolerance": 1e-9,
        "pass": bool(max(worst_winf, worst_wq, worst_1d) <= 1e-9),
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="plqp", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dist", help="composite distance between two grid files")
    d.add_argument("grid_a")
    d.add_argument("grid_b")
    d.add_argument("--q", default="inf")
    d.add_argument("--p", default="inf")
    d.add_argument("--out")
    d.set_defaults(func=cmd_dist)

    i = sub.add_parser("isop", help="isoperimetric ratio of a grid file")
    i.add_argument("grid")
    i.add_argument("--out")
    i.set_defaults(func=cmd_isop)

    m = sub.add_parser("mms", help="run the minimizing-movement scheme")
    m.add_argument("--config", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--tau", type=float, help="override the config step size")
    m.add_argument("--steps", type=int, help="override the config step count")
    m.add_argument("--family", choices=["radial", "grid"], help="override the family kind")
    m.add_argument("--seed", type=int, help="override the config seed")
    m.set_defaults(func=cmd_mms)

    b = sub.add_parser("bb", help="one-step dynamic verification of the bottleneck distance")
    b.add_argument("grid_a")
    b.add_argument("grid_b")
    b.add_argument("--steps", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bb)

    c = sub.add_parser("curve", help="emit a generated curve and its residual report")
    c.add_argument("--kind", required=True, choices=["translate", "dilate"])
    c.add_argument("--grid", required=True)
    c.add_argument("--param", required=True, help="vx,vy for translate; M for dilate")
    c.add_argument("--times", required=True, help="comma-separated times")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_curve)

    r = sub.add_parser("reconstruct", help="minimal-norm velocity from a trajectory manifest")
    r.add_argument("--manifest", required=True)
    r.add_argument("--norm", default="linf", choices=["linf", "l2"])
    r.add_argument("--out")
    r.set_defaults(func=cmd_reconstruct)

    o = sub.add_parser("oracle", help="brute-force cross-checks of the exact solvers")
    o.add_argument("--instances", type=int, default=50)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)
    return ap


# commands whose --out is an artifact directory, not a JSON file target
DIR_COMMANDS = {"mms", "curve", "bb"}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    out_dir = getattr(args, "out", None) if args.command in DIR_COMMANDS else None
    try:
        payload = args.func(args)
    except (InputError, FileNotFoundError, json.JSONDecodeError, KeyError) as exc:
        if out_dir and Path(out_dir).exists():
            shutil.rmtree(out_dir, ignore_errors=True)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        if out_dir and Path(out_dir).exists():
            shutil.rmtree(out_dir, ignore_errors=True)
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    _dump_json(payload, None if args.command in DIR_COMMANDS else getattr(args, "out", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
