"""Command-line interface: one executable, one subcommand per task."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import tempfile
from pathlib import Path

# The thread cap must land in the environment before the numeric stack
# loads, which is why this module touches os.environ at import time and
# the package __init__ imports nothing heavy.
_threads = os.environ.get("EQUILIRES_THREADS", "").strip()
if _threads and _threads != "0":
    if not _threads.isdigit():
        print(f"ignoring non-integer EQUILIRES_THREADS={_threads!r}", file=sys.stderr)
    else:
        for _var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(_var, _threads)

import numpy as np

from . import __version__
from .analysis import compare
from .attack import (
    RNG_ALGORITHM,
    AttackBudget,
    dice_attack,
    load_perturbed_matrix,
    perturbation_rate,
    random_attack,
)
from .defense import defend
from .dynamics import ScalarDynamics, fixed_points, integrate
from .equilibrium import (
    PRESETS,
    TrajectoryParams,
    compute_H,
    compute_a,
    compute_state,
    params_for,
    preset_params,
    sample_trajectory,
    trajectory_minimum,
)
from .errors import EquiliResError, InputError
from .graph import (
    Graph,
    arc_count,
    edge_count,
    load_edge_list,
    load_labels,
    remap_edge_list,
    save_edge_list,
)
from .stability import (
    FrequencyGrid,
    is_hurwitz,
    sector_condition_check,
    solve_lyapunov,
    spr_check,
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json_text(obj, level: int = 0) -> str:
    pad = "  " * level
    inner = "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {_json_text(v, level + 1)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_json_text(v, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        # Decimal with 17 significant digits: exact round trip, stable
        # across languages.
        return _fmt(obj)
    return json.dumps(str(obj))


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _emit(args, obj, csv_rows=None) -> None:
    """Write obj as JSON (default) or rows as CSV to stdout."""
    if getattr(args, "format", "json") == "csv" and csv_rows is not None:
        header, rows = csv_rows
        print(header)
        for row in rows:
            print(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    else:
        print(_json_text(_jsonable(obj)))


def _write_json(path: Path, obj) -> None:
    path.write_text(_json_text(_jsonable(obj)) + "\n", encoding="utf-8")


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_graph(args, path=None) -> Graph:
    path = Path(path if path is not None else args.graph)
    if getattr(args, "remap_ids", False):
        with tempfile.NamedTemporaryFile("w", suffix=".edges", delete=False) as tmp:
            tmp_path = Path(tmp.name)
        try:
            remap_edge_list(path, tmp_path, map_path=Path(str(path) + ".idmap"))
            return load_edge_list(
                tmp_path, n_hint=args.n_hint, directed=args.directed
            )
        finally:
            tmp_path.unlink(missing_ok=True)
    return load_edge_list(path, n_hint=args.n_hint, directed=args.directed)


def _resolve_theta_eta(args) -> tuple[float, float, str]:
    preset = getattr(args, "preset", None)
    theta = getattr(args, "theta", None)
    eta = getattr(args, "eta", None)
    if preset and preset != "custom":
        p_theta, p_eta = preset_params(preset)
        return (
            theta if theta is not None else p_theta,
            eta if eta is not None else p_eta,
            preset,
        )
    if theta is None or eta is None:
        raise InputError("custom parameters need both --theta and --eta")
    return theta, eta, "custom"


def _out_dir(args) -> Path:
    if not getattr(args, "out", None):
        raise InputError("this command needs --out DIR")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------- commands


def _cmd_params(args) -> int:
    g = _load_graph(args)
    theta, eta, _ = _resolve_theta_eta(args)
    state = compute_state(g)
    payload = {
        "n": g.n,
        "edges": edge_count(g),
        "beta_tilde": state.beta_tilde,
        "x_tilde": state.x_tilde,
        "a": compute_a(g, eta),
        "H": compute_H(g),
    }
    _emit(args, payload, ("key,value", [(k, v) for k, v in payload.items()]))
    return 0


def _trajectory_rows(g: Graph, params: TrajectoryParams, args):
    state = compute_state(g)
    x_min, _ = trajectory_minimum(params)
    x_lo = args.x_lo if args.x_lo is not None else min(x_min, state.x_tilde) / 5.0
    x_hi = args.x_hi if args.x_hi is not None else 2.0 * max(x_min, state.x_tilde)
    return sample_trajectory(params, x_lo, x_hi, args.steps)


def _cmd_trajectory(args) -> int:
    g = _load_graph(args)
    theta, eta, _ = _resolve_theta_eta(args)
    rows = _trajectory_rows(g, params_for(g, theta, eta), args)
    args.format = "csv"
    _emit(args, rows, ("x,beta", rows))
    return 0


def _require_theta(args) -> float:
    if args.theta is None:
        raise InputError("this command needs --theta")
    return args.theta


def _cmd_simulate(args) -> int:
    d = ScalarDynamics(a=args.a, beta=args.beta, H=args.H, theta=_require_theta(args))
    t, x = integrate(d, args.x0, args.t_end, args.dt)
    rows = list(zip(t.tolist(), x.tolist()))
    args.format = "csv"
    _emit(args, rows, ("t,x", rows))
    return 0


def _cmd_fixed_points(args) -> int:
    d = ScalarDynamics(a=args.a, beta=args.beta, H=args.H, theta=_require_theta(args))
    pts = [{"x": p.x_star, "kind": p.kind} for p in fixed_points(d)]
    _emit(args, pts, ("x,kind", [(p["x"], p["kind"]) for p in pts]))
    return 0


_PHI_KINDS = {
    "linear": lambda desc: (lambda y: desc.get("slope", 0.5) * y),
    "cubic": lambda desc: (lambda y: y**3),
    "saturating": lambda desc: (
        lambda y: desc["H"] * y * y / (desc["theta"] * y * y + 1.0)
    ),
}


def _sector_samples(desc) -> list[float]:
    if "samples" in desc:
        return [float(v) for v in desc["samples"]]
    if desc["kind"] == "saturating":
        # The saturating coupling lives on the positive axis.
        return list(np.logspace(-3, 3, 13))
    return [-10.0, -1.0, -0.1, 0.1, 1.0, 10.0]


def _cmd_verify(args) -> int:
    desc = json.loads(Path(args.system).read_text(encoding="utf-8"))
    A = np.atleast_2d(np.asarray(desc["A"], dtype=float))
    B = np.atleast_2d(np.asarray(desc["B"], dtype=float))
    C = np.atleast_2d(np.asarray(desc["C"], dtype=float))
    p = B.shape[1]
    if "k" in desc:
        k = np.atleast_1d(np.asarray(desc["k"], dtype=float))
    elif "M" in desc:
        k = 1.0 / np.atleast_1d(np.asarray(desc["M"], dtype=float))
    else:
        raise InputError("the system description needs 'k' or 'M'")
    if k.shape != (p,):
        raise InputError(f"k/M must have {p} entries")
    M = 1.0 / k
    psi = np.atleast_1d(np.asarray(desc.get("psi", np.zeros(p)), dtype=float))
    hurwitz = is_hurwitz(A)
    residual = None
    margin = None
    if hurwitz:
        residual = solve_lyapunov(A, np.eye(A.shape[0])).residual
        _, margin = spr_check(A, B, C, M, psi, FrequencyGrid.log_spaced())
    sector_ok = None
    phi_desc = desc.get("phi")
    if phi_desc is not None:
        kind = phi_desc.get("kind")
        if kind not in _PHI_KINDS:
            raise InputError(f"unknown phi kind {kind!r}; choose {sorted(_PHI_KINDS)}")
        phi = _PHI_KINDS[kind](phi_desc)
        sector_ok = sector_condition_check(phi, float(k[0]), _sector_samples(phi_desc))
    verdict = {
        "hurwitz": hurwitz,
        "lyapunov_residual": residual,
        "spr_margin": margin,
        "sector_ok": sector_ok,
    }
    _emit(args, verdict, ("key,value", [(k2, v) for k2, v in verdict.items()]))
    return 0


def _run_attack(g: Graph, args, out: Path) -> tuple[Graph, dict]:
    if args.rate is None and args.count is None:
        raise InputError("attack needs --rate or --count")
    budget = AttackBudget(rate=args.rate, count=args.count)
    if args.method == "dice":
        if g.labels is None:
            raise InputError("labels required for the dice attack (--labels FILE)")
        perturbed = dice_attack(g, budget, args.seed)
    else:
        perturbed = random_attack(g, budget, args.seed)
    sidecar = {
        "method": args.method,
        "seed": args.seed,
        "count": budget.resolve(g),
        "apr": perturbation_rate(g, perturbed),
        "generator": RNG_ALGORITHM,
    }
    save_edge_list(perturbed, out / "attacked.edges")
    _write_json(out / "attack.json", sidecar)
    return perturbed, sidecar


def _cmd_attack(args) -> int:
    g = _load_graph(args)
    if args.labels:
        g = Graph(g.adjacency, directed=g.directed, labels=load_labels(args.labels, g.n))
    out = _out_dir(args)
    _run_attack(g, args, out)
    return 0


def _run_defense(g: Graph, args, out: Path, clean: Graph | None) -> Graph:
    purified, report = defend(
        g,
        rop=args.rop,
        batch=args.batch,
        literal_stop=args.literal_stop,
        clean=clean,
    )
    save_edge_list(purified, out / "defended.edges")
    _write_json(out / "defense.json", report)
    return purified


def _cmd_defend(args) -> int:
    g = _load_graph(args)
    clean = (
        load_edge_list(args.clean, directed=args.directed) if args.clean else None
    )
    out = _out_dir(args)
    _run_defense(g, args, out, clean)
    return 0


def _run_analysis(clean: Graph, perturbed: Graph, defended, args, out: Path) -> dict:
    report = compare(clean, perturbed, defended, k=args.topk, rel_tol=args.rank_tol)
    _write_json(out / "analysis.json", report)
    from .analysis import singular_values

    named = {"clean": clean, "perturbed": perturbed}
    if defended is not None:
        named["defended"] = defended
    for name, graph in named.items():
        sigma = singular_values(graph, k=args.topk)
        _write_csv(
            out / f"spectrum_{name}.csv",
            "index,sigma",
            list(enumerate(sigma.tolist())),
        )
    return report


def _cmd_analyze(args) -> int:
    clean = load_edge_list(args.clean, directed=args.directed)
    perturbed = load_perturbed_matrix(args.perturbed, clean=clean)
    defended = (
        load_perturbed_matrix(args.defended, clean=clean) if args.defended else None
    )
    out = _out_dir(args)
    _run_analysis(clean, perturbed, defended, args, out)
    return 0


def _cmd_pipeline(args) -> int:
    if args.manifest:
        recorded = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        cfg = recorded["config"]
        for key, value in cfg.items():
            if key != "out":
                setattr(args, key, value)
    out = _out_dir(args)
    g = _load_graph(args)
    if args.labels:
        g = Graph(g.adjacency, directed=g.directed, labels=load_labels(args.labels, g.n))
    theta, eta, preset = _resolve_theta_eta(args)
    params = params_for(g, theta, eta)
    state = compute_state(g)
    _write_json(
        out / "clean_state.json",
        {
            "n": g.n,
            "edges": edge_count(g),
            "arcs": arc_count(g),
            "beta_tilde": state.beta_tilde,
            "x_tilde": state.x_tilde,
            "a": params.a,
            "H": params.H,
            "theta": theta,
            "eta": eta,
            "preset": preset,
        },
    )
    rows = _trajectory_rows(g, params, args)
    _write_csv(out / "trajectory.csv", "x,beta", rows)
    save_edge_list(g, out / "clean.edges")
    if args.rate is None and args.count is None:
        args.count = 0
    attacked, _ = _run_attack(g, args, out)
    defended = _run_defense(attacked, args, out, clean=g)
    _run_analysis(g, attacked, defended, args, out)
    config_keys = (
        "graph",
        "labels",
        "directed",
        "n_hint",
        "remap_ids",
        "preset",
        "theta",
        "eta",
        "seed",
        "method",
        "rate",
        "count",
        "rop",
        "batch",
        "literal_stop",
        "steps",
        "x_lo",
        "x_hi",
        "topk",
        "rank_tol",
    )
    manifest = {
        "tool": "equilires",
        "version": __version__,
        "rng": RNG_ALGORITHM,
        "config": {k: getattr(args, k) for k in config_keys},
        "outputs": sorted(p.name for p in out.iterdir()),
    }
    _write_json(out / "manifest.json", manifest)
    return 0


# ------------------------------------------------------------------ parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed")
    common.add_argument("--out", help="output directory")
    common.add_argument(
        "--preset",
        choices=sorted(PRESETS) + ["custom"],
        help="named (theta, eta) defaults",
    )
    common.add_argument("--theta", type=float, help="trajectory shape parameter")
    common.add_argument("--eta", type=float, help="self-dynamics scale")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    graphy = argparse.ArgumentParser(add_help=False)
    graphy.add_argument("graph", help="edge-list file")
    graphy.add_argument("--directed", action="store_true")
    graphy.add_argument("--n-hint", type=int, default=None)
    graphy.add_argument(
        "--remap-ids",
        action="store_true",
        help="remap sparse node ids to dense 0-based ids (writes .idmap sidecar)",
    )

    parser = argparse.ArgumentParser(
        prog="equilires",
        description="Graph adversarial-resilience toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", parents=[common, graphy], help="condensed graph state")
    p.set_defaults(func=_cmd_params)

    p = sub.add_parser(
        "trajectory", parents=[common, graphy], help="equilibrium curve as CSV"
    )
    p.add_argument("--x-lo", type=float, default=None)
    p.add_argument("--x-hi", type=float, default=None)
    p.add_argument("--steps", type=int, default=200)
    p.set_defaults(func=_cmd_trajectory)

    # --theta comes from the common flags; its presence is checked below.
    p = sub.add_parser("simulate", parents=[common], help="integrate the scalar field")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--t-end", type=float, default=50.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fixed-points", parents=[common], help="fixed points and kinds")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--H", type=float, required=True)
    p.set_defaults(func=_cmd_fixed_points)

    p = sub.add_parser("verify", parents=[common], help="stability verdict for a system")
    p.add_argument("system", help="JSON file with A, B, C, k (or M), psi, phi")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("attack", parents=[common, graphy], help="perturb a graph")
    p.add_argument("--method", choices=["dice", "random"], required=True)
    p.add_argument("--rate", type=float, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--labels", help="node label file (required for dice)")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser("defend", parents=[common, graphy], help="purify a graph")
    p.add_argument("--rop", type=float, required=True)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--literal-stop", action="store_true")
    p.add_argument("--clean", help="reference clean graph for distance reporting")
    p.set_defaults(func=_cmd_defend)

    p = sub.add_parser("analyze", parents=[common], help="spectral comparison")
    p.add_argument("--clean", required=True)
    p.add_argument("--perturbed", required=True)
    p.add_argument("--defended", default=None)
    p.add_argument("--directed", action="store_true")
    p.add_argument("--topk", type=int, default=None)
    p.add_argument("--rank-tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser(
        "pipeline",
        parents=[common, graphy],
        help="attack, defend, analyze, and record a manifest",
    )
    p.add_argument("--labels", default=None)
    p.add_argument("--method", choices=["dice", "random"], default="random")
    p.add_argument("--rate", type=float, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--rop", type=float, default=0.0)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--literal-stop", action="store_true")
    p.add_argument("--x-lo", type=float, default=None)
    p.add_argument("--x-hi", type=float, default=None)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--topk", type=int, default=None)
    p.add_argument("--rank-tol", type=float, default=1e-8)
    p.add_argument("--manifest", help="replay a recorded manifest")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EquiliResError as exc:
        print(
            _json_text(
                {
                    "error": {
                        "type": type(exc).__name__,
                        "message": str(exc),
                        "exit_code": exc.exit_code,
                    }
                }
            ),
            file=sys.stderr,
        )
        return exc.exit_code
    except OSError as exc:
        print(
            _json_text(
                {"error": {"type": "OSError", "message": str(exc), "exit_code": 2}}
            ),
            file=sys.stderr,
        )
        return 2


if __name__ == "__main__":
    sys.exit(main())
