"""Command-line front end.

Subcommands: ``analyze`` (equilibrium reports), ``simulate`` (seeded protocol
runs settled from the log), ``sweep`` (parameter scans to CSV), ``gfn``
(link-function curve export), ``catalog`` (available presets and links).

Exit codes: 0 success, 2 configuration error, 3 settlement impossible because
a required correlation has no supporting runs, 4 analytic/oracle discrepancy.
Every error path prints a JSON object with a machine-readable ``code`` field
to stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import arbiter, equilibrium, gfn
from .corrmodel import MODEL_NAMES, model_from_name
from .game import GameError, GameSpec, Bimatrix2x2, make_preset, quantum_payoff_angle
from .gfn import CatalogError, GfnError, catalog_info, catalog_names, make_catalog

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNDEFINED_CORRELATION = 3
EXIT_DISCREPANCY = 4

SUMMARY_COLUMNS = [
    "regime",
    "kind",
    "p_a",
    "p_b",
    "payoff_a",
    "payoff_b",
    "provenance",
    "verified",
    "max_gain",
    "limit_only",
    "weak",
    "source_a",
    "source_b",
    "shift",
]

SWEEP_COLUMNS = [
    "param",
    "value",
    "regime",
    "eq_index",
    "kind",
    "p_a",
    "p_b",
    "payoff_a",
    "payoff_b",
    "verified",
    "limit_only",
    "bifurcation_count",
]

GFN_COLUMNS = ["theta", "g", "q_angle"]

SWEEP_PARAMS = ("delta", "epsilon", "r", "s", "t", "u", "alpha", "beta", "gamma")


class ConfigError(ValueError):
    """Configuration file invalid; the message names the offending field."""


def _number(value, where: str) -> float:
    """Numbers may be given directly or as multiples of pi via 'pi:X'."""
    if isinstance(value, str):
        if value.startswith("pi:"):
            try:
                return float(value[3:]) * math.pi
            except ValueError:
                raise ConfigError(f"{where}: cannot parse {value!r}")
        raise ConfigError(f"{where}: expected a number or 'pi:X', got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    raise ConfigError(f"{where}: expected a number, got {value!r}")


def load_config(path: str | Path) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}")
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be an object")
    return cfg


def build_gfunction(cfg: dict):
    block = cfg.get("gfunction")
    if not isinstance(block, dict) or "name" not in block:
        raise ConfigError("gfunction: block with a 'name' field is required")
    params = {
        k: _number(v, f"gfunction.{k}") for k, v in block.items() if k != "name"
    }
    try:
        return make_catalog(block["name"], **params)
    except (CatalogError, GfnError) as exc:
        raise ConfigError(f"gfunction: {exc}")


def build_spec(cfg: dict):
    g = build_gfunction(cfg)
    model_name = cfg.get("model", "singlet")
    if model_name not in MODEL_NAMES:
        raise ConfigError(f"model: unknown {model_name!r}; known: {', '.join(MODEL_NAMES)}")
    model = model_from_name(model_name)
    block = cfg.get("game")
    if not isinstance(block, dict):
        raise ConfigError("game: block is required")
    try:
        if "matrix" in block:
            entries = block["matrix"]
            matrix = Bimatrix2x2(
                tuple(tuple(tuple(_number(v, "game.matrix") for v in cell) for cell in row) for row in entries)
            )
            return GameSpec(matrix, g, model, block.get("preset", "custom"))
        preset = block.get("preset")
        if preset is None:
            raise ConfigError("game: needs 'preset' or 'matrix'")
        params = {
            k: _number(v, f"game.{k}")
            for k, v in block.items()
            if k != "preset"
        }
        return make_preset(preset, g, model, **params)
    except GameError as exc:
        raise ConfigError(f"game: {exc}")


def _analysis_options(cfg: dict, args) -> tuple[float, float, bool]:
    block = cfg.get("analysis", {})
    if not isinstance(block, dict):
        raise ConfigError("analysis: must be an object")
    tol = args.tol if args.tol is not None else float(block.get("tol", 1e-9))
    grid = args.grid if args.grid is not None else float(block.get("grid_step", 1e-3))
    if not (0.0 < grid <= 0.05):
        raise ConfigError("analysis.grid_step: must lie in (0, 0.05]")
    if tol < 0.0:
        raise ConfigError("analysis.tol: must be non-negative")
    run_oracle = bool(block.get("oracle", True))
    return tol, grid, run_oracle


def _fail(code: str, message: str, exit_code: int) -> int:
    print(json.dumps({"error": {"code": code, "message": message}}), file=sys.stderr)
    return exit_code


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _summary_rows(reports) -> list[dict]:
    rows = []
    for rep in reports:
        for e in rep.equilibria:
            src = e.source_classical or (None, None)
            rows.append(
                {
                    "regime": rep.regime,
                    "kind": e.kind,
                    "p_a": e.profile.p_a,
                    "p_b": e.profile.p_b,
                    "payoff_a": e.payoffs[0],
                    "payoff_b": e.payoffs[1],
                    "provenance": e.provenance,
                    "verified": e.verified,
                    "max_gain": e.max_gain,
                    "limit_only": e.limit_only,
                    "weak": e.weak,
                    "source_a": src[0],
                    "source_b": src[1],
                    "shift": e.shift,
                }
            )
    return rows


def _print_report(rep) -> None:
    print(f"[{rep.regime}] {len(rep.equilibria)} equilibrium record(s)"
          f"{'; bifurcated' if rep.bifurcated else ''}"
          f"{'; degenerate' if rep.degenerate else ''}")
    for e in rep.equilibria:
        flags = []
        if e.limit_only:
            flags.append("limit-only")
        if e.weak:
            flags.append("weak")
        if not e.verified:
            flags.append("UNVERIFIED")
        angle = ""
        if e.realization:
            angle = (
                f" thetas=({e.realization['theta_a']:.4f},"
                f" {e.realization['theta_b']:.4f})"
            )
        print(
            f"  {e.kind:5s} ({e.profile.p_a:.6f}, {e.profile.p_b:.6f})"
            f" payoffs=({e.payoffs[0]:.4f}, {e.payoffs[1]:.4f})"
            f" gain={e.max_gain:.2e} [{e.provenance}]{angle}"
            + ("  " + ",".join(flags) if flags else "")
        )
    for m in rep.missing:
        print(f"  note: {m}")


def _has_discrepancy(reports) -> bool:
    return any(
        note.get("kind") == "discrepancy" for rep in reports for note in rep.notes
    )


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    spec = build_spec(cfg)
    tol, grid, run_oracle = _analysis_options(cfg, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    reports = [
        equilibrium.classical_equilibria(spec.matrix, tol, grid, run_oracle)
    ]
    if spec.model.kind != "classical":
        reports.append(
            equilibrium.quantum_equilibria(
                spec.matrix, spec.g, spec.model, tol, grid, run_oracle
            )
        )
    doc = {
        "game": spec.describe(),
        "options": {"tol": tol, "grid_step": grid, "oracle": run_oracle},
        "regimes": [rep.to_dict() for rep in reports],
    }
    _write_json(out / "analyze_report.json", doc)
    with (out / "analyze_summary.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(_summary_rows(reports))
    for rep in reports:
        _print_report(rep)
    print(f"wrote {out / 'analyze_report.json'} and {out / 'analyze_summary.csv'}")
    if _has_discrepancy(reports):
        return _fail(
            "discrepancy",
            "analytic equilibria and grid oracle disagree; see report notes",
            EXIT_DISCREPANCY,
        )
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    spec = build_spec(cfg)
    block = cfg.get("simulation")
    if not isinstance(block, dict):
        raise ConfigError("simulation: block is required")
    n = int(block.get("n", 0))
    if n < 1:
        raise ConfigError("simulation.n: must be a positive integer")
    seed = args.seed if args.seed is not None else block.get("seed")
    if seed is None:
        raise ConfigError("simulation.seed: required (or pass --seed)")
    if "theta_a" not in block or "theta_b" not in block:
        raise ConfigError("simulation: theta_a and theta_b are required")
    theta_a = _number(block["theta_a"], "simulation.theta_a")
    theta_b = _number(block["theta_b"], "simulation.theta_b")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    log = arbiter.play_runs(spec, theta_a, theta_b, n, int(seed))
    arbiter.write_jsonl(log, out / "runs.jsonl")
    try:
        result = arbiter.settle(log, spec)
    except arbiter.UndefinedCorrelationError as exc:
        return _fail("undefined_correlation", str(exc), EXIT_UNDEFINED_CORRELATION)

    analytic = quantum_payoff_angle(spec, theta_a, theta_b)
    doc = {
        "meta": log.meta,
        "result": result.to_dict(),
        "analytic": {
            "payoffs": list(analytic),
            "p_a": log.meta["p_a"],
            "p_b": log.meta["p_b"],
        },
    }
    _write_json(out / "result.json", doc)

    est = result.correlations
    print(f"runs: {n}, seed: {seed}, model: {spec.model.describe()}")
    print(f"{'quantity':<12}{'estimated':>14}{'analytic':>14}")
    print(f"{'p_a':<12}{result.p_a_hat:>14.6f}{log.meta['p_a']:>14.6f}")
    print(f"{'p_b':<12}{result.p_b_hat:>14.6f}{log.meta['p_b']:>14.6f}")
    print(f"{'payoff_a':<12}{result.payoffs[0]:>14.6f}{analytic[0]:>14.6f}")
    print(f"{'payoff_b':<12}{result.payoffs[1]:>14.6f}{analytic[1]:>14.6f}")
    for name, e in (("c_ac", est.ac), ("c_cb", est.cb), ("c_ab", est.ab), ("c_cc", est.cc)):
        shown = "undefined" if e.value is None else f"{e.value:.6f}"
        print(f"{name:<12}{shown:>14}  (n={e.count})")
    print(f"wrote {out / 'runs.jsonl'} and {out / 'result.json'}")
    return EXIT_OK


def _apply_sweep_value(cfg: dict, param: str, value: float) -> dict:
    cfg = json.loads(json.dumps(cfg))  # deep copy
    if param in ("delta", "epsilon"):
        cfg.setdefault("gfunction", {})[param] = value
    else:
        cfg.setdefault("game", {})[param] = value
    return cfg


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    block = dict(cfg.get("sweep", {}))
    if args.param:
        block["param"] = args.param
    if args.minimum is not None:
        block["min"] = args.minimum
    if args.maximum is not None:
        block["max"] = args.maximum
    if args.steps is not None:
        block["steps"] = args.steps
    param = block.get("param")
    if param not in SWEEP_PARAMS:
        raise ConfigError(
            f"sweep.param: must be one of {', '.join(SWEEP_PARAMS)}, got {param!r}"
        )
    try:
        lo = _number(block["min"], "sweep.min")
        hi = _number(block["max"], "sweep.max")
        steps = int(block["steps"])
    except KeyError as exc:
        raise ConfigError(f"sweep: missing field {exc.args[0]!r}")
    if steps < 1:
        raise ConfigError("sweep.steps: must be at least 1")
    if hi < lo:
        raise ConfigError("sweep: max must be at least min")
    tol, grid, run_oracle = _analysis_options(cfg, args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    values = [lo] if steps == 1 else [
        lo + (hi - lo) * k / (steps - 1) for k in range(steps)
    ]
    rows: list[dict] = []
    points: list[tuple[float, float, bool]] = []
    discrepancy = False
    for value in values:
        sub = _apply_sweep_value(cfg, param, value)
        spec = build_spec(sub)
        if spec.model.kind == "classical":
            rep = equilibrium.classical_equilibria(spec.matrix, tol, grid, run_oracle)
        else:
            rep = equilibrium.quantum_equilibria(
                spec.matrix, spec.g, spec.model, tol, grid, run_oracle
            )
        discrepancy = discrepancy or _has_discrepancy([rep])
        siblings: dict[tuple, int] = {}
        for e in rep.equilibria:
            key = e.source_classical or (e.profile.p_a, e.profile.p_b)
            siblings[key] = siblings.get(key, 0) + 1
        for idx, e in enumerate(rep.equilibria):
            key = e.source_classical or (e.profile.p_a, e.profile.p_b)
            rows.append(
                {
                    "param": param,
                    "value": value,
                    "regime": rep.regime,
                    "eq_index": idx,
                    "kind": e.kind,
                    "p_a": e.profile.p_a,
                    "p_b": e.profile.p_b,
                    "payoff_a": e.payoffs[0],
                    "payoff_b": e.payoffs[1],
                    "verified": e.verified,
                    "limit_only": e.limit_only,
                    "bifurcation_count": siblings[key],
                }
            )
            points.append((value, e.profile.p_a, e.limit_only))
            points.append((value, e.profile.p_b, e.limit_only))
    with (out / "sweep.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out / 'sweep.csv'} ({len(rows)} rows over {len(values)} values)")
    if args.plot:
        from .plotting import render_sweep_figure

        fig = render_sweep_figure(values, points, param, out / "sweep.png")
        print(f"wrote {fig}")
    if discrepancy:
        return _fail(
            "discrepancy",
            "analytic equilibria and grid oracle disagree during sweep",
            EXIT_DISCREPANCY,
        )
    return EXIT_OK


def cmd_gfn(args) -> int:
    cfg = load_config(args.config)
    g = build_gfunction(cfg)
    resolution = args.resolution
    if resolution < 2:
        raise ConfigError("resolution: must be at least 2")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = gfn.sample_curve(g, resolution)
    with (out / "gfn.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(GFN_COLUMNS)
        for theta, value, q in rows:
            writer.writerow([repr(theta), repr(value), repr(q)])
    print(f"wrote {out / 'gfn.csv'} ({len(rows)} rows)")
    if args.plot:
        from .plotting import render_gfn_figure

        title = g.name + (f" {g.params}" if g.params else "")
        fig = render_gfn_figure(rows, title, out / "gfn.png")
        print(f"wrote {fig}")
    return EXIT_OK


def cmd_catalog(_args) -> int:
    doc = {
        "gfunctions": [catalog_info(name) for name in catalog_names()],
        "presets": [
            {
                "name": "pd",
                "params": ["r", "s", "t", "u"],
                "constraint": "s < u < r < t",
                "defaults": {"r": 3, "s": 0, "t": 5, "u": 1},
            },
            {
                "name": "bos",
                "params": ["alpha", "beta", "gamma"],
                "constraint": "alpha > beta > gamma",
                "defaults": {"alpha": 2, "beta": 1, "gamma": 0},
            },
        ],
        "models": list(MODEL_NAMES),
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrgames",
        description="Analyze and simulate correlation games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, needs_config: bool = True) -> None:
        if needs_config:
            p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the run seed")
        p.add_argument("--tol", type=float, default=None, help="verification tolerance")
        p.add_argument("--grid", type=float, default=None, help="oracle grid step")
        plot = p.add_mutually_exclusive_group()
        plot.add_argument("--plot", dest="plot", action="store_true", default=True)
        plot.add_argument("--no-plot", dest="plot", action="store_false")

    p_analyze = sub.add_parser("analyze", help="equilibrium reports per regime")
    add_common(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_sim = sub.add_parser("simulate", help="seeded protocol runs settled from the log")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="scan one parameter, one CSV row per equilibrium")
    add_common(p_sweep)
    p_sweep.add_argument("--param", choices=SWEEP_PARAMS, default=None)
    p_sweep.add_argument("--min", dest="minimum", type=float, default=None)
    p_sweep.add_argument("--max", dest="maximum", type=float, default=None)
    p_sweep.add_argument("--steps", type=int, default=None)
    p_sweep.set_defaults(func=cmd_sweep)

    p_gfn = sub.add_parser("gfn", help="export link-function curves")
    add_common(p_gfn)
    p_gfn.add_argument("--resolution", type=int, default=201)
    p_gfn.set_defaults(func=cmd_gfn)

    p_cat = sub.add_parser("catalog", help="list presets, link functions, and models")
    p_cat.set_defaults(func=cmd_catalog)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except (CatalogError, GameError, GfnError) as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except arbiter.UndefinedCorrelationError as exc:
        return _fail("undefined_correlation", str(exc), EXIT_UNDEFINED_CORRELATION)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
