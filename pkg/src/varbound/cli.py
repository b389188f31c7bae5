"""``varbound`` command line: bounds, sweep, optimize, verify.

Exit codes: 0 success, 1 internal invariant violation or failed verification,
2 bad input (unparseable or invalid scenario, bad flags, unwritable output).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .basisopt import BoundKind, OptimizerConfig, optimize
from .bounds import full_report
from .oracle import verify_suite
from .qcore import DimensionError, HermitianObservable, PureState, ValidationError
from .scenarios import SweepRow, SweepSpec, pauli_operators, spin1_operators, sweep, theta_state

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2


class ScenarioError(ValueError):
    """Scenario file cannot be parsed or fails validation."""


class InvariantViolation(RuntimeError):
    pass


def _presets() -> dict[str, HermitianObservable]:
    lx, ly, lz = spin1_operators()
    px, py, pz = pauli_operators()
    return {
        "spin1_lx": lx, "spin1_ly": ly, "spin1_lz": lz,
        "pauli_x": px, "pauli_y": py, "pauli_z": pz,
    }


@dataclass(frozen=True)
class Scenario:
    dimension: int
    observable_a: HermitianObservable
    observable_b: HermitianObservable
    state: PureState
    theta: float | None
    weights: tuple[float, ...]
    basis: str = "standard"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)


def _complex(value, where: str) -> complex:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        raise ScenarioError(f"{where}: expected a [re, im] pair of numbers, got {value!r}")
    return complex(value[0], value[1])


def _observable(spec, where: str, n: int) -> HermitianObservable:
    if not isinstance(spec, dict):
        raise ScenarioError(f"{where}: expected an object with 'preset' or 'matrix'")
    if "preset" in spec:
        presets = _presets()
        name = spec["preset"]
        if name not in presets:
            raise ScenarioError(f"{where}.preset: unknown preset {name!r}; known: {', '.join(presets)}")
        obs = presets[name]
    elif "matrix" in spec:
        rows = spec["matrix"]
        if not isinstance(rows, list) or len(rows) != n or any(not isinstance(r, list) or len(r) != n for r in rows):
            raise ScenarioError(f"{where}.matrix: expected a {n}x{n} array of [re, im] pairs")
        mat = [[_complex(x, f"{where}.matrix[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
        try:
            obs = HermitianObservable(mat)
        except ValidationError as exc:
            raise ScenarioError(f"{where}.matrix: {exc}") from exc
    else:
        raise ScenarioError(f"{where}: expected 'preset' or 'matrix'")
    if obs.dim != n:
        raise ScenarioError(f"{where}: dimension {obs.dim} does not match declared dimension {n}")
    return obs


def _state(spec, n: int) -> tuple[PureState, float | None]:
    if not isinstance(spec, dict):
        raise ScenarioError("state: expected an object with 'preset' or 'vector'")
    if "preset" in spec:
        if spec["preset"] != "theta":
            raise ScenarioError(f"state.preset: unknown preset {spec['preset']!r}; known: theta")
        theta = spec.get("theta")
        if not isinstance(theta, (int, float)) or isinstance(theta, bool) or not math.isfinite(theta):
            raise ScenarioError("state.theta: expected a finite number")
        psi = theta_state(float(theta))
        if psi.dim != n:
            raise ScenarioError(f"state: theta preset is 3-dimensional, declared dimension is {n}")
        return psi, float(theta)
    if "vector" in spec:
        vec = spec["vector"]
        if not isinstance(vec, list) or len(vec) != n:
            raise ScenarioError(f"state.vector: expected {n} [re, im] pairs")
        amps = [_complex(x, f"state.vector[{i}]") for i, x in enumerate(vec)]
        try:
            return PureState(amps), None
        except ValidationError as exc:
            raise ScenarioError(f"state.vector: {exc}") from exc
    raise ScenarioError("state: expected 'preset' or 'vector'")


def _optimizer(spec) -> OptimizerConfig:
    if spec is None:
        return OptimizerConfig()
    if not isinstance(spec, dict):
        raise ScenarioError("optimizer: expected an object")
    unknown = set(spec) - {"restarts", "max_iterations", "tolerance", "seed"}
    if unknown:
        raise ScenarioError(f"optimizer: unknown fields {sorted(unknown)}")
    try:
        return OptimizerConfig(**spec)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"optimizer: {exc}") from exc


def parse_scenario(data) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario: top level must be an object")
    n = data.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ScenarioError("dimension: expected a positive integer")
    for key in ("observable_a", "observable_b", "state"):
        if key not in data:
            raise ScenarioError(f"{key}: missing")
    a = _observable(data["observable_a"], "observable_a", n)
    b = _observable(data["observable_b"], "observable_b", n)
    psi, theta = _state(data["state"], n)
    weights = data.get("weights", [1 / 3, 0.5])
    if (
        not isinstance(weights, list)
        or not weights
        or not all(isinstance(w, (int, float)) and not isinstance(w, bool) and 0 <= w <= 1 for w in weights)
    ):
        raise ScenarioError("weights: expected a nonempty array of numbers in [0, 1]")
    basis = data.get("basis", "standard")
    if basis not in ("standard", "optimized"):
        raise ScenarioError(f"basis: expected 'standard' or 'optimized', got {basis!r}")
    return Scenario(
        dimension=n,
        observable_a=a,
        observable_b=b,
        state=psi,
        theta=theta,
        weights=tuple(sorted({float(w) for w in weights})),
        basis=basis,
        optimizer=_optimizer(data.get("optimizer")),
    )


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(data)


def fmt(x: float) -> str:
    """12 significant digits, trailing zeros kept, no negative zero."""
    return format(float(x) + 0.0, "#.12g")


def fmt_complex(z: complex) -> str:
    return f"{fmt(z.real)}{'+' if z.imag + 0.0 >= 0 else '-'}{fmt(abs(z.imag))}j"


def weight_label(w: float) -> str:
    return f"{w:.6f}"


def sweep_header(weights, optimized: bool = False) -> list[str]:
    cols = ["theta", "var_a", "var_b", "product", "robertson", "schrodinger", "mbp", "milne"]
    cols += [f"callebaut_{weight_label(w)}" for w in weights]
    if optimized:
        cols += [f"l1_{weight_label(w)}" for w in weights] + ["l2"]
    return cols


def _row_values(row: SweepRow, weights) -> list[float]:
    vals = [row.theta, row.variance_a, row.variance_b, row.product, row.robertson, row.schrodinger, row.mbp, row.milne]
    vals += [row.callebaut[w] for w in weights]
    if row.l1 is not None:
        vals += [row.l1[w] for w in weights] + [row.l2]
    return vals


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_sweep_csv(rows: list[SweepRow], weights, path) -> None:
    optimized = bool(rows) and rows[0].l1 is not None
    lines = [",".join(sweep_header(weights, optimized))]
    lines += [",".join(fmt(v) for v in _row_values(r, weights)) for r in rows]
    _atomic_write(path, "\n".join(lines) + "\n")


def read_sweep_csv(path) -> list[SweepRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        records = list(csv.DictReader(fh))
    rows = []
    for rec in records:
        cal = {float(k[len("callebaut_"):]): float(v) for k, v in rec.items() if k.startswith("callebaut_")}
        l1 = {float(k[len("l1_"):]): float(v) for k, v in rec.items() if k.startswith("l1_")} or None
        rows.append(
            SweepRow(
                theta=float(rec["theta"]),
                variance_a=float(rec["var_a"]),
                variance_b=float(rec["var_b"]),
                product=float(rec["product"]),
                robertson=float(rec["robertson"]),
                schrodinger=float(rec["schrodinger"]),
                mbp=float(rec["mbp"]),
                milne=float(rec["milne"]),
                callebaut=cal,
                l1=l1,
                l2=float(rec["l2"]) if "l2" in rec else None,
            )
        )
    return rows


def _opt_config(sc: Scenario, args) -> OptimizerConfig:
    cfg = sc.optimizer
    if getattr(args, "restarts", None) is not None:
        cfg = replace(cfg, restarts=args.restarts)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_bounds(args, out) -> int:
    sc = load_scenario(args.scenario)
    basis_mode = args.basis or sc.basis
    rep = full_report(sc.observable_a, sc.observable_b, sc.state, None, sc.weights)
    bad = rep.violations()
    if bad:
        raise InvariantViolation(f"bound report exceeds the variance product: {', '.join(bad)}")
    fields = {
        "variance_a": rep.variance_a,
        "variance_b": rep.variance_b,
        "product": rep.product,
        "robertson": rep.robertson,
        "schrodinger": rep.schrodinger,
        "mbp": rep.mbp,
        **{f"callebaut_{weight_label(w)}": v for w, v in rep.callebaut.items()},
        "milne": rep.milne,
        "combined": rep.combined,
    }
    meta = {}
    if basis_mode == "optimized":
        cfg = _opt_config(sc, args)
        evaluations = 0
        for w in sc.weights:
            res = optimize(sc.observable_a, sc.observable_b, sc.state, BoundKind.callebaut(w), cfg)
            fields[f"l1_{weight_label(w)}"] = res.best_value
            evaluations += res.evaluations
        res = optimize(sc.observable_a, sc.observable_b, sc.state, BoundKind.milne(), cfg)
        fields["l2"] = res.best_value
        evaluations += res.evaluations
        fields["l1_l2_combined"] = max(v for k, v in fields.items() if k.startswith("l1_") or k == "l2")
        meta = dict(restarts=cfg.restarts, max_iterations=cfg.max_iterations, tolerance=cfg.tolerance,
                    seed=cfg.seed, evaluations=evaluations)
        over = [k for k in fields if (k.startswith("l1") or k == "l2") and fields[k] > rep.product + 1e-8]
        if over:
            raise InvariantViolation(f"optimized bound exceeds the variance product: {', '.join(over)}")
    if args.json:
        json.dump({"basis": basis_mode, **fields, **({"optimizer": meta} if meta else {})}, out, indent=2)
        out.write("\n")
        return EXIT_OK
    width = max(map(len, fields))
    out.write(f"{'basis':<{width}}  {basis_mode}\n")
    for key, val in fields.items():
        out.write(f"{key:<{width}}  {fmt(val)}\n")
    for key, val in meta.items():
        out.write(f"optimizer.{key} {val}\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    sc = load_scenario(args.scenario)
    if sc.theta is None:
        raise ScenarioError("state: sweep requires the 'theta' state preset")
    try:
        spec = SweepSpec(args.theta_start, args.theta_end, args.steps, sc.weights, sc.basis, sc.optimizer)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    out_dir = Path(args.output).parent
    if not out_dir.is_dir() or not os.access(out_dir, os.W_OK):
        raise ScenarioError(f"{args.output}: output directory is not writable")
    rows = sweep(sc.observable_a, sc.observable_b, theta_state, spec)
    for r in rows:
        vals = [r.robertson, r.schrodinger, r.mbp, r.milne, *r.callebaut.values()]
        if r.l1 is not None:
            vals += [*r.l1.values(), r.l2]
        if max(vals) > r.product + 1e-8:
            raise InvariantViolation(f"bound exceeds the variance product at theta={r.theta!r}")
    try:
        write_sweep_csv(rows, spec.weights, args.output)
    except OSError as exc:
        raise ScenarioError(f"{args.output}: cannot write ({exc.strerror})") from exc
    out.write(f"wrote {len(rows)} rows to {args.output}\n")
    return EXIT_OK


def cmd_optimize(args, out) -> int:
    sc = load_scenario(args.scenario)
    if args.kind == "callebaut":
        if args.lam is None:
            raise ScenarioError("--lambda is required for --kind callebaut")
        if not 0 <= args.lam <= 1:
            raise ScenarioError("--lambda must lie in [0, 1]")
        kind = BoundKind.callebaut(args.lam)
    else:
        kind = BoundKind.milne()
    try:
        cfg = _opt_config(sc, args)
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    res = optimize(sc.observable_a, sc.observable_b, sc.state, kind, cfg)
    out.write(f"kind {kind}\n")
    out.write(f"best_value {fmt(res.best_value)}\n")
    out.write("per_restart_values " + " ".join(fmt(v) for v in res.per_restart_values) + "\n")
    out.write(f"evaluations {res.evaluations}\n")
    out.write(f"restarts {cfg.restarts} max_iterations {cfg.max_iterations} tolerance {cfg.tolerance!r} seed {cfg.seed}\n")
    out.write("best_basis\n")
    for row in np.asarray(res.best_basis.matrix):
        out.write("  " + " ".join(fmt_complex(z) for z in row) + "\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    rep = verify_suite(args.seed, args.trials, inject_fault=args.inject_fault)
    out.write(f"checks_run {rep.checks_run}\n")
    out.write(f"failures {len(rep.failures)}\n")
    out.write(f"worst_margin {rep.worst_margin:.6e}\n")
    for name in sorted(rep.counts):
        out.write(f"  {name} {rep.counts[name]}\n")
    for name, inst, observed in rep.failures[:20]:
        out.write(f"FAIL {name} [{inst}] {observed}\n")
    return EXIT_OK if rep.ok else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="varbound", description="Variance-product uncertainty bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="evaluate every bound for a scenario")
    b.add_argument("--scenario", required=True)
    b.add_argument("--basis", choices=["standard", "optimized"])
    b.add_argument("--restarts", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--json", action="store_true", help="emit JSON instead of text")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("sweep", help="tabulate bounds over the theta state family as CSV")
    s.add_argument("--scenario", required=True)
    s.add_argument("--theta-start", type=float, default=0.0)
    s.add_argument("--theta-end", type=float, default=math.pi)
    s.add_argument("--steps", type=int, default=181)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("optimize", help="maximize a bound over orthonormal bases")
    o.add_argument("--scenario", required=True)
    o.add_argument("--kind", choices=["callebaut", "milne"], required=True)
    o.add_argument("--lambda", dest="lam", type=float)
    o.add_argument("--restarts", type=int)
    o.add_argument("--seed", type=int)
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("verify", help="run the randomized cross-check suite")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=200)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ScenarioError, ValidationError, DimensionError) as exc:
        print(f"varbound: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"varbound: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
