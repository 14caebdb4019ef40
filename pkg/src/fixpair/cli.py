"""Command-line surface: instance files, generation, reporting.

One JSON instance file carries everything a command might need (space,
maps, comparison function, potentials); each command validates that the
fields it actually uses are present.  Reports are JSON with insertion-
ordered keys so identical inputs produce byte-identical output; wall time
goes to stderr to keep stdout deterministic.

Exit codes: 0 success/verified/sampled_ok, 1 violated/infeasible,
2 input error, 3 no convergence within the iteration budget.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .certify import (
    BHAKTA_BASU,
    CARISTI,
    DIEN,
    MAIN,
    SUM_FORM,
    MatrixPotential,
    PointFunction,
    Potential,
    TablePointFunction,
    WeightedNormPointFunction,
    WeightedNormsPotential,
    Witness,
    potential_value,
    verify_bhakta_basu,
    verify_caristi,
    verify_dien,
    verify_main,
    verify_sum_form,
)
from .comparison import (
    ComparisonFunction,
    Linear,
    Staircase,
    Table,
    build_staircase,
    check_regressive,
)
from .errors import (
    FixpairError,
    InstanceFormatError,
    RetryBudgetExhaustedError,
)
from .solve import apriori_bound, dual_iterate
from .space import (
    AffineMap,
    EuclideanSpace,
    FiniteMetricSpace,
    SelfMap,
    Space,
    TableMap,
    validate_metric,
)
from .synth import synthesize_gamma

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INPUT = 2
EXIT_NO_CONVERGENCE = 3

UNIFORM_MAP_ATTEMPTS = 64
GUIDED_MAP_ATTEMPTS = 8
METRIC_ATTEMPTS = 100


@dataclass(frozen=True)
class InstanceFile:
    """Parsed and validated instance; ``raw`` keeps the JSON-ready dict."""

    version: int
    space: Space
    s_map: SelfMap | None
    t_map: SelfMap | None
    phi: ComparisonFunction | None
    gamma: Potential | None
    alpha: PointFunction | None
    beta: PointFunction | None
    q: float | None
    sample_box: list | None
    seed: int | None
    raw: dict
    digest: str | None = None


# ---------------------------------------------------------------------------
# Parsing


def _fail(msg: str) -> InstanceFormatError:
    return InstanceFormatError(msg)


def _kind(obj, what: str) -> str:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise _fail(f"{what} must be an object with a 'kind' field")
    return obj["kind"]


def _parse_space(obj) -> Space:
    kind = _kind(obj, "space")
    if kind == "finite":
        try:
            labels = list(obj["points"])
            dist = np.array(obj["distance"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise _fail(f"finite space needs 'points' and 'distance': {exc}") from exc
        violation = validate_metric(dist)
        if violation is not None:
            raise _fail(
                f"distance matrix violates {violation.kind} at indices {violation.indices}"
            )
        try:
            return FiniteMetricSpace(labels=tuple(labels), dist=dist)
        except ValueError as exc:
            raise _fail(str(exc)) from exc
    if kind == "euclidean":
        dim = obj.get("dim")
        if not isinstance(dim, int) or dim < 1:
            raise _fail(f"euclidean space needs integer dim >= 1, got {dim!r}")
        return EuclideanSpace(dim=dim)
    raise _fail(f"unknown space kind {kind!r}")


def _parse_map(obj, space: Space, name: str) -> SelfMap:
    kind = _kind(obj, name)
    if kind == "table":
        if not isinstance(space, FiniteMetricSpace):
            raise _fail(f"{name}: table maps need a finite space")
        mapping = obj.get("map")
        if not isinstance(mapping, dict):
            raise _fail(f"{name}: table map needs a 'map' object")
        missing = [lab for lab in space.labels if lab not in mapping]
        if missing:
            raise _fail(f"{name}: map missing points {missing}")
        unknown = [lab for lab in mapping if lab not in space.labels]
        if unknown:
            raise _fail(f"{name}: map references unknown points {unknown}")
        try:
            image = tuple(space.index(mapping[lab]) for lab in space.labels)
        except (KeyError, ValueError) as exc:
            raise _fail(f"{name}: {exc}") from exc
        return TableMap(image=image)
    if kind == "affine":
        if not isinstance(space, EuclideanSpace):
            raise _fail(f"{name}: affine maps need a Euclidean space")
        try:
            a = np.array(obj["A"], dtype=float)
            b = np.array(obj["b"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise _fail(f"{name}: affine map needs 'A' and 'b': {exc}") from exc
        if a.shape != (space.dim, space.dim) or b.shape != (space.dim,):
            raise _fail(
                f"{name}: affine shapes {a.shape}, {b.shape} do not match dim {space.dim}"
            )
        return AffineMap(A=a, b=b)
    raise _fail(f"{name}: unknown map kind {kind!r}")


def _parse_phi(obj) -> ComparisonFunction:
    kind = _kind(obj, "phi")
    try:
        if kind == "linear":
            return Linear(q=float(obj["q"]))
        if kind == "staircase":
            return Staircase(t=tuple(obj["t"]), r=tuple(obj["r"]))
        if kind == "staircase_c06":
            return build_staircase(tuple(obj["t"]))
        if kind == "table":
            phi = Table(knots=tuple(obj["knots"]), values=tuple(obj["values"]))
            report = check_regressive(phi, ())
            if report.status == "violated":
                w = report.witness
                raise _fail(f"phi table is not regressive at t={w.t}: phi={w.lhs}")
            return phi
    except (KeyError, TypeError, ValueError) as exc:
        raise _fail(f"phi ({kind}): {exc}") from exc
    raise _fail(f"unknown phi kind {kind!r}")


def _parse_potential(obj, space: Space) -> Potential:
    kind = _kind(obj, "gamma")
    try:
        if kind == "matrix":
            if not isinstance(space, FiniteMetricSpace):
                raise _fail("gamma: matrix potentials need a finite space")
            gamma = MatrixPotential(values=np.array(obj["values"], dtype=float))
            if gamma.values.shape != (len(space), len(space)):
                raise _fail(
                    f"gamma: matrix shape {gamma.values.shape} does not match "
                    f"{len(space)} points"
                )
            return gamma
        if kind == "weighted_norms":
            if not isinstance(space, EuclideanSpace):
                raise _fail("gamma: weighted_norms potentials need a Euclidean space")
            return WeightedNormsPotential(cx=float(obj["cx"]), cy=float(obj["cy"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise _fail(f"gamma ({kind}): {exc}") from exc
    raise _fail(f"unknown gamma kind {kind!r}")


def _parse_point_function(obj, space: Space, name: str) -> PointFunction:
    kind = _kind(obj, name)
    try:
        if kind == "table":
            if not isinstance(space, FiniteMetricSpace):
                raise _fail(f"{name}: table point functions need a finite space")
            values = obj["values"]
            missing = [lab for lab in space.labels if lab not in values]
            if missing:
                raise _fail(f"{name}: values missing for points {missing}")
            return TablePointFunction(
                values=tuple(float(values[lab]) for lab in space.labels)
            )
        if kind == "weighted_norm":
            if not isinstance(space, EuclideanSpace):
                raise _fail(f"{name}: weighted_norm point functions need a Euclidean space")
            return WeightedNormPointFunction(c=float(obj["c"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise _fail(f"{name} ({kind}): {exc}") from exc
    raise _fail(f"{name}: unknown kind {kind!r}")


def _instance_from_obj(obj: dict, digest: str | None) -> InstanceFile:
    if not isinstance(obj, dict):
        raise _fail("instance file must be a JSON object")
    if obj.get("version") != 1:
        raise _fail(f"unsupported instance version {obj.get('version')!r}")
    if "space" not in obj:
        raise _fail("instance is missing the 'space' field")
    space = _parse_space(obj["space"])
    s_map = _parse_map(obj["S"], space, "S") if "S" in obj else None
    t_map = _parse_map(obj["T"], space, "T") if "T" in obj else None
    phi = _parse_phi(obj["phi"]) if "phi" in obj else None
    gamma = _parse_potential(obj["gamma"], space) if "gamma" in obj else None
    alpha = _parse_point_function(obj["alpha"], space, "alpha") if "alpha" in obj else None
    beta = _parse_point_function(obj["beta"], space, "beta") if "beta" in obj else None
    q = None
    if "q" in obj:
        q = float(obj["q"])
        if not (0.0 <= q < 1.0):
            raise _fail(f"q must lie in [0, 1), got {q}")
    sample_box = None
    if "sample_box" in obj:
        if not isinstance(space, EuclideanSpace):
            raise _fail("sample_box only applies to Euclidean spaces")
        sample_box = [[float(lo), float(hi)] for lo, hi in obj["sample_box"]]
        if len(sample_box) != space.dim or any(hi <= lo for lo, hi in sample_box):
            raise _fail(f"sample_box must give [lo, hi) per dimension for dim={space.dim}")
    seed = obj.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise _fail(f"seed must be an integer, got {seed!r}")
    return InstanceFile(
        version=1,
        space=space,
        s_map=s_map,
        t_map=t_map,
        phi=phi,
        gamma=gamma,
        alpha=alpha,
        beta=beta,
        q=q,
        sample_box=sample_box,
        seed=seed,
        raw=obj,
        digest=digest,
    )


def load_instance(path: str) -> InstanceFile:
    """Read, parse, and fully validate an instance file."""
    with open(path, "rb") as fh:
        blob = fh.read()
    try:
        obj = json.loads(blob)
    except json.JSONDecodeError as exc:
        raise _fail(f"{path}: not valid JSON: {exc}") from exc
    return _instance_from_obj(obj, hashlib.sha256(blob).hexdigest())


# ---------------------------------------------------------------------------
# Serialization


def instance_bytes(raw: dict) -> bytes:
    """Canonical byte encoding of an instance dict (stable key order)."""
    return (json.dumps(raw, separators=(",", ":")) + "\n").encode()


def _round6(x: float) -> float:
    return float(np.round(x, 6))


# ---------------------------------------------------------------------------
# Generation


def _rounded_metric(rng: np.random.Generator, size: int) -> np.ndarray:
    """Pairwise distances of random planar points, rounded to 6 decimals.

    Rounding preserves identity and symmetry; the rare rounding-induced
    triangle violation is handled by drawing fresh points.
    """
    for _ in range(METRIC_ATTEMPTS):
        coords = rng.uniform(0.0, 10.0, size=(size, 2))
        diffs = coords[:, None, :] - coords[None, :, :]
        dist = np.round(np.linalg.norm(diffs, axis=2), 6)
        if validate_metric(dist) is None:
            return dist
    raise FixpairError("could not draw a valid rounded metric")


def _table_json(labels, table) -> dict:
    return {"kind": "table", "map": {labels[i]: labels[int(table[i])] for i in range(len(labels))}}


def _values_json(labels, values) -> dict:
    return {"kind": "table", "values": {labels[i]: float(values[i]) for i in range(len(labels))}}


def _lone_root(table) -> int | None:
    """The unique fixed point all orbits reach, if the map has that shape.

    Returns None when the functional graph has any cycle longer than a
    self-loop, or more than one self-loop.
    """
    n = len(table)
    roots = set()
    for x in range(n):
        y = x
        for _ in range(n):
            y = int(table[y])
        if int(table[y]) != y:
            return None
        roots.add(y)
    return roots.pop() if len(roots) == 1 else None


def _tree_table(rng: np.random.Generator, size: int, order) -> list[int]:
    # order[0] is the root; everything else points at an earlier entry
    table = [0] * size
    table[order[0]] = int(order[0])
    for k in range(1, size):
        table[order[k]] = int(order[int(rng.integers(0, k))])
    return table


def generate_instance(seed: int, size: int, mode: str, q: float | None = None) -> InstanceFile:
    """Deterministic random instance; same arguments, same instance.

    Modes: ``random`` draws everything uniformly, ``feasible-main`` keeps
    drawing map pairs until potential synthesis succeeds and embeds the
    minimal gamma, ``caristi`` builds a descent-shaped map with the orbit
    potential alpha(x) = total remaining orbit distance.

    The generator is a fixed, documented algorithm: all randomness comes
    from numpy's default_rng (PCG64) seeded with ``seed``.
    """
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    if mode not in ("random", "feasible-main", "caristi"):
        raise ValueError(f"unknown generation mode {mode!r}")
    rng = np.random.default_rng(seed)
    labels = [f"p{i}" for i in range(size)]
    dist = _rounded_metric(rng, size)
    space = FiniteMetricSpace(labels=tuple(labels), dist=dist)
    raw: dict = {
        "version": 1,
        "space": {"kind": "finite", "points": labels, "distance": dist.tolist()},
    }

    if mode == "random":
        s_table = [int(v) for v in rng.integers(0, size, size=size)]
        t_table = [int(v) for v in rng.integers(0, size, size=size)]
        raw["S"] = _table_json(labels, s_table)
        raw["T"] = _table_json(labels, t_table)
        raw["phi"] = {"kind": "linear", "q": _round6(rng.uniform(0.0, 0.9))}
        raw["gamma"] = {
            "kind": "matrix",
            "values": np.round(rng.uniform(0.0, 3.0, size=(size, size)), 6).tolist(),
        }
        raw["alpha"] = _values_json(labels, np.round(rng.uniform(0.0, 5.0, size=size), 6))
        raw["beta"] = _values_json(labels, np.round(rng.uniform(0.0, 5.0, size=size), 6))
        raw["q"] = _round6(rng.uniform(0.0, 0.9))
    elif mode == "feasible-main":
        phi_q = _round6(rng.uniform(0.0, 0.9)) if q is None else float(q)
        phi = Linear(q=phi_q)
        result = None
        s_table = t_table = None
        last_raw = None
        # uniform draws first (cheap shape filter before full synthesis),
        # then guided draws whose orbits all descend to one shared root
        for attempt in range(UNIFORM_MAP_ATTEMPTS + GUIDED_MAP_ATTEMPTS):
            if attempt < UNIFORM_MAP_ATTEMPTS:
                s_table = [int(v) for v in rng.integers(0, size, size=size)]
                t_table = [int(v) for v in rng.integers(0, size, size=size)]
                root = _lone_root(s_table)
                if root is None or _lone_root(t_table) != root:
                    continue
            else:
                order = [int(v) for v in rng.permutation(size)]
                s_table = _tree_table(rng, size, order)
                rest = [i for i in range(size) if i != order[0]]
                order_t = [order[0]] + [rest[int(v)] for v in rng.permutation(len(rest))]
                t_table = _tree_table(rng, size, order_t)
            candidate = synthesize_gamma(
                space, TableMap(image=tuple(s_table)), TableMap(image=tuple(t_table)), phi
            )
            last_raw = dict(raw)
            last_raw["S"] = _table_json(labels, s_table)
            last_raw["T"] = _table_json(labels, t_table)
            last_raw["phi"] = {"kind": "linear", "q": phi_q}
            last_raw["seed"] = int(seed)
            if candidate.feasible:
                result = candidate
                break
        if result is None:
            raise RetryBudgetExhaustedError(
                f"no feasible map pair in {UNIFORM_MAP_ATTEMPTS + GUIDED_MAP_ATTEMPTS} draws",
                last_instance=last_raw,
            )
        raw["S"] = _table_json(labels, s_table)
        raw["T"] = _table_json(labels, t_table)
        raw["phi"] = {"kind": "linear", "q": phi_q}
        raw["gamma"] = {"kind": "matrix", "values": result.gamma.values.tolist()}
    else:  # caristi
        order = [int(v) for v in rng.permutation(size)]
        t_table = _tree_table(rng, size, order)
        alpha = [0.0] * size
        for k in range(1, size):
            x = order[k]
            alpha[x] = float(dist[x, t_table[x]]) + alpha[t_table[x]]
        raw["S"] = _table_json(labels, t_table)
        raw["T"] = _table_json(labels, t_table)
        raw["alpha"] = _values_json(labels, alpha)

    raw["seed"] = int(seed)
    return _instance_from_obj(raw, None)


# ---------------------------------------------------------------------------
# Reporting helpers


def _render_point(space: Space, p) -> object:
    if isinstance(space, FiniteMetricSpace):
        return space.labels[p]
    return [float(c) for c in np.asarray(p).reshape(-1)]


def _trace_cell(space: Space, p) -> str:
    if isinstance(space, FiniteMetricSpace):
        return space.labels[p]
    return "[" + ",".join(repr(float(c)) for c in np.asarray(p).reshape(-1)) + "]"


def _witness_json(w: Witness) -> dict:
    out: dict = {"x": list(w.x) if isinstance(w.x, tuple) else w.x}
    if w.y is not None:
        out["y"] = list(w.y) if isinstance(w.y, tuple) else w.y
    out["lhs"] = w.lhs
    out["rhs"] = w.rhs
    if w.depth is not None:
        out["depth"] = w.depth
    return out


def _print_report(report: dict) -> None:
    sys.stdout.write(json.dumps(report, separators=(",", ":")) + "\n")


def _require(value, message: str):
    if value is None:
        raise _fail(message)
    return value


def _resolve_start(inst: InstanceFile, text: str, name: str):
    if isinstance(inst.space, FiniteMetricSpace):
        try:
            return inst.space.index(text)
        except ValueError as exc:
            raise _fail(f"{name}: {exc}") from exc
    try:
        val = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail(f"{name}: expected a number or coordinate list, got {text!r}") from exc
    arr = np.atleast_1d(np.array(val, dtype=float))
    if arr.shape != (inst.space.dim,):
        raise _fail(f"{name}: expected {inst.space.dim} coordinates, got {text!r}")
    return arr


# ---------------------------------------------------------------------------
# Commands


def _cmd_validate(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    report = {"command": "validate", "instance": inst.digest, "outcome": "valid"}
    if isinstance(inst.space, FiniteMetricSpace):
        report["points"] = len(inst.space)
    else:
        report["dim"] = inst.space.dim
    return EXIT_OK, report


def _cmd_certify(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    kwargs = {}
    if isinstance(inst.space, EuclideanSpace):
        kwargs = {
            "sample_box": _require(
                inst.sample_box, "certification on a Euclidean space needs sample_box"
            ),
            "sample_count": args.samples,
            "seed": args.seed if args.seed is not None else (inst.seed or 0),
        }
    cond = args.condition
    if cond == CARISTI:
        cert = verify_caristi(
            inst.space,
            _require(inst.t_map, "caristi needs T"),
            _require(inst.alpha, "caristi needs alpha"),
            **kwargs,
        )
    elif cond == BHAKTA_BASU:
        cert = verify_bhakta_basu(
            inst.space,
            _require(inst.s_map, "bhakta-basu needs S"),
            _require(inst.t_map, "bhakta-basu needs T"),
            _require(inst.alpha, "bhakta-basu needs alpha"),
            _require(inst.beta, "bhakta-basu needs beta"),
            **kwargs,
        )
    elif cond == DIEN:
        cert = verify_dien(
            inst.space,
            _require(inst.s_map, "dien needs S"),
            _require(inst.t_map, "dien needs T"),
            _require(inst.q, "dien needs q"),
            _require(inst.alpha, "dien needs alpha"),
            **kwargs,
        )
    elif cond == MAIN:
        cert = verify_main(
            inst.space,
            _require(inst.s_map, "main needs S"),
            _require(inst.t_map, "main needs T"),
            _require(inst.phi, "main needs phi"),
            _require(inst.gamma, "main needs gamma"),
            **kwargs,
        )
    elif cond == SUM_FORM:
        cert = verify_sum_form(
            inst.space,
            _require(inst.s_map, "sum-form needs S"),
            _require(inst.t_map, "sum-form needs T"),
            _require(inst.phi, "sum-form needs phi"),
            _require(inst.gamma, "sum-form needs gamma"),
            args.depth,
            **kwargs,
        )
    else:
        raise _fail(f"unknown condition {cond!r}")
    report = {
        "command": "certify",
        "instance": inst.digest,
        "condition": cond,
        "outcome": cert.status,
    }
    if cert.witness is not None:
        report["witness"] = _witness_json(cert.witness)
    if cert.sample_count is not None:
        report["sample_count"] = cert.sample_count
    if cert.depth is not None:
        report["depth"] = cert.depth
    return (EXIT_OK if cert.holds else EXIT_VIOLATED), report


def _cmd_synth(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    if not isinstance(inst.space, FiniteMetricSpace):
        raise _fail("synthesis needs a finite space")
    if args.phi is not None:
        try:
            phi = _parse_phi(json.loads(args.phi))
        except json.JSONDecodeError as exc:
            raise _fail(f"--phi: not valid JSON: {exc}") from exc
    else:
        phi = _require(inst.phi, "synthesis needs phi (in the instance or via --phi)")
    result = synthesize_gamma(
        inst.space,
        _require(inst.s_map, "synthesis needs S"),
        _require(inst.t_map, "synthesis needs T"),
        phi,
    )
    report: dict = {
        "command": "synth",
        "instance": inst.digest,
        "feasible": result.feasible,
    }
    if result.feasible:
        report["gamma"] = {"kind": "matrix", "values": result.gamma.values.tolist()}
        return EXIT_OK, report
    report["cycle"] = [f"({x},{y})" for x, y in result.cycle]
    report["excess_sum"] = result.cycle_excess_sum
    return EXIT_VIOLATED, report


def _cmd_solve(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    s_map = _require(inst.s_map, "solve needs S")
    t_map = _require(inst.t_map, "solve needs T")
    x0 = _resolve_start(inst, args.x0, "--x0")
    y0 = _resolve_start(inst, args.y0, "--y0")
    try:
        report_obj = dual_iterate(
            inst.space, s_map, t_map, x0, y0, args.tol, args.max_iter,
            record_trace=args.trace is not None,
        )
    except ValueError as exc:
        raise _fail(str(exc)) from exc
    if args.trace is not None:
        with open(args.trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "x", "y", "d"])
            for n, x, y, d in report_obj.trace:
                writer.writerow(
                    [n, _trace_cell(inst.space, x), _trace_cell(inst.space, y), repr(d)]
                )
    report = {
        "command": "solve",
        "instance": inst.digest,
        "outcome": "coincide" if report_obj.coincide else "no-convergence",
        "z": _render_point(inst.space, report_obj.z),
        "w": _render_point(inst.space, report_obj.w),
        "iterations": report_obj.iterations,
        "residual_S": report_obj.residual_S,
        "residual_T": report_obj.residual_T,
        "cross_residual": report_obj.cross_residual,
    }
    if args.bound:
        bound = apriori_bound(
            _require(inst.phi, "--bound needs phi"),
            _require(inst.gamma, "--bound needs gamma"),
            inst.space,
            x0,
            y0,
        )
        report["apriori_bound"] = bound
    return (EXIT_OK if report_obj.coincide else EXIT_NO_CONVERGENCE), report


def _cmd_bound(args) -> tuple[int, dict]:
    inst = load_instance(args.instance)
    x0 = _resolve_start(inst, args.x0, "--x0")
    y0 = _resolve_start(inst, args.y0, "--y0")
    phi = _require(inst.phi, "bound needs phi")
    gamma = _require(inst.gamma, "bound needs gamma")
    value = apriori_bound(phi, gamma, inst.space, x0, y0)
    theta0 = inst.space.distance(x0, y0)
    report = {
        "command": "bound",
        "instance": inst.digest,
        "outcome": "bounded",
        "theta0": theta0,
        "gamma0": potential_value(inst.space, gamma, x0, y0),
        "bound": value,
    }
    return EXIT_OK, report


def _cmd_gen(args) -> tuple[int, dict]:
    env_seed = os.environ.get("FIXPAIR_SEED")
    try:
        seed = int(env_seed) if env_seed is not None else args.seed
    except ValueError as exc:
        raise _fail(f"FIXPAIR_SEED must be an integer, got {env_seed!r}") from exc
    try:
        inst = generate_instance(seed, args.size, args.mode, q=args.q)
    except RetryBudgetExhaustedError as exc:
        report = {
            "command": "gen",
            "outcome": "retry-budget-exhausted",
            "message": str(exc),
            "last_instance": exc.last_instance,
        }
        return EXIT_VIOLATED, report
    blob = instance_bytes(inst.raw)
    digest = hashlib.sha256(blob).hexdigest()
    if args.out is not None:
        with open(args.out, "wb") as fh:
            fh.write(blob)
        report = {
            "command": "gen",
            "instance": digest,
            "outcome": "written",
            "path": args.out,
            "seed": seed,
            "size": args.size,
            "mode": args.mode,
        }
        return EXIT_OK, report
    sys.stdout.write(blob.decode())
    return EXIT_OK, {}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fixpair",
        description="Certify contractive conditions, synthesize potentials, "
        "and solve for common fixed points of selfmap pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an instance file")
    p.add_argument("--instance", required=True)

    p = sub.add_parser("certify", help="check a contractive condition")
    p.add_argument("--instance", required=True)
    p.add_argument(
        "--condition",
        required=True,
        choices=[CARISTI, BHAKTA_BASU, DIEN, MAIN, SUM_FORM],
    )
    p.add_argument("--depth", type=int, default=5, help="truncation depth for sum-form")
    p.add_argument("--samples", type=int, default=1000, help="sample count on Euclidean spaces")
    p.add_argument("--seed", type=int, default=None, help="sampling seed override")

    p = sub.add_parser("synth", help="synthesize the minimal potential")
    p.add_argument("--instance", required=True)
    p.add_argument("--phi", default=None, help="inline phi JSON overriding the instance")

    p = sub.add_parser("solve", help="dual iteration to a common fixed point")
    p.add_argument("--instance", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--y0", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--trace", default=None, help="write the iteration trace CSV here")
    p.add_argument("--bound", action="store_true", help="include the a-priori bound")

    p = sub.add_parser("bound", help="a-priori series bound from a start pair")
    p.add_argument("--instance", required=True)
    p.add_argument("--x0", required=True)
    p.add_argument("--y0", required=True)

    p = sub.add_parser("gen", help="generate a deterministic random instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=4)
    p.add_argument("--mode", default="random", choices=["random", "feasible-main", "caristi"])
    p.add_argument("--q", type=float, default=None, help="linear phi slope for feasible-main")
    p.add_argument("--out", default=None, help="write the instance here instead of stdout")

    return parser


_HANDLERS = {
    "validate": _cmd_validate,
    "certify": _cmd_certify,
    "synth": _cmd_synth,
    "solve": _cmd_solve,
    "bound": _cmd_bound,
    "gen": _cmd_gen,
}


def run_command(argv) -> int:
    """Dispatch one CLI invocation; prints the report, returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage/help; fold its exit into our codes
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    started = time.monotonic()
    try:
        code, report = _HANDLERS[args.command](args)
    except (FixpairError, ValueError, OSError) as exc:
        _print_report({"command": args.command, "outcome": "error", "message": str(exc)})
        return EXIT_INPUT
    if report:
        _print_report(report)
    sys.stderr.write(f"fixpair {args.command}: {time.monotonic() - started:.3f}s\n")
    return code


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
