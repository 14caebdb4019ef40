"""Verification of contractive conditions on selfmap pairs.

Finite spaces are checked exhaustively (status ``verified`` or
``violated``); Euclidean spaces are checked on a deterministic
low-discrepancy sample of a declared box plus seeded random points, and
can only ever earn ``sampled_ok`` -- honesty about quantifier coverage.
Violations always carry the first failing witness in deterministic order
(label-lexicographic on finite spaces, sample order on Euclidean ones).

A condition holds at a pair iff lhs <= rhs + VALUE_TOL; the symmetric rule
keeps exact-equality cases (identity maps, telescoping equalities) from
flapping between verified and violated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .comparison import VALUE_TOL, ComparisonFunction, Linear, eval_phi
from .space import EuclideanSpace, FiniteMetricSpace, SelfMap, Space

# Condition identifiers, shared with the CLI.
CARISTI = "caristi"
BHAKTA_BASU = "bhakta-basu"
DIEN = "dien"
MAIN = "main"
SUM_FORM = "sum-form"


@dataclass(frozen=True)
class MatrixPotential:
    """Potential on a finite space: one nonnegative value per ordered pair."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"potential matrix must be square, got {v.shape}")
        if np.any(v < 0.0):
            raise ValueError("potential values must be nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def value(self, x: int, y: int) -> float:
        return float(self.values[x, y])


@dataclass(frozen=True)
class WeightedNormsPotential:
    """Potential on a Euclidean space: gamma(x, y) = cx*||x|| + cy*||y||."""

    cx: float
    cy: float

    def __post_init__(self):
        if self.cx < 0.0 or self.cy < 0.0:
            raise ValueError("norm weights must be nonnegative")

    def value(self, x, y) -> float:
        return self.cx * float(np.linalg.norm(x)) + self.cy * float(np.linalg.norm(y))


Potential = Union[MatrixPotential, WeightedNormsPotential]


@dataclass(frozen=True)
class TablePointFunction:
    """Nonnegative function on the points of a finite space."""

    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if any(v < 0.0 for v in self.values):
            raise ValueError("point-function values must be nonnegative")

    def value(self, x: int) -> float:
        return self.values[x]


@dataclass(frozen=True)
class WeightedNormPointFunction:
    """alpha(x) = c*||x|| on a Euclidean space."""

    c: float

    def __post_init__(self):
        if self.c < 0.0:
            raise ValueError("norm weight must be nonnegative")

    def value(self, x) -> float:
        return self.c * float(np.linalg.norm(x))


PointFunction = Union[TablePointFunction, WeightedNormPointFunction]


@dataclass(frozen=True)
class Witness:
    """First failing point(s) with both sides of the inequality.

    ``x``/``y`` are labels on finite spaces and coordinate tuples on
    Euclidean ones; ``y`` is None for single-point conditions and ``depth``
    is the failing n for the truncated sum condition.
    """

    x: object
    y: object
    lhs: float
    rhs: float
    depth: int | None = None


@dataclass(frozen=True)
class Certificate:
    """Outcome of checking one contractive condition.

    ``verified`` is exhaustive and therefore only possible on finite
    spaces; ``sampled_ok`` records how many samples were checked.  For the
    truncated sum condition ``depth`` records the largest n checked, since
    any finite truncation of the all-n condition leaves a gap.
    """

    condition: str
    status: str  # verified | violated | sampled_ok
    witness: Witness | None = None
    sample_count: int | None = None
    depth: int | None = None

    @property
    def holds(self) -> bool:
        return self.status in ("verified", "sampled_ok")


# ---------------------------------------------------------------------------
# Deterministic sampling of Euclidean boxes


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def _radical_inverse(i: int, base: int) -> float:
    f, r = 1.0, 0.0
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def _check_box(space: EuclideanSpace, box) -> list[tuple[float, float]]:
    if box is None:
        raise ValueError("Euclidean certification needs a declared sample box")
    box = [(float(lo), float(hi)) for lo, hi in box]
    if len(box) != space.dim or any(hi <= lo for lo, hi in box):
        raise ValueError(f"sample box must give [lo, hi) per dimension for dim={space.dim}")
    if 2 * space.dim > len(_PRIMES):
        raise ValueError(f"sampled certification supports dim <= {len(_PRIMES) // 2}")
    return box


def sample_box_points(
    space: EuclideanSpace, box, count: int, seed: int, pairs: bool
) -> list:
    """Deterministic sample of ``count`` points (or point pairs) from a box.

    Four fifths come from an unscrambled Halton sequence (prime bases, one
    per coordinate, pairs use 2*dim coordinates), the rest from a seeded
    PCG64 generator.  Identical arguments always produce identical samples.
    """
    box = _check_box(space, box)
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    n_random = count // 5
    n_halton = count - n_random
    ncoords = 2 * space.dim if pairs else space.dim
    out = []
    for k in range(1, n_halton + 1):
        coords = [
            box[j % space.dim][0]
            + (box[j % space.dim][1] - box[j % space.dim][0])
            * _radical_inverse(k, _PRIMES[j])
            for j in range(ncoords)
        ]
        out.append(coords)
    rng = np.random.default_rng(seed)
    lows = np.array([lo for lo, _ in box] * (2 if pairs else 1))
    highs = np.array([hi for _, hi in box] * (2 if pairs else 1))
    for _ in range(n_random):
        out.append(list(rng.uniform(lows, highs)))
    if pairs:
        return [
            (np.array(c[: space.dim]), np.array(c[space.dim :])) for c in out
        ]
    return [np.array(c) for c in out]


# ---------------------------------------------------------------------------
# Shared certification loops


def _render(space: Space, x) -> object:
    if isinstance(space, FiniteMetricSpace):
        return space.labels[x]
    return tuple(float(c) for c in np.asarray(x).reshape(-1))


def point_value(space: Space, pf: PointFunction, x) -> float:
    if isinstance(space, FiniteMetricSpace):
        if not isinstance(pf, TablePointFunction):
            raise ValueError("finite spaces need table point functions")
        if len(pf.values) != len(space):
            raise ValueError(
                f"point function covers {len(pf.values)} points, space has {len(space)}"
            )
        return pf.value(x)
    if not isinstance(pf, WeightedNormPointFunction):
        raise ValueError("Euclidean spaces need weighted-norm point functions")
    return pf.value(x)


def potential_value(space: Space, gamma: Potential, x, y) -> float:
    if isinstance(space, FiniteMetricSpace):
        if not isinstance(gamma, MatrixPotential):
            raise ValueError("finite spaces need matrix potentials")
        if gamma.values.shape[0] != len(space):
            raise ValueError(
                f"potential covers {gamma.values.shape[0]} points, space has {len(space)}"
            )
        return gamma.value(x, y)
    if not isinstance(gamma, WeightedNormsPotential):
        raise ValueError("Euclidean spaces need weighted-norms potentials")
    return gamma.value(x, y)


def _certify(
    space: Space,
    condition: str,
    checks: Callable,
    single_point: bool = False,
    sample_box=None,
    sample_count: int = 1000,
    seed: int = 0,
    depth: int | None = None,
) -> Certificate:
    """Run ``checks`` over every point/pair (finite) or sample (Euclidean).

    ``checks(x, y)`` (or ``checks(x)``) yields (lhs, rhs, depth) triples;
    the first triple with lhs > rhs + VALUE_TOL becomes the witness.
    """
    if isinstance(space, FiniteMetricSpace):
        order = space.label_order()
        candidates: Iterable = (
            ((x,) for x in order) if single_point else ((x, y) for x in order for y in order)
        )
        ok_status, count = "verified", None
    else:
        samples = sample_box_points(space, sample_box, sample_count, seed, pairs=not single_point)
        candidates = ((s,) for s in samples) if single_point else iter(samples)
        ok_status, count = "sampled_ok", sample_count
    for cand in candidates:
        for lhs, rhs, n in checks(*cand):
            if lhs > rhs + VALUE_TOL:
                witness = Witness(
                    x=_render(space, cand[0]),
                    y=None if single_point else _render(space, cand[1]),
                    lhs=lhs,
                    rhs=rhs,
                    depth=n,
                )
                return Certificate(condition, "violated", witness, count, depth)
    return Certificate(condition, ok_status, None, count, depth)


# ---------------------------------------------------------------------------
# Condition verifiers


def verify_caristi(
    space: Space,
    t_map: SelfMap,
    alpha: PointFunction,
    *,
    sample_box=None,
    sample_count: int = 1000,
    seed: int = 0,
) -> Certificate:
    """d(x, Tx) <= alpha(x) - alpha(Tx) for every point x."""

    def checks(x):
        tx = t_map(x)
        lhs = space.distance(x, tx)
        rhs = point_value(space, alpha, x) - point_value(space, alpha, tx)
        yield lhs, rhs, None

    return _certify(
        space, CARISTI, checks, single_point=True,
        sample_box=sample_box, sample_count=sample_count, seed=seed,
    )


def verify_bhakta_basu(
    space: Space,
    s_map: SelfMap,
    t_map: SelfMap,
    alpha: PointFunction,
    beta: PointFunction,
    *,
    sample_box=None,
    sample_count: int = 1000,
    seed: int = 0,
) -> Certificate:
    """d(Sx, Ty) <= alpha(x) - alpha(Sx) + beta(y) - beta(Ty) for all pairs."""

    def checks(x, y):
        sx, ty = s_map(x), t_map(y)
        lhs = space.distance(sx, ty)
        rhs = (
            point_value(space, alpha, x)
            - point_value(space, alpha, sx)
            + point_value(space, beta, y)
            - point_value(space, beta, ty)
        )
        yield lhs, rhs, None

    return _certify(
        space, BHAKTA_BASU, checks,
        sample_box=sample_box, sample_count=sample_count, seed=seed,
    )


def verify_dien(
    space: Space,
    s_map: SelfMap,
    t_map: SelfMap,
    q: float,
    alpha: PointFunction,
    *,
    sample_box=None,
    sample_count: int = 1000,
    seed: int = 0,
) -> Certificate:
    """d(Sx, Ty) <= q*d(x, y) + alpha(x) - alpha(Sx) + alpha(y) - alpha(Ty)."""
    if not (0.0 <= q < 1.0):
        raise ValueError(f"q must lie in [0, 1), got {q}")

    def checks(x, y):
        sx, ty = s_map(x), t_map(y)
        lhs = space.distance(sx, ty)
        rhs = (
            q * space.distance(x, y)
            + point_value(space, alpha, x)
            - point_value(space, alpha, sx)
            + point_value(space, alpha, y)
            - point_value(space, alpha, ty)
        )
        yield lhs, rhs, None

    return _certify(
        space, DIEN, checks,
        sample_box=sample_box, sample_count=sample_count, seed=seed,
    )


def verify_main(
    space: Space,
    s_map: SelfMap,
    t_map: SelfMap,
    phi: ComparisonFunction,
    gamma: Potential,
    *,
    sample_box=None,
    sample_count: int = 1000,
    seed: int = 0,
) -> Certificate:
    """d(Sx, Ty) <= phi(d(x, y)) + gamma(x, y) - gamma(Sx, Ty) for all pairs."""

    def checks(x, y):
        sx, ty = s_map(x), t_map(y)
        lhs = space.distance(sx, ty)
        rhs = (
            eval_phi(phi, space.distance(x, y))
            + potential_value(space, gamma, x, y)
            - potential_value(space, gamma, sx, ty)
        )
        yield lhs, rhs, None

    return _certify(
        space, MAIN, checks,
        sample_box=sample_box, sample_count=sample_count, seed=seed,
    )


def verify_sum_form(
    space: Space,
    s_map: SelfMap,
    t_map: SelfMap,
    phi: ComparisonFunction,
    gamma: Potential,
    n_depth: int,
    *,
    sample_box=None,
    sample_count: int = 1000,
    seed: int = 0,
) -> Certificate:
    """Truncated check of the summed condition up to depth ``n_depth``.

    For every pair (x, y) and every n in 1..n_depth:

        sum_{j=1..n} d(S^j x, T^j y)
            <= phi(sum_{j=0..n-1} d(S^j x, T^j y)) + gamma(x, y) - gamma(S^n x, T^n y)

    The certificate records the truncation depth; the full condition
    quantifies over all n >= 1 and no finite check closes that gap.
    """
    if n_depth < 1:
        raise ValueError(f"depth must be >= 1, got {n_depth}")

    def checks(x, y):
        gxy = potential_value(space, gamma, x, y)
        cx, cy = x, y
        d_cur = space.distance(cx, cy)
        head = 0.0  # sum of d over j = 1..n
        base = 0.0  # sum of d over j = 0..n-1
        for n in range(1, n_depth + 1):
            base += d_cur
            cx, cy = s_map(cx), t_map(cy)
            d_cur = space.distance(cx, cy)
            head += d_cur
            lhs = head
            rhs = eval_phi(phi, base) + gxy - potential_value(space, gamma, cx, cy)
            yield lhs, rhs, n

    return _certify(
        space, SUM_FORM, checks, depth=n_depth,
        sample_box=sample_box, sample_count=sample_count, seed=seed,
    )


# ---------------------------------------------------------------------------
# Reductions into the main condition


def dien_to_main(q: float, alpha: PointFunction) -> tuple[ComparisonFunction, Potential]:
    """Embed the q-contraction condition: phi(t) = q*t, gamma(x, y) = alpha(x) + alpha(y).

    Certifying the image against the main condition agrees with
    :func:`verify_dien` on status and witness for every instance.
    """
    if not (0.0 <= q < 1.0):
        raise ValueError(f"q must lie in [0, 1), got {q}")
    if isinstance(alpha, TablePointFunction):
        a = np.array(alpha.values, dtype=float)
        return Linear(q), MatrixPotential(values=a[:, None] + a[None, :])
    return Linear(q), WeightedNormsPotential(cx=alpha.c, cy=alpha.c)


def bhakta_to_main(
    alpha: PointFunction, beta: PointFunction
) -> tuple[ComparisonFunction, Potential]:
    """Embed the two-potential condition: phi = 0, gamma(x, y) = alpha(x) + beta(y)."""
    if isinstance(alpha, TablePointFunction) != isinstance(beta, TablePointFunction):
        raise ValueError("alpha and beta must be the same kind of point function")
    if isinstance(alpha, TablePointFunction):
        a = np.array(alpha.values, dtype=float)
        b = np.array(beta.values, dtype=float)
        if a.shape != b.shape:
            raise ValueError("alpha and beta must cover the same points")
        return Linear(0.0), MatrixPotential(values=a[:, None] + b[None, :])
    return Linear(0.0), WeightedNormsPotential(cx=alpha.c, cy=beta.c)
