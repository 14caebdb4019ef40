"""Regressive comparison functions, their complements, and level-set bounds.

A comparison function phi maps [0, inf) to itself with phi(0) = 0 and
phi(t) < t for t > 0.  Its complement is psi(t) = t - phi(t).  When phi is
super-additive and psi is coercive (psi -> inf), the level-set supremum
g(r) = sup{t >= 0 : psi(t) <= r} is finite and bounds every partial sum of
any sequence contracted through phi (see :func:`lemma1_bound`).

Three finite representations are supported:

* ``Linear``    -- phi(t) = q*t for q in [0, 1)
* ``Staircase`` -- phi(t) = t * r[n] on the piece [t[n], t[n+1])
* ``Table``     -- piecewise-linear interpolant through knot/value pairs

Staircase and Table functions are defined only up to their last knot; any
query beyond that raises :class:`~fixpair.errors.DomainExceededError`
rather than extrapolating, since silent extrapolation could fabricate
coercivity.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

from .errors import (
    DomainExceededError,
    InsufficientCoverageError,
    InvalidKnotsError,
    NonCoerciveEvidenceError,
    PropertyNotExactError,
)

# Absolute tolerances: single function values vs. sums accumulated over up
# to 1e4 terms of double-precision arithmetic.
VALUE_TOL = 1e-12
SUM_TOL = 1e-9


@dataclass(frozen=True)
class Linear:
    """phi(t) = q*t with contraction factor q in [0, 1)."""

    q: float

    def __post_init__(self):
        if not (0.0 <= self.q < 1.0) or not math.isfinite(self.q):
            raise ValueError(f"linear factor must lie in [0, 1), got {self.q}")


@dataclass(frozen=True)
class Staircase:
    """phi(t) = t * r[n] on the half-open piece [t[n], t[n+1]).

    ``t`` holds the knots (t[0] = 0, later knots > 1, strictly ascending)
    and ``r`` one level per piece, each in (0, 1).  ``sqrt_t`` is populated
    by :func:`build_staircase`; when present, psi on piece n is evaluated as
    t / sqrt_t[n+1] so the identity psi(t) = t / sqrt(t[n+1]) is preserved
    to the last bit.
    """

    t: tuple[float, ...]
    r: tuple[float, ...]
    sqrt_t: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(float(x) for x in self.t))
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        if len(self.t) < 2:
            raise InvalidKnotsError("staircase needs at least knots [0, t1]")
        if self.t[0] != 0.0:
            raise InvalidKnotsError(f"first knot must be 0, got {self.t[0]}")
        if any(b <= a for a, b in zip(self.t, self.t[1:])):
            raise InvalidKnotsError(f"knots not strictly ascending: {list(self.t)}")
        if any(x <= 1.0 for x in self.t[1:]):
            raise InvalidKnotsError(f"knots after 0 must exceed 1: {list(self.t)}")
        if len(self.r) != len(self.t) - 1:
            raise InvalidKnotsError(
                f"need one level per piece: {len(self.t) - 1} pieces, {len(self.r)} levels"
            )
        if any(not (0.0 < x < 1.0) for x in self.r):
            raise InvalidKnotsError(f"levels must lie in (0, 1): {list(self.r)}")
        if self.sqrt_t is not None:
            object.__setattr__(self, "sqrt_t", tuple(float(x) for x in self.sqrt_t))

    def piece(self, t: float) -> int:
        """Index n with t in [t[n], t[n+1]); raises beyond the last knot."""
        if t < 0.0:
            raise ValueError(f"argument must be nonnegative, got {t}")
        if t >= self.t[-1]:
            raise DomainExceededError(
                f"t={t} is outside the covered range [0, {self.t[-1]}); extend the staircase"
            )
        return bisect_right(self.t, t) - 1

    def psi_slope(self, n: int) -> float:
        """Slope of psi on piece n (1 - r[n])."""
        if self.sqrt_t is not None:
            return 1.0 / self.sqrt_t[n + 1]
        return 1.0 - self.r[n]


@dataclass(frozen=True)
class Table:
    """Piecewise-linear interpolant through (knot, value) pairs."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "knots", tuple(float(x) for x in self.knots))
        object.__setattr__(self, "values", tuple(float(x) for x in self.values))
        if len(self.knots) < 2 or len(self.knots) != len(self.values):
            raise ValueError("table needs equally many knots and values, at least 2")
        if self.knots[0] != 0.0:
            raise ValueError(f"first knot must be 0, got {self.knots[0]}")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError(f"knots not strictly ascending: {list(self.knots)}")
        if self.values[0] != 0.0:
            raise ValueError("value at knot 0 must be 0")
        if any(v < 0.0 or not math.isfinite(v) for v in self.values):
            raise ValueError("values must be finite and nonnegative")


ComparisonFunction = Union[Linear, Staircase, Table]


class PropertyWitness(NamedTuple):
    """Point(s) where a checked property fails, with both sides evaluated."""

    t: float
    s: float | None
    lhs: float
    rhs: float


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a structural property check.

    ``exact_pass`` is analytic (closed form or construction), ``grid_pass``
    is evidence on the supplied finite grid only, never a proof.
    """

    property: str
    status: str  # exact_pass | grid_pass | violated
    witness: PropertyWitness | None = None
    evidence: dict | None = None


class B03Check(NamedTuple):
    ok: bool
    first_failure: int | None


@dataclass(frozen=True)
class SeriesBoundInput:
    """Initial term theta0 and initial potential delta0 of a contracted sequence."""

    theta0: float
    delta0: float

    def __post_init__(self):
        for name, v in (("theta0", self.theta0), ("delta0", self.delta0)):
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v}")


def eval_phi(f: ComparisonFunction, t: float) -> float:
    """Value of the comparison function at t >= 0.

    Raises DomainExceededError for staircase/table queries beyond the last
    knot (the half-open last piece excludes its right endpoint).
    """
    if t < 0.0:
        raise ValueError(f"argument must be nonnegative, got {t}")
    if isinstance(f, Linear):
        return f.q * t
    if isinstance(f, Staircase):
        if t == 0.0:
            return 0.0
        return t * f.r[f.piece(t)]
    if t > f.knots[-1]:
        raise DomainExceededError(
            f"t={t} is outside the covered range [0, {f.knots[-1]}]; extend the table"
        )
    i = min(bisect_right(f.knots, t), len(f.knots) - 1) - 1
    a, b = f.knots[i], f.knots[i + 1]
    va, vb = f.values[i], f.values[i + 1]
    return va + (vb - va) * (t - a) / (b - a)


def eval_psi(f: ComparisonFunction, t: float) -> float:
    """Complement value t - phi(t); 0 at 0 and in (0, t] for t > 0."""
    if isinstance(f, Staircase):
        if t < 0.0:
            raise ValueError(f"argument must be nonnegative, got {t}")
        if t == 0.0:
            return 0.0
        n = f.piece(t)
        if f.sqrt_t is not None:
            return t / f.sqrt_t[n + 1]
        return t * (1.0 - f.r[n])
    return t - eval_phi(f, t)


def compute_g(f: ComparisonFunction, r: float) -> float:
    """Level-set supremum g(r) = sup{t >= 0 : psi(t) <= r}.

    Linear uses the closed form r / (1 - q).  For staircases psi is linear
    with positive slope on each piece but jumps downward at piece
    boundaries, so the level set is a finite union of intervals: the result
    is the maximum over all pieces whose minimum psi value t[n]*(1 - r[n])
    is <= r of min(r / (1 - r[n]), right endpoint).  Table segments are
    scanned analogously (psi may decrease inside a segment).

    Raises InsufficientCoverageError when the last piece still admits
    psi <= r at its right edge (the supremum may lie beyond coverage) and
    NonCoerciveEvidenceError when r is at or above the supremum of psi over
    the whole covered range.
    """
    if r < 0.0:
        raise ValueError(f"level must be nonnegative, got {r}")
    if isinstance(f, Linear):
        return r / (1.0 - f.q)

    if isinstance(f, Staircase):
        slopes = [f.psi_slope(n) for n in range(len(f.r))]
        right_limits = [f.t[n + 1] * slopes[n] for n in range(len(f.r))]
        if r >= right_limits[-1]:
            if r >= max(right_limits):
                raise NonCoerciveEvidenceError(
                    f"psi stays below {max(right_limits)} on the covered range; "
                    f"cannot bound the level set for r={r}"
                )
            raise InsufficientCoverageError(
                f"level set for r={r} reaches the right edge of coverage "
                f"(last piece ends at {f.t[-1]}); extend the staircase"
            )
        best = 0.0
        for n, slope in enumerate(slopes):
            if f.t[n] * slope <= r:
                if f.sqrt_t is not None:
                    cand = min(r * f.sqrt_t[n + 1], f.t[n + 1])
                else:
                    cand = min(r / slope, f.t[n + 1])
                best = max(best, cand)
        return best

    psis = [k - v for k, v in zip(f.knots, f.values)]
    if psis[-1] <= r:
        if r >= max(psis):
            raise NonCoerciveEvidenceError(
                f"psi stays within {max(psis)} on the covered range; "
                f"cannot bound the level set for r={r}"
            )
        raise InsufficientCoverageError(
            f"level set for r={r} reaches the right edge of coverage "
            f"(table ends at {f.knots[-1]}); extend the table"
        )
    best = 0.0
    for i in range(len(f.knots) - 1):
        pa, pb = psis[i], psis[i + 1]
        if pa > r and pb > r:
            continue
        if pb <= r:
            cand = f.knots[i + 1]
        else:  # pa <= r < pb: psi crosses the level inside the segment
            cand = f.knots[i] + (r - pa) * (f.knots[i + 1] - f.knots[i]) / (pb - pa)
        best = max(best, cand)
    return best


def build_staircase(t_seq: Sequence[float]) -> Staircase:
    """Staircase with levels r[n] = 1 - 1/sqrt(t[n+1]) derived from the knots.

    Knots must be strictly ascending with t[0] = 0 and every later knot > 1;
    the resulting levels are then strictly ascending in (0, 1), and on each
    piece psi(t) equals t / sqrt(t[n+1]) exactly.
    """
    t = tuple(float(x) for x in t_seq)
    if len(t) < 2 or t[0] != 0.0 or any(b <= a for a, b in zip(t, t[1:])) or any(
        x <= 1.0 for x in t[1:]
    ):
        raise InvalidKnotsError(
            f"knots must be strictly ascending, start at 0, and exceed 1 afterwards: {list(t)}"
        )
    sqrt_t = (0.0,) + tuple(math.sqrt(x) for x in t[1:])
    r = tuple(1.0 - 1.0 / s for s in sqrt_t[1:])
    return Staircase(t=t, r=r, sqrt_t=sqrt_t)


def _is_c06_staircase(f: Staircase) -> bool:
    """True when the levels match 1 - 1/sqrt(knot) within VALUE_TOL."""
    return all(
        abs(f.r[n] - (1.0 - 1.0 / math.sqrt(f.t[n + 1]))) <= VALUE_TOL
        for n in range(len(f.r))
    )


def piece_lower_bounds(f: Staircase) -> list[float]:
    """Per-piece lower bounds of psi: t[n] * (1 - r[n]) for each piece n.

    For knot-derived staircases this is t[n] / sqrt(t[n+1]), the quantity
    whose growth certifies coercivity.
    """
    return [f.t[n] * f.psi_slope(n) for n in range(len(f.r))]


def superadditivity_exact(f: ComparisonFunction) -> bool:
    """Analytic super-additivity: linear, or staircase with nondecreasing levels.

    For a staircase with nondecreasing levels, phi(t) = t * chi(t) with chi
    nonnegative and increasing, so
    phi(t+s) = (t+s) chi(t+s) >= t chi(t) + s chi(s).
    """
    if isinstance(f, Linear):
        return True
    if isinstance(f, Staircase):
        return all(b >= a for a, b in zip(f.r, f.r[1:]))
    return False


def coercivity_exact(f: ComparisonFunction) -> bool:
    """Analytic coercivity evidence: linear, or knot-derived staircase whose
    per-piece lower bounds are strictly increasing.

    A finite knot list can only show the increasing trend of the bounds;
    the asymptotic claim remains with the caller.  Level-set queries stay
    sound regardless: compute_g errors out instead of extrapolating.
    """
    if isinstance(f, Linear):
        return True
    if isinstance(f, Staircase) and _is_c06_staircase(f):
        bounds = piece_lower_bounds(f)
        return all(b > a for a, b in zip(bounds, bounds[1:]))
    return False


def check_regressive(f: ComparisonFunction, grid: Sequence[float]) -> PropertyReport:
    """Check phi(t) < t for t > 0.

    Exact for Linear (q < 1) and Staircase (all levels < 1) by
    construction.  Tables are checked at their knots plus the supplied grid
    points (grid points beyond coverage are ignored); since phi and the
    identity are both linear between knots, the knots alone decide each
    segment, but status is still reported as grid evidence.
    """
    if not grid or any(x <= 0.0 for x in grid):
        raise ValueError("grid must be nonempty with positive entries")
    if isinstance(f, (Linear, Staircase)):
        return PropertyReport("regressive", "exact_pass")
    points = sorted(
        {x for x in grid if x <= f.knots[-1]} | {k for k in f.knots if k > 0.0}
    )
    for t in points:
        val = eval_phi(f, t)
        if val >= t:
            return PropertyReport(
                "regressive", "violated", PropertyWitness(t, None, val, t)
            )
    return PropertyReport("regressive", "grid_pass")


def check_superadditive(f: ComparisonFunction, grid: Sequence[float]) -> PropertyReport:
    """Check phi(t+s) >= phi(t) + phi(s) over all grid pairs.

    Exact for Linear (equality) and for staircases with nondecreasing
    levels.  Otherwise every (t, s) grid pair is evaluated; a pair whose
    sum leaves coverage raises DomainExceededError.
    """
    if not grid:
        raise ValueError("grid must be nonempty")
    if superadditivity_exact(f):
        return PropertyReport("super_additive", "exact_pass")
    points = sorted(set(grid))
    for t in points:
        for s in points:
            lhs = eval_phi(f, t + s)
            rhs = eval_phi(f, t) + eval_phi(f, s)
            if lhs < rhs - VALUE_TOL:
                return PropertyReport(
                    "super_additive", "violated", PropertyWitness(t, s, lhs, rhs)
                )
    return PropertyReport("super_additive", "grid_pass")


def check_coercive(f: ComparisonFunction, thresholds: Sequence[float]) -> PropertyReport:
    """Report evidence that psi(t) = t - phi(t) grows without bound.

    Linear passes exactly (psi has slope 1 - q > 0).  A knot-derived
    staircase passes exactly when its per-piece lower bounds
    t[n]/sqrt(t[n+1]) are strictly increasing and the last one exceeds the
    largest threshold; otherwise the achieved bounds are reported as grid
    evidence.  Tables only ever yield grid evidence (the supremum of psi
    over coverage).  A numerical check can never prove coercivity, so
    grid_pass records evidence, not proof.
    """
    if not thresholds or any(x <= 0.0 for x in thresholds):
        raise ValueError("thresholds must be nonempty with positive entries")
    top = max(thresholds)
    if isinstance(f, Linear):
        return PropertyReport(
            "complementary_coercive", "exact_pass", evidence={"psi_slope": 1.0 - f.q}
        )
    if isinstance(f, Staircase):
        bounds = piece_lower_bounds(f)
        increasing = all(b > a for a, b in zip(bounds, bounds[1:]))
        evidence = {
            "piece_lower_bounds": bounds,
            "knot_derived": _is_c06_staircase(f),
            "strictly_increasing": increasing,
            "exceeds_thresholds": bounds[-1] > top,
        }
        if evidence["knot_derived"] and increasing and bounds[-1] > top:
            return PropertyReport("complementary_coercive", "exact_pass", evidence=evidence)
        return PropertyReport("complementary_coercive", "grid_pass", evidence=evidence)
    psi_sup = max(k - v for k, v in zip(f.knots, f.values))
    return PropertyReport(
        "complementary_coercive",
        "grid_pass",
        evidence={"psi_sup": psi_sup, "exceeds_thresholds": psi_sup > top},
    )


def lemma1_bound(f: ComparisonFunction, inp: SeriesBoundInput) -> float:
    """Uniform bound g(theta0 + delta0) on all partial sums of a contracted sequence.

    Any nonnegative sequences (theta_n), (delta_n) with
    theta_{m+1} <= phi(theta_m) + delta_m - delta_{m+1} for every m have all
    partial sums of theta bounded by this value.  Requires phi to carry
    exact super-additivity and coercivity status; refusal is an error, an
    unsound number is never returned.
    """
    if not superadditivity_exact(f):
        raise PropertyNotExactError(
            "series bound needs exact super-additivity (linear, or staircase "
            "with nondecreasing levels)"
        )
    if not coercivity_exact(f):
        raise PropertyNotExactError(
            "series bound needs exact coercivity evidence (linear, or "
            "knot-derived staircase with increasing piece bounds)"
        )
    return compute_g(f, inp.theta0 + inp.delta0)


def check_b03_sequence(
    f: ComparisonFunction, theta: Sequence[float], delta: Sequence[float]
) -> B03Check:
    """Check theta[m+1] <= phi(theta[m]) + delta[m] - delta[m+1] for every m.

    Returns the first failing index when the inequality breaks.
    """
    if len(theta) != len(delta):
        raise ValueError(f"length mismatch: {len(theta)} thetas vs {len(delta)} deltas")
    if len(theta) < 2:
        raise ValueError("sequences need at least 2 entries")
    if any(x < 0.0 for x in theta) or any(x < 0.0 for x in delta):
        raise ValueError("entries must be nonnegative")
    for m in range(len(theta) - 1):
        if theta[m + 1] > eval_phi(f, theta[m]) + delta[m] - delta[m + 1] + VALUE_TOL:
            return B03Check(False, m)
    return B03Check(True, None)
