"""Fixed-point solvers and a-priori bounds.

Dual Picard iteration runs both orbits x -> Sx and y -> Ty side by side
and stops once the successive-step gaps and the cross distance are all
within tolerance; checking a single orbit can stop at a point the other
map does not fix.  Non-convergence within the iteration budget is a
reported outcome, not an error: the solver stays usable on instances
whose hypotheses fail.

The a-priori bound g(d(x0, y0) + gamma(x0, y0)) dominates every partial
sum of the cross-distance series, but only under exact structural
properties of phi; the function refuses to emit a number it cannot back.
"""

from __future__ import annotations

from dataclasses import dataclass

from .certify import CARISTI, Certificate, PointFunction, Potential, point_value, potential_value
from .comparison import (
    ComparisonFunction,
    coercivity_exact,
    compute_g,
    superadditivity_exact,
)
from .errors import (
    CertificateMissingError,
    FixpairError,
    PropertyNotExactError,
    UnsupportedSpaceError,
)
from .space import FiniteMetricSpace, SelfMap, Space

TRACE_CAP = 10**4


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a dual iteration run.

    ``z`` and ``w`` are the final S- and T-orbit points; ``coincide`` is
    True only when the stopping rule fired, in which case all three
    residuals are within the tolerance that was used.
    """

    z: object
    w: object
    coincide: bool
    iterations: int
    residual_S: float
    residual_T: float
    cross_residual: float
    apriori_bound: float | None = None
    trace: tuple | None = None


@dataclass(frozen=True)
class SeriesTrace:
    """Terms d(S^n x0, T^n y0) and their running partial sums."""

    terms: tuple[float, ...]
    partial_sums: tuple[float, ...]


def dual_iterate(
    space: Space,
    s_map: SelfMap,
    t_map: SelfMap,
    x0,
    y0,
    tol: float,
    max_iter: int,
    *,
    record_trace: bool = False,
) -> SolveReport:
    """Iterate x -> Sx and y -> Ty until both orbits settle on one point.

    Stops at the first n with max(d(x_n, x_{n+1}), d(y_n, y_{n+1}),
    d(x_n, y_n)) <= tol and reports z = x_n, w = y_n; the residuals are
    exactly the three quantities tested.  On finite spaces with tol below
    the least positive distance this fires precisely when both orbits are
    constant and equal, so residuals come out exactly zero.  The optional
    trace keeps the first 10^4 entries (n, x_n, y_n, d(x_n, y_n)).
    """
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"iteration budget must be >= 1, got {max_iter}")
    x, y = x0, y0
    trace: list | None = [] if record_trace else None
    for n in range(max_iter):
        cross = space.distance(x, y)
        if trace is not None and n < TRACE_CAP:
            trace.append((n, x, y, cross))
        x_next, y_next = s_map(x), t_map(y)
        step_s = space.distance(x, x_next)
        step_t = space.distance(y, y_next)
        if max(step_s, step_t, cross) <= tol:
            return SolveReport(
                z=x,
                w=y,
                coincide=True,
                iterations=n,
                residual_S=step_s,
                residual_T=step_t,
                cross_residual=cross,
                trace=tuple(trace) if trace is not None else None,
            )
        x, y = x_next, y_next
    cross = space.distance(x, y)
    if trace is not None and max_iter < TRACE_CAP:
        trace.append((max_iter, x, y, cross))
    return SolveReport(
        z=x,
        w=y,
        coincide=False,
        iterations=max_iter,
        residual_S=space.distance(x, s_map(x)),
        residual_T=space.distance(y, t_map(y)),
        cross_residual=cross,
        trace=tuple(trace) if trace is not None else None,
    )


def apriori_bound(
    phi: ComparisonFunction,
    gamma: Potential,
    space: Space,
    x0,
    y0,
    *,
    sum_form_certified: bool = False,
) -> float:
    """Bound on every partial sum of sum_n d(S^n x0, T^n y0).

    Returns g(d(x0, y0) + gamma(x0, y0)).  Sound under a certified
    potential-difference condition when phi is exactly super-additive and
    complementary coercive; a certified summed condition carries the same
    bound without super-additivity, which ``sum_form_certified`` asserts.
    Refuses with PropertyNotExactError otherwise: a bound that might be
    wrong is worse than none.
    """
    if not coercivity_exact(phi):
        raise PropertyNotExactError(
            "a-priori bound needs exact complementary coercivity for this phi"
        )
    if not sum_form_certified and not superadditivity_exact(phi):
        raise PropertyNotExactError(
            "a-priori bound needs exact super-additivity (or a certified sum form)"
        )
    theta0 = space.distance(x0, y0)
    return compute_g(phi, theta0 + potential_value(space, gamma, x0, y0))


def series_trace(
    space: Space, s_map: SelfMap, t_map: SelfMap, x0, y0, n_terms: int
) -> SeriesTrace:
    """First ``n_terms`` cross distances along the dual orbits, with sums."""
    if n_terms < 1:
        raise ValueError(f"need at least one term, got {n_terms}")
    x, y = x0, y0
    terms, sums = [], []
    total = 0.0
    for _ in range(n_terms):
        d = space.distance(x, y)
        terms.append(d)
        total += d
        sums.append(total)
        x, y = s_map(x), t_map(y)
    return SeriesTrace(terms=tuple(terms), partial_sums=tuple(sums))


def caristi_descent(
    space: FiniteMetricSpace,
    t_map: SelfMap,
    alpha: PointFunction,
    x0: int,
    certificate: Certificate | None = None,
) -> int:
    """Follow x -> Tx to the first fixed point, in at most |X| steps.

    The single-potential condition makes alpha non-increasing along the
    orbit, and constant (hence step distance zero) once the orbit cycles,
    so the first repeated point is fixed.  Refuses to run without a
    verified certificate for that condition: on a violated instance the
    descent argument is unsound.
    """
    if not isinstance(space, FiniteMetricSpace):
        raise UnsupportedSpaceError("descent needs a finite space")
    if certificate is None or certificate.condition != CARISTI or certificate.status != "verified":
        raise CertificateMissingError(
            "descent requires a verified single-potential certificate"
        )
    point_value(space, alpha, x0)  # validates alpha covers the space
    x = x0
    for _ in range(len(space)):
        nxt = t_map(x)
        if nxt == x:
            return x
        x = nxt
    if t_map(x) == x:
        return x
    raise FixpairError("orbit did not reach a fixed point within |X| steps")


def common_fixed_points_bruteforce(
    space: FiniteMetricSpace, s_map: SelfMap, t_map: SelfMap
) -> tuple[int, ...]:
    """Exact set {z : Sz = z and Tz = z} by full scan, in label order."""
    if not isinstance(space, FiniteMetricSpace):
        raise UnsupportedSpaceError("brute-force scan needs a finite space")
    return tuple(
        z for z in space.label_order() if s_map(z) == z and t_map(z) == z
    )
