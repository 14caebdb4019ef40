"""Minimal-potential synthesis on finite spaces.

The potential-difference condition rearranges to a per-pair constraint
gamma(p) >= e(p) + gamma(F(p)) with gamma >= 0, where e(x, y) =
d(Sx, Ty) - phi(d(x, y)) and F(x, y) = (Sx, Ty).  On a finite space F is
a functional graph, so feasibility is decidable: summing the constraint
around any F-cycle telescopes gamma away, leaving "cycle excess <= 0" as
a necessary condition, and when every cycle passes, the pointwise-minimal
solution is the max of prefix sums of e along each pair's forward orbit.

`synthesize_gamma` implements that directly; `minimality_oracle` is an
independent fixpoint-iteration cross-check for tiny spaces, used in tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certify import MatrixPotential
from .comparison import VALUE_TOL, ComparisonFunction, eval_phi
from .errors import UnsupportedSpaceError
from .space import FiniteMetricSpace, SelfMap


@dataclass(frozen=True)
class ExcessField:
    """Per-pair excess e and the coordinates of the pair successor map.

    The successor of (i, j) is (s_next[i], t_next[j]).
    """

    e: np.ndarray
    s_next: np.ndarray
    t_next: np.ndarray


@dataclass(frozen=True)
class SynthesisResult:
    """Either the minimal potential or one certifying bad cycle.

    When infeasible, ``cycle`` lists the labels of a genuine F-cycle whose
    excesses sum to ``cycle_excess_sum`` > 0; no nonnegative potential can
    absorb that around the loop.
    """

    feasible: bool
    gamma: MatrixPotential | None = None
    cycle: tuple[tuple[str, str], ...] | None = None
    cycle_excess_sum: float | None = None


def excess_field(
    space: FiniteMetricSpace, s_map: SelfMap, t_map: SelfMap, phi: ComparisonFunction
) -> ExcessField:
    """Tabulate e(x, y) = d(Sx, Ty) - phi(d(x, y)) and the successor map."""
    if not isinstance(space, FiniteMetricSpace):
        raise UnsupportedSpaceError("potential synthesis needs a finite space")
    n = len(space)
    s_next = np.array([s_map(i) for i in range(n)], dtype=np.intp)
    t_next = np.array([t_map(j) for j in range(n)], dtype=np.intp)
    e = np.empty((n, n), dtype=float)
    for i in range(n):
        for j in range(n):
            e[i, j] = space.distance(s_next[i], t_next[j]) - eval_phi(
                phi, space.distance(i, j)
            )
    e.setflags(write=False)
    s_next.setflags(write=False)
    t_next.setflags(write=False)
    return ExcessField(e=e, s_next=s_next, t_next=t_next)


def _walk_to_cycle(field: ExcessField, start: tuple[int, int]):
    """Follow the successor map from ``start`` until a pair repeats.

    Returns (path, tail, cycle_len): path[tail : tail + cycle_len] is the
    cycle, entered after ``tail`` steps.
    """
    seen: dict[tuple[int, int], int] = {}
    path: list[tuple[int, int]] = []
    cur = start
    while cur not in seen:
        seen[cur] = len(path)
        path.append(cur)
        cur = (int(field.s_next[cur[0]]), int(field.t_next[cur[1]]))
    tail = seen[cur]
    return path, tail, len(path) - tail


def synthesize_gamma(
    space: FiniteMetricSpace, s_map: SelfMap, t_map: SelfMap, phi: ComparisonFunction
) -> SynthesisResult:
    """Pointwise-minimal nonnegative potential, or a positive-excess cycle.

    Pairs are scanned in label-lexicographic order, so the infeasibility
    witness is deterministic: the first bad cycle reached, rotated to start
    at its label-least pair.  When feasible, gamma*(p) is the max over
    n >= 0 of the sum of e over the first n steps of p's orbit; cycle sums
    <= 0 make the max settle within tail + 2*cycle steps.
    """
    field = excess_field(space, s_map, t_map, phi)
    order = space.label_order()
    checked: set[frozenset] = set()
    walks: dict[tuple[int, int], tuple[list, int, int]] = {}
    for i in order:
        for j in order:
            path, tail, cycle_len = _walk_to_cycle(field, (i, j))
            walks[(i, j)] = (path, tail, cycle_len)
            cycle = path[tail:]
            key = frozenset(cycle)
            if key in checked:
                continue
            checked.add(key)
            excess_sum = float(sum(field.e[p] for p in cycle))
            if excess_sum > VALUE_TOL:
                lex = min(
                    range(cycle_len),
                    key=lambda k: (space.labels[cycle[k][0]], space.labels[cycle[k][1]]),
                )
                rotated = cycle[lex:] + cycle[:lex]
                return SynthesisResult(
                    feasible=False,
                    cycle=tuple(
                        (space.labels[x], space.labels[y]) for x, y in rotated
                    ),
                    cycle_excess_sum=excess_sum,
                )
    n = len(space)
    gamma = np.zeros((n, n), dtype=float)
    for (i, j), (path, tail, cycle_len) in walks.items():
        horizon = tail + 2 * cycle_len
        cur = (i, j)
        best = 0.0
        running = 0.0
        for _ in range(horizon):
            running += field.e[cur]
            if running > best:
                best = running
            cur = (int(field.s_next[cur[0]]), int(field.t_next[cur[1]]))
        gamma[i, j] = best
    return SynthesisResult(feasible=True, gamma=MatrixPotential(values=gamma))


def minimality_oracle(
    space: FiniteMetricSpace, s_map: SelfMap, t_map: SelfMap, phi: ComparisonFunction
) -> MatrixPotential | None:
    """Reference solver: iterate gamma <- max(0, e + gamma o F) from zero.

    Converges to the minimal solution exactly (the m-th iterate is the max
    of prefix sums up to length m); a positive-excess cycle instead drives
    values past the divergence bound |X|^2 * max|e| * (|X|^2 + 1), which is
    reported as infeasibility (None).  Guarded to |X| <= 4: this is a test
    oracle, not the production path.
    """
    if len(space) > 4:
        raise ValueError("minimality oracle is limited to spaces with at most 4 points")
    field = excess_field(space, s_map, t_map, phi)
    n = len(space)
    bound = n * n * float(np.max(np.abs(field.e))) * (n * n + 1)
    gamma = np.zeros((n, n), dtype=float)
    while True:
        stepped = gamma[field.s_next[:, None], field.t_next[None, :]]
        new = np.maximum(0.0, field.e + stepped)
        if np.array_equal(new, gamma):
            return MatrixPotential(values=gamma)
        if float(new.max()) > bound:
            return None
        gamma = new
