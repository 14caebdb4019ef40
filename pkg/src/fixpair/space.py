"""Metric-space instances, selfmaps, orbits, and product-orbit cycle structure.

Two kinds of complete spaces are supported: finite spaces given by a
distance matrix (points are indices, labels are for reporting) and
Euclidean spaces of fixed dimension.  Selfmaps are lookup tables on finite
spaces and affine maps x -> A x + b on Euclidean spaces; affine maps are
continuous, so orbital continuity (Uz = lim U^(i(n)+1) x whenever
z = lim U^(i(n)) x) holds analytically, and on a finite space every
selfmap is orbitally continuous because convergent sequences are
eventually constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import UnsupportedSpaceError


class MetricViolation(NamedTuple):
    """First failing metric axiom with its lexicographically smallest witness."""

    kind: str  # identity | symmetry | positivity | triangle
    indices: tuple[int, ...]


def validate_metric(dist) -> MetricViolation | None:
    """Check the four metric axioms on a square matrix; None means all hold.

    Axioms are checked in the order identity, symmetry, positivity,
    triangle, each scanned lexicographically, so the reported witness is
    deterministic.  The triangle witness (i, j, k) means
    dist[i][j] > dist[i][k] + dist[k][j].
    """
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    for i in range(n):
        if d[i, i] != 0.0:
            return MetricViolation("identity", (i,))
    for i in range(n):
        for j in range(n):
            if d[i, j] != d[j, i]:
                return MetricViolation("symmetry", (i, j))
    for i in range(n):
        for j in range(n):
            if i != j and d[i, j] <= 0.0:
                return MetricViolation("positivity", (i, j))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i, j] > d[i, k] + d[k, j]:
                    return MetricViolation("triangle", (i, j, k))
    return None


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Finite metric space over labelled points with an explicit distance matrix."""

    labels: tuple[str, ...]
    dist: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "dist", np.array(self.dist, dtype=float))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("point labels must be distinct")
        if self.dist.shape != (len(self.labels), len(self.labels)):
            raise ValueError(
                f"distance matrix shape {self.dist.shape} does not match "
                f"{len(self.labels)} points"
            )
        violation = validate_metric(self.dist)
        if violation is not None:
            raise ValueError(f"not a metric: {violation.kind} fails at {violation.indices}")
        self.dist.setflags(write=False)

    def __len__(self) -> int:
        return len(self.labels)

    def distance(self, x: int, y: int) -> float:
        return float(self.dist[x, y])

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown point label {label!r}") from None

    def label_order(self) -> list[int]:
        """Point indices sorted by label; the canonical witness-scan order."""
        return sorted(range(len(self.labels)), key=lambda i: self.labels[i])


@dataclass(frozen=True)
class EuclideanSpace:
    """R^dim with the Euclidean norm of the difference as metric."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")

    def distance(self, x, y) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))

    def point(self, coords) -> np.ndarray:
        p = np.asarray(coords, dtype=float).reshape(-1)
        if p.shape != (self.dim,):
            raise ValueError(f"point has {p.size} coordinates, space has dim {self.dim}")
        return p


Space = Union[FiniteMetricSpace, EuclideanSpace]


@dataclass(frozen=True)
class TableMap:
    """Selfmap of a finite space given by the image index of every point."""

    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(i) for i in self.image))
        n = len(self.image)
        if any(not (0 <= i < n) for i in self.image):
            raise ValueError(f"image indices out of range for {n} points: {list(self.image)}")

    def __call__(self, x: int) -> int:
        return self.image[x]


@dataclass(frozen=True)
class AffineMap:
    """Selfmap x -> A x + b of a Euclidean space."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        b = np.array(self.b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
            raise ValueError(f"inconsistent affine shapes A{A.shape}, b{b.shape}")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def __call__(self, x) -> np.ndarray:
        return self.A @ np.asarray(x, dtype=float) + self.b


SelfMap = Union[TableMap, AffineMap]


@dataclass(frozen=True)
class Orbit:
    """Iterates of a single point; cycle structure is known on finite spaces."""

    points: tuple
    tail_length: int | None = None
    cycle_length: int | None = None


@dataclass(frozen=True)
class ProductOrbit:
    """Orbit of (x, y) under (x, y) -> (Sx, Ty) on a finite space.

    ``pairs`` has tail_length + cycle_length + 1 entries; the last entry
    repeats pairs[tail_length], closing the cycle.
    """

    pairs: tuple[tuple[int, int], ...]
    tail_length: int
    cycle_length: int


def orbit(space: Space, u: SelfMap, x0, n_max: int) -> Orbit:
    """Iterate u from x0.

    On a finite space the walk stops at the first repeated state (or after
    n_max steps) and reports tail and cycle lengths; on a Euclidean space it
    returns the n_max + 1 iterates with no cycle information.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if isinstance(space, EuclideanSpace):
        pts = [space.point(x0)]
        for _ in range(n_max):
            pts.append(u(pts[-1]))
        return Orbit(points=tuple(pts))
    x = int(x0)
    seen = {x: 0}
    pts = [x]
    for step in range(1, n_max + 1):
        x = u(x)
        if x in seen:
            tail = seen[x]
            return Orbit(points=tuple(pts), tail_length=tail, cycle_length=step - tail)
        seen[x] = step
        pts.append(x)
    return Orbit(points=tuple(pts))


def product_orbit(
    space: FiniteMetricSpace, s: SelfMap, t: SelfMap, x0: int, y0: int
) -> ProductOrbit:
    """Tail/cycle decomposition of the paired orbit (x, y) -> (Sx, Ty).

    Visits at most |X|^2 distinct states; only defined on finite spaces
    (cycle detection has no meaning on a continuum).
    """
    if not isinstance(space, FiniteMetricSpace):
        raise UnsupportedSpaceError("product orbits need a finite space")
    state = (int(x0), int(y0))
    seen = {state: 0}
    pairs = [state]
    while True:
        state = (s(state[0]), t(state[1]))
        pairs.append(state)
        if state in seen:
            tail = seen[state]
            return ProductOrbit(
                pairs=tuple(pairs), tail_length=tail, cycle_length=len(pairs) - 1 - tail
            )
        seen[state] = len(pairs) - 1


def identity_map(space: FiniteMetricSpace) -> TableMap:
    return TableMap(image=tuple(range(len(space))))
