"""Spaces, metric validation, selfmaps, and orbit decomposition."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixpair.errors import UnsupportedSpaceError
from fixpair.space import (
    AffineMap,
    EuclideanSpace,
    FiniteMetricSpace,
    MetricViolation,
    TableMap,
    identity_map,
    orbit,
    product_orbit,
    validate_metric,
)


def two_point_space():
    return FiniteMetricSpace(labels=("a", "b"), dist=np.array([[0.0, 1.0], [1.0, 0.0]]))


def three_point_space():
    d = np.array([[0.0, 1.0, 1.5], [1.0, 0.0, 1.2], [1.5, 1.2, 0.0]])
    return FiniteMetricSpace(labels=("a", "b", "c"), dist=d)


class TestValidateMetric:
    def test_two_point_ok(self):
        assert validate_metric([[0, 1], [1, 0]]) is None

    def test_symmetry_witness(self):
        assert validate_metric([[0, 1], [2, 0]]) == MetricViolation("symmetry", (0, 1))

    def test_triangle_witness(self):
        # oracle: triple loop; 3 = d[0][2] > d[0][1] + d[1][2] = 2
        got = validate_metric([[0, 1, 3], [1, 0, 1], [3, 1, 0]])
        assert got == MetricViolation("triangle", (0, 2, 1))

    def test_identity_and_positivity(self):
        assert validate_metric([[1.0]]) == MetricViolation("identity", (0,))
        assert validate_metric([[0, 0], [0, 0]]) == MetricViolation("positivity", (0, 1))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            validate_metric([[0, 1, 2], [1, 0, 1]])

    @settings(max_examples=100)
    @given(
        st.integers(min_value=2, max_value=7),
        st.integers(min_value=0, max_value=10**6),
    )
    def test_euclidean_point_sets_always_pass(self, n, seed):
        # generator soundness: exact pairwise distances form a metric
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-5.0, 5.0, size=(n, 3))
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        assert validate_metric(d) is None


class TestSpaces:
    def test_finite_space_accessors(self):
        sp = two_point_space()
        assert len(sp) == 2
        assert sp.distance(0, 1) == 1.0
        assert sp.index("b") == 1
        with pytest.raises(KeyError):
            sp.index("z")

    def test_finite_space_rejects_non_metric(self):
        with pytest.raises(ValueError, match="symmetry"):
            FiniteMetricSpace(labels=("a", "b"), dist=np.array([[0.0, 1.0], [2.0, 0.0]]))

    def test_finite_space_rejects_duplicate_labels(self):
        with pytest.raises(ValueError):
            FiniteMetricSpace(labels=("a", "a"), dist=np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_label_order_sorts_by_label(self):
        d = np.array([[0.0, 1.0], [1.0, 0.0]])
        sp = FiniteMetricSpace(labels=("z", "a"), dist=d)
        assert sp.label_order() == [1, 0]

    def test_euclidean_distance(self):
        sp = EuclideanSpace(dim=2)
        assert sp.distance([0.0, 0.0], [3.0, 4.0]) == 5.0
        with pytest.raises(ValueError):
            sp.point([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            EuclideanSpace(dim=0)


class TestSelfMaps:
    def test_table_map_range_checked(self):
        TableMap(image=(1, 0))
        with pytest.raises(ValueError):
            TableMap(image=(0, 2))

    def test_affine_map_shapes(self):
        m = AffineMap(A=np.array([[0.5]]), b=np.array([1.0]))
        assert m(np.array([8.0])) == pytest.approx([5.0])
        with pytest.raises(ValueError):
            AffineMap(A=np.array([[1.0, 0.0]]), b=np.array([0.0]))

    def test_immutability(self):
        sp = two_point_space()
        with pytest.raises(ValueError):
            sp.dist[0, 1] = 5.0
        m = AffineMap(A=np.array([[0.5]]), b=np.array([0.0]))
        with pytest.raises(ValueError):
            m.A[0, 0] = 2.0


class TestOrbit:
    def test_finite_reaches_fixed_point(self):
        sp = two_point_space()
        got = orbit(sp, TableMap(image=(1, 1)), 0, 10)
        assert got.points == (0, 1)
        assert (got.tail_length, got.cycle_length) == (1, 1)

    def test_affine_halving(self):
        sp = EuclideanSpace(dim=1)
        got = orbit(sp, AffineMap(A=np.array([[0.5]]), b=np.array([0.0])), [8.0], 3)
        assert [p[0] for p in got.points] == [8.0, 4.0, 2.0, 1.0]
        assert got.tail_length is None

    def test_three_cycle(self):
        sp = three_point_space()
        got = orbit(sp, TableMap(image=(1, 2, 0)), 0, 10)
        assert (got.tail_length, got.cycle_length) == (0, 3)
        assert got.points == (0, 1, 2)

    def test_budget_can_stop_early(self):
        sp = three_point_space()
        got = orbit(sp, TableMap(image=(1, 2, 0)), 0, 1)
        assert got.points == (0, 1)
        assert got.cycle_length is None


class TestProductOrbit:
    def test_shared_descent(self):
        sp = two_point_space()
        m = TableMap(image=(1, 1))
        got = product_orbit(sp, m, m, 0, 0)
        assert got.pairs == ((0, 0), (1, 1), (1, 1))
        assert (got.tail_length, got.cycle_length) == (1, 1)

    def test_swap_against_identity(self):
        sp = two_point_space()
        got = product_orbit(sp, TableMap(image=(1, 0)), identity_map(sp), 0, 0)
        assert (got.tail_length, got.cycle_length) == (0, 2)

    def test_offset_cycles(self):
        # oracle: explicit enumeration; (a,a) -> (b,c) -> (c,b) -> (a,a)
        sp = three_point_space()
        s = TableMap(image=(1, 2, 0))
        t = TableMap(image=(2, 0, 1))  # s applied twice
        got = product_orbit(sp, s, t, 0, 0)
        assert (got.tail_length, got.cycle_length) == (0, 3)
        assert got.pairs == ((0, 0), (1, 2), (2, 1), (0, 0))

    def test_closing_invariant_random_maps(self):
        rng = np.random.default_rng(3)
        labels = tuple(f"p{i}" for i in range(5))
        pts = rng.uniform(0.0, 9.0, size=(5, 2))
        d = np.round(np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2), 6)
        sp = FiniteMetricSpace(labels=labels, dist=d)
        for _ in range(50):
            s = TableMap(image=tuple(int(v) for v in rng.integers(0, 5, 5)))
            t = TableMap(image=tuple(int(v) for v in rng.integers(0, 5, 5)))
            po = product_orbit(sp, s, t, int(rng.integers(5)), int(rng.integers(5)))
            assert po.tail_length + po.cycle_length <= 25
            assert po.pairs[po.tail_length + po.cycle_length] == po.pairs[po.tail_length]
            last = po.pairs[-1]
            assert (s(last[0]), t(last[1])) == po.pairs[po.tail_length + 1]
            # pre-cycle states are pairwise distinct
            pre = po.pairs[: po.tail_length + po.cycle_length]
            assert len(set(pre)) == len(pre)

    def test_rejects_euclidean(self):
        with pytest.raises(UnsupportedSpaceError):
            product_orbit(EuclideanSpace(dim=1), None, None, 0, 0)


def test_orbital_continuity_on_finite_spaces():
    """Convergent orbits on finite spaces are eventually constant, so the
    map commutes with taking the limit along the orbit."""
    rng = np.random.default_rng(8)
    labels = tuple(f"p{i}" for i in range(4))
    pts = rng.uniform(0.0, 9.0, size=(4, 2))
    d = np.round(np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2), 6)
    sp = FiniteMetricSpace(labels=labels, dist=d)
    for _ in range(30):
        u = TableMap(image=tuple(int(v) for v in rng.integers(0, 4, 4)))
        got = orbit(sp, u, int(rng.integers(4)), 100)
        if got.cycle_length == 1:
            z = got.points[got.tail_length]
            assert u(z) == z
