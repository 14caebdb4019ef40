"""Dual iteration, descent, and a-priori series bounds.

Closed-form geometric orbits serve as the oracle for the Euclidean
worked case; on finite instances convergence is exact, so residuals are
compared with == rather than tolerances.
"""

import numpy as np
import pytest

from fixpair.certify import (
    TablePointFunction,
    WeightedNormsPotential,
    verify_caristi,
    verify_main,
)
from fixpair.cli import generate_instance
from fixpair.comparison import Linear, Staircase, build_staircase, eval_phi
from fixpair.errors import CertificateMissingError, PropertyNotExactError
from fixpair.solve import (
    TRACE_CAP,
    apriori_bound,
    caristi_descent,
    common_fixed_points_bruteforce,
    dual_iterate,
    series_trace,
)
from fixpair.space import AffineMap, EuclideanSpace, FiniteMetricSpace, TableMap, identity_map
from fixpair.synth import synthesize_gamma

HALF = AffineMap(A=np.array([[0.5]]), b=np.array([0.0]))
THIRD = AffineMap(A=np.array([[1.0 / 3.0]]), b=np.array([0.0]))


def two_point():
    return FiniteMetricSpace(labels=("a", "b"), dist=np.array([[0.0, 1.0], [1.0, 0.0]]))


def chain_space():
    d = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [2.0, 1.0, 0.0]])
    return FiniteMetricSpace(labels=("a", "b", "c"), dist=d)


class TestDualIterate:
    def test_euclidean_geometric_decay(self):
        sp = EuclideanSpace(dim=1)
        x0, y0 = np.array([8.0]), np.array([9.0])
        report = dual_iterate(sp, HALF, THIRD, x0, y0, 1e-9, 200, record_trace=True)
        assert report.coincide
        assert report.iterations <= 60
        assert abs(report.z[0]) <= 1e-8 and abs(report.w[0]) <= 1e-8
        # oracle: closed forms x_n = 8/2^n, y_n = 9/3^n
        for n, x, y, d in report.trace:
            assert x[0] == pytest.approx(8.0 / 2.0**n, rel=1e-12)
            assert y[0] == pytest.approx(9.0 / 3.0**n, rel=1e-12)
            assert d == pytest.approx(abs(8.0 / 2.0**n - 9.0 / 3.0**n), abs=1e-12)

    def test_finite_exact_in_two_steps(self):
        sp = two_point()
        drop = TableMap(image=(1, 1))
        a = sp.index("a")
        report = dual_iterate(sp, drop, drop, a, a, 1e-9, 100)
        assert report.coincide
        assert report.iterations <= 2
        assert report.z == report.w == sp.index("b")
        assert report.residual_S == 0.0
        assert report.residual_T == 0.0
        assert report.cross_residual == 0.0

    def test_stationary_mismatch_reports_no_convergence(self):
        sp = two_point()
        ident = identity_map(sp)
        report = dual_iterate(sp, ident, ident, sp.index("a"), sp.index("b"), 1e-9, 25)
        assert not report.coincide
        assert report.iterations == 25
        assert report.cross_residual == 1.0

    def test_argument_validation(self):
        sp = two_point()
        ident = identity_map(sp)
        with pytest.raises(ValueError):
            dual_iterate(sp, ident, ident, 0, 0, 0.0, 10)
        with pytest.raises(ValueError):
            dual_iterate(sp, ident, ident, 0, 0, 1e-9, 0)

    def test_trace_is_capped(self):
        sp = two_point()
        ident = identity_map(sp)
        report = dual_iterate(
            sp, ident, ident, 0, 1, 1e-9, TRACE_CAP + 37, record_trace=True
        )
        assert len(report.trace) == TRACE_CAP

    def test_trace_off_by_default(self):
        sp = two_point()
        drop = TableMap(image=(1, 1))
        assert dual_iterate(sp, drop, drop, 0, 0, 1e-9, 10).trace is None


class TestAprioriBound:
    def test_worked_example(self):
        sp = EuclideanSpace(dim=1)
        gamma = WeightedNormsPotential(cx=0.0, cy=0.25)
        bound = apriori_bound(
            Linear(0.5), gamma, sp, np.array([8.0]), np.array([9.0])
        )
        assert bound == pytest.approx(6.5, abs=1e-12)
        trace = series_trace(sp, HALF, THIRD, np.array([8.0]), np.array([9.0]), 200)
        assert trace.partial_sums[-1] == pytest.approx(4.5, abs=1e-6)
        assert trace.partial_sums[-1] <= bound

    def test_fixed_start_is_zero(self):
        sp = two_point()
        gamma_vals = np.zeros((2, 2))
        from fixpair.certify import MatrixPotential

        b = sp.index("b")
        bound = apriori_bound(Linear(0.5), MatrixPotential(values=gamma_vals), sp, b, b)
        assert bound == 0.0
        drop = TableMap(image=(1, 1))
        trace = series_trace(sp, drop, drop, b, b, 50)
        assert trace.partial_sums[-1] == 0.0

    def test_dominates_exact_series_on_synthesized_instances(self):
        for seed in range(100):
            inst = generate_instance(seed, 5, "feasible-main")
            res = synthesize_gamma(inst.space, inst.s_map, inst.t_map, inst.phi)
            assert res.feasible
            rng = np.random.default_rng(seed)
            n = len(inst.space)
            x0, y0 = int(rng.integers(n)), int(rng.integers(n))
            bound = apriori_bound(inst.phi, res.gamma, inst.space, x0, y0)
            # exact finite sum: orbits stabilize within n steps
            trace = series_trace(inst.space, inst.s_map, inst.t_map, x0, y0, 2 * n)
            assert trace.partial_sums[-1] <= bound + 1e-9

    def test_refuses_inexact_phi(self):
        sp = EuclideanSpace(dim=1)
        gamma = WeightedNormsPotential(cx=0.0, cy=0.0)
        # stalling piece bounds: coercivity only grid-checked
        stalling = build_staircase([0.0, 16.0, 256.0, 65536.0])
        with pytest.raises(PropertyNotExactError):
            apriori_bound(stalling, gamma, sp, np.array([1.0]), np.array([2.0]))
        # dipping staircase: not knot-derived, refused even if sum-form certified
        dipping = Staircase(t=(0.0, 4.0, 64.0), r=(0.5, 0.99))
        with pytest.raises(PropertyNotExactError):
            apriori_bound(
                dipping, gamma, sp, np.array([1.0]), np.array([2.0]),
                sum_form_certified=True,
            )

    def test_exact_staircase_accepted(self):
        sp = EuclideanSpace(dim=1)
        gamma = WeightedNormsPotential(cx=0.0, cy=0.0)
        stair = build_staircase([0.0, 16.0, 256.0, 4096.0, 65536.0])
        bound = apriori_bound(stair, gamma, sp, np.array([0.0]), np.array([1.0]))
        assert bound > 0.0


class TestSeriesTrace:
    def test_partial_sums_nondecreasing(self):
        sp = EuclideanSpace(dim=1)
        trace = series_trace(sp, HALF, THIRD, np.array([8.0]), np.array([9.0]), 60)
        sums = np.array(trace.partial_sums)
        assert (np.diff(sums) >= 0.0).all()
        assert len(trace.terms) == 60
        assert trace.terms[0] == 1.0


class TestCaristiDescent:
    def test_two_point_descent(self):
        sp = two_point()
        drop = TableMap(image=(1, 1))
        alpha = TablePointFunction(values=(1.0, 0.0))
        cert = verify_caristi(sp, drop, alpha)
        assert caristi_descent(sp, drop, alpha, sp.index("a"), cert) == sp.index("b")

    def test_identity_stays_put(self):
        sp = two_point()
        ident = identity_map(sp)
        alpha = TablePointFunction(values=(5.0, 5.0))
        cert = verify_caristi(sp, ident, alpha)
        assert caristi_descent(sp, ident, alpha, sp.index("a"), cert) == sp.index("a")

    def test_chain_two_steps(self):
        sp = chain_space()
        chain = TableMap(image=(1, 2, 2))
        alpha = TablePointFunction(values=(2.0, 1.0, 0.0))
        cert = verify_caristi(sp, chain, alpha)
        assert cert.status == "verified"
        assert caristi_descent(sp, chain, alpha, sp.index("a"), cert) == sp.index("c")

    def test_refuses_without_certificate(self):
        sp = two_point()
        drop = TableMap(image=(1, 1))
        alpha = TablePointFunction(values=(1.0, 0.0))
        with pytest.raises(CertificateMissingError):
            caristi_descent(sp, drop, alpha, 0)

    def test_refuses_violated_certificate(self):
        sp = two_point()
        drop = TableMap(image=(1, 1))
        zero = TablePointFunction(values=(0.0, 0.0))
        cert = verify_caristi(sp, drop, zero)
        assert cert.status == "violated"
        with pytest.raises(CertificateMissingError):
            caristi_descent(sp, drop, zero, 0, cert)

    def test_generated_instances_descend_from_everywhere(self):
        for seed in range(25):
            inst = generate_instance(seed, 6, "caristi")
            cert = verify_caristi(inst.space, inst.t_map, inst.alpha)
            assert cert.status == "verified"
            for x0 in range(len(inst.space)):
                z = caristi_descent(inst.space, inst.t_map, inst.alpha, x0, cert)
                assert inst.t_map(z) == z


class TestBruteforce:
    def test_constant_maps(self):
        sp = chain_space()
        const = TableMap(image=(2, 2, 2))
        assert common_fixed_points_bruteforce(sp, const, const) == (sp.index("c"),)

    def test_mixed_maps_intersect(self):
        sp = two_point()
        s = TableMap(image=(1, 1))
        t = identity_map(sp)
        assert common_fixed_points_bruteforce(sp, s, t) == (sp.index("b"),)

    def test_empty_when_t_has_no_fixed_point(self):
        sp = two_point()
        swap = TableMap(image=(1, 0))
        assert common_fixed_points_bruteforce(sp, identity_map(sp), swap) == ()


class TestEndToEnd:
    def test_full_pipeline_on_synthesized_instances(self):
        # feasible + exact phi: every start pair reaches the same z with
        # Sz = Tz = z exactly, and the brute-force scan agrees
        for seed in range(30):
            inst = generate_instance(seed, 5, "feasible-main")
            res = synthesize_gamma(inst.space, inst.s_map, inst.t_map, inst.phi)
            assert res.feasible
            cert = verify_main(inst.space, inst.s_map, inst.t_map, inst.phi, res.gamma)
            assert cert.status == "verified"
            n = len(inst.space)
            limits = set()
            for x0 in range(n):
                for y0 in range(n):
                    rep = dual_iterate(
                        inst.space, inst.s_map, inst.t_map, x0, y0, 1e-9, 10 * n
                    )
                    assert rep.coincide
                    assert rep.residual_S == 0.0
                    assert rep.residual_T == 0.0
                    assert rep.cross_residual == 0.0
                    limits.add(rep.z)
            assert len(limits) == 1
            z = limits.pop()
            assert common_fixed_points_bruteforce(
                inst.space, inst.s_map, inst.t_map
            ) == (z,)

    def test_bound_soundness_on_certified_instances(self):
        for seed in range(40):
            inst = generate_instance(seed + 700, 4, "feasible-main")
            res = synthesize_gamma(inst.space, inst.s_map, inst.t_map, inst.phi)
            for x0 in range(len(inst.space)):
                for y0 in range(len(inst.space)):
                    bound = apriori_bound(inst.phi, res.gamma, inst.space, x0, y0)
                    trace = series_trace(
                        inst.space, inst.s_map, inst.t_map, x0, y0, 20
                    )
                    assert all(s <= bound + 1e-9 for s in trace.partial_sums)

    def test_uniqueness_replay(self):
        # any candidate w with d(z,w) <= phi(d(z,w)) must coincide with z
        for seed in range(20):
            inst = generate_instance(seed, 5, "feasible-main")
            rep = dual_iterate(inst.space, inst.s_map, inst.t_map, 0, 0, 1e-9, 100)
            z = rep.z
            for w in common_fixed_points_bruteforce(inst.space, inst.s_map, inst.t_map):
                d = inst.space.distance(z, w)
                if d <= eval_phi(inst.phi, d):
                    assert d == 0.0
                    assert w == z
