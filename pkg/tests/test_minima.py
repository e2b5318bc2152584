import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import starlat as sl
from starlat.errors import SingularBasis, UnboundedBody

from conftest import rank_threshold_minima, tuple_minima


EUCLID = sl.pnorm_ball(2, 2)


def euclid_norm(x):
    return float(np.linalg.norm(x))


def test_exact_minima_z2():
    L = sl.make_lattice([[1, 0], [0, 1]])
    res = sl.successive_minima_exact(EUCLID, L)
    assert res.exact
    assert res.values == (1.0, 1.0)
    assert res.witnesses[0].coeffs != res.witnesses[1].coeffs


def test_exact_minima_hexagonal():
    L = sl.make_lattice([[1, 0.5], [0, math.sqrt(3) / 2]])
    res = sl.successive_minima_exact(EUCLID, L)
    assert res.values[0] == pytest.approx(1.0, abs=1e-12)
    assert res.values[1] == pytest.approx(1.0, abs=1e-12)


def test_exact_minima_diagonal_box_body():
    L = sl.make_lattice([[2, 0], [0, 3]])
    res = sl.successive_minima_exact(sl.pnorm_ball(2, math.inf), L)
    assert res.values == (2.0, 3.0)
    assert res.witnesses[0].coeffs in {(1, 0), (-1, 0)}


def test_exact_minima_ordering_and_witness_consistency(rng):
    for _ in range(15):
        B = rng.uniform(-2, 2, (2, 2))
        try:
            L = sl.make_lattice(B)
        except SingularBasis:
            continue
        if L.det < 0.2:
            continue
        res = sl.successive_minima_exact(EUCLID, L)
        assert res.values[0] <= res.values[1]
        for v, w in zip(res.values, res.witnesses):
            assert sl.evaluate(EUCLID, w.coords) == pytest.approx(v, rel=1e-9)
        c1, c2 = res.witnesses[0].coeffs, res.witnesses[1].coeffs
        assert c1[0] * c2[1] - c1[1] * c2[0] != 0


def test_exact_minima_matches_rank_oracle(rng):
    for _ in range(12):
        B = rng.uniform(-2, 2, (2, 2))
        try:
            L = sl.make_lattice(B)
        except SingularBasis:
            continue
        if L.det < 0.3:
            continue
        res = sl.successive_minima_exact(EUCLID, L)
        oracle = rank_threshold_minima(B, euclid_norm,
                                       res.values[1] * 1.5 + 1.0)
        assert res.values[0] == pytest.approx(oracle[0], rel=1e-9)
        assert res.values[1] == pytest.approx(oracle[1], rel=1e-9)


def test_exact_minima_matches_tuple_oracle_small():
    for cols in ([[1, 0], [0, 1]], [[2, 1], [0, 1]], [[1.3, 0.4], [-0.2, 1.1]]):
        L = sl.make_lattice(cols)
        res = sl.successive_minima_exact(EUCLID, L)
        oracle = tuple_minima(cols, euclid_norm, res.values[1] * 1.2 + 0.5)
        assert res.values[0] == pytest.approx(oracle[0], rel=1e-9)
        assert res.values[1] == pytest.approx(oracle[1], rel=1e-9)


def test_exact_minima_3d_identity():
    L = sl.make_lattice(np.eye(3))
    res = sl.successive_minima_exact(EUCLID3 := sl.pnorm_ball(3, 2), L)
    assert res.values == (1.0, 1.0, 1.0)
    res_box = sl.successive_minima_exact(sl.pnorm_ball(3, math.inf),
                                         sl.make_lattice(np.diag([1, 2, 3])))
    assert res_box.values == (1.0, 2.0, 3.0)
    assert EUCLID3.dim == 3


def test_exact_minima_rejects_unbounded():
    with pytest.raises(UnboundedBody):
        sl.successive_minima_exact(sl.hyperbolic(2),
                                   sl.make_lattice([[1, 0], [0, 1]]))


def test_minkowski_second_theorem_bound(rng):
    # for the Euclidean ball in the plane: lambda1*lambda2*V(B) <= 4*det
    vol = math.pi
    for _ in range(15):
        B = rng.uniform(-2, 2, (2, 2))
        try:
            L = sl.make_lattice(B)
        except SingularBasis:
            continue
        if L.det < 0.2:
            continue
        res = sl.successive_minima_exact(EUCLID, L)
        prod = res.values[0] * res.values[1]
        assert prod * vol <= 4.0 * L.det * (1 + 1e-9)
        assert prod * vol >= (2.0 ** 2 / math.factorial(2)) * L.det * 0.999


@given(seed=st.integers(0, 10**6), c=st.floats(0.5, 3.0))
@settings(max_examples=30, deadline=None)
def test_minima_scale_covariance(seed, c):
    rng = np.random.default_rng(seed)
    B = rng.uniform(-2, 2, (2, 2))
    try:
        L = sl.make_lattice(B)
    except SingularBasis:
        return
    if L.det < 0.2:
        return
    base = sl.successive_minima_exact(EUCLID, L)
    scaled = sl.successive_minima_exact(sl.scale_body(EUCLID, c), L)
    for v, w in zip(base.values, scaled.values):
        assert w == pytest.approx(v / c, rel=1e-9)


def test_upper_bound_hyperbolic_z2_budget2():
    L = sl.make_lattice([[1, 0], [0, 1]])
    res = sl.minima_upper_bound(sl.hyperbolic(2), L, 2.0)
    assert not res.exact
    assert res.values == (0.0, 0.0)


def test_upper_bound_golden_budget50():
    res = sl.minima_upper_bound(sl.hyperbolic(2), sl.golden_lattice(), 50.0)
    assert res.values[0] == pytest.approx(1.0, abs=1e-9)
    assert res.values[1] == pytest.approx(1.0, abs=1e-9)


def test_upper_bound_monotone_in_budget():
    f = sl.hyperbolic(2)
    L = sl.make_lattice([[1.1, 0.2], [0.1, 0.95]])
    prev = (math.inf, math.inf)
    for R in (1.0, 2.0, 5.0, 10.0, 30.0):
        res = sl.minima_upper_bound(f, L, R)
        assert res.values[0] <= prev[0] + 1e-12
        assert res.values[1] <= prev[1] + 1e-12
        prev = res.values


def test_upper_bound_dominates_exact(rng):
    for _ in range(10):
        B = rng.uniform(-2, 2, (2, 2))
        try:
            L = sl.make_lattice(B)
        except SingularBasis:
            continue
        if L.det < 0.2:
            continue
        exact = sl.successive_minima_exact(EUCLID, L)
        ub = sl.minima_upper_bound(EUCLID, L, max(exact.values[1], 0.5))
        assert ub.values[0] >= exact.values[0] - 1e-12
        assert ub.values[1] >= exact.values[1] - 1e-12


def test_upper_bound_rank_deficit_pads_inf():
    L = sl.make_lattice([[1, 0], [0, 10]])
    res = sl.minima_upper_bound(EUCLID, L, 1.5)
    assert res.values[0] == 1.0
    assert res.values[1] == math.inf and res.witnesses[1] is None


def test_upper_bound_rejects_bad_budget():
    L = sl.make_lattice([[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        sl.minima_upper_bound(EUCLID, L, 0.0)


def test_probe_inflating_bodies_converges():
    L = sl.make_lattice([[1, 0], [0, 1]])
    report = sl.semicontinuity_probe(
        f_seq=lambda n: sl.inflate_body(EUCLID, 1.0 + 1.0 / n),
        L_seq=lambda n: L, f=EUCLID, L=L, n_max=8,
        slack=lambda n: 3.0 / n)
    assert report.reference == (1.0, 1.0)
    assert report.eventually_upper()
    assert all(e.converged for e in report.entries if e.n >= 2)


def test_probe_perturbed_lattices_upper_semicontinuous():
    L = sl.golden_lattice()
    report = sl.semicontinuity_probe(
        f_seq=lambda n: sl.hyperbolic(2),
        L_seq=lambda n: sl.perturb_basis(L, 0.05 / n, seed=n),
        f=sl.hyperbolic(2), L=L, n_max=6,
        slack=lambda n: 10.0 / n, budget=30.0)
    # budgeted values along the schedule stay below reference + slack
    assert report.eventually_upper(from_n=2)
    assert not report.reference_exact


def test_probe_records_errors_per_entry():
    L = sl.make_lattice([[1, 0], [0, 1]])

    def bad_seq(n):
        if n == 3:
            raise ValueError("synthetic failure")
        return L

    report = sl.semicontinuity_probe(
        f_seq=lambda n: EUCLID, L_seq=bad_seq, f=EUCLID, L=L, n_max=4,
        slack=lambda n: 1.0 / n)
    errs = [e for e in report.entries if e.error is not None]
    assert len(errs) == 1 and errs[0].n == 3
    assert "synthetic failure" in errs[0].error


def test_noncontinuity_zero_epsilon_is_golden():
    rep = sl.noncontinuity_demo(0.0, 40.0, seed=5)
    assert not rep.found and rep.attempts == 1
    assert rep.best_lambda2 == pytest.approx(1.0, abs=1e-9)


def test_noncontinuity_finds_small_lambda2():
    rep = sl.noncontinuity_demo(0.05, 60.0, seed=11, attempts=300)
    assert rep.found
    assert rep.values[1] < 0.5
    w1, w2 = rep.witnesses[0], rep.witnesses[1]
    assert w1.coeffs[0] * w2.coeffs[1] - w1.coeffs[1] * w2.coeffs[0] != 0


def test_noncontinuity_rejects_negative_epsilon():
    with pytest.raises(ValueError):
        sl.noncontinuity_demo(-0.1, 10.0, seed=0)
