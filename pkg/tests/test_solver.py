import numpy as np
import pytest

from loadshare import (
    ForceOutOfDomain,
    LinearMap,
    SharingProblem,
    ValidationError,
    build_objective,
    koenigs_build,
    predict_pair_sharing,
    sharing_curve,
    solve,
)
from loadshare.solver import iterate_exponent

from conftest import ANALYTIC_MAPS, RATIOS


def assert_optimality(P, res):
    r = P.moment_arms
    O = P.objective
    M = P.moment
    assert abs(np.dot(r, res.forces) - M) <= 1e-9 * max(1.0, M)
    jp = O.j_prime(res.forces)
    assert np.all(np.abs(jp - res.lam * r) <= 1e-9 * np.maximum(1.0, res.lam * r))


def test_p1_example(obj_linear_p1):
    P = SharingProblem([1.0, 2.0], 5.0, obj_linear_p1)
    res = solve(P)
    np.testing.assert_allclose(res.forces, [1.0, 2.0], rtol=1e-12)
    assert res.lam == pytest.approx(1.0, rel=1e-12)
    assert_optimality(P, res)


def test_p2_example(obj_linear_p2):
    P = SharingProblem([1.0, 4.0], 9.0, obj_linear_p2)
    res = solve(P)
    np.testing.assert_allclose(res.forces, [1.0, 2.0], rtol=1e-12)
    assert res.lam == pytest.approx(1.0, rel=1e-12)
    assert res.objective_value == pytest.approx(1.0 / 3.0 + 8.0 / 3.0, rel=1e-9)
    assert_optimality(P, res)


def test_zero_moment(obj_moebius):
    res = solve(SharingProblem([1.0, 4.0, 2.0], 0.0, obj_moebius))
    assert res.forces.tolist() == [0.0, 0.0, 0.0]
    assert res.lam == 0.0 and res.objective_value == 0.0


def test_out_of_domain(obj_moebius):
    with pytest.raises(ForceOutOfDomain):
        solve(SharingProblem([1.0, 4.0], 100.0, obj_moebius))


def test_problem_validation(obj_moebius):
    with pytest.raises(ValidationError):
        SharingProblem([1.0], 1.0, obj_moebius)
    with pytest.raises(ValidationError):
        SharingProblem([1.0, -2.0], 1.0, obj_moebius)
    with pytest.raises(ValidationError):
        SharingProblem([1.0, 2.0], -1.0, obj_moebius)


def _max_moment(h, rho):
    # at the top of the sweep muscle k sits at domain_max and j at h(domain_max)
    return h.domain_max + rho * h(h.domain_max)


@pytest.mark.parametrize("h", ANALYTIC_MAPS, ids=lambda h: f"{h.kind}{h.a}")
@pytest.mark.parametrize("rho", RATIOS)
def test_round_trip(h, rho):
    O = build_objective(koenigs_build(h), rho, 1.0)
    moments = np.linspace(0.0, _max_moment(h, rho), 11)
    pts = sharing_curve([rho, 1.0], O, 0, 1, moments)
    assert all(p.ok for p in pts)
    for p in pts:
        assert abs(p.f_j - h(p.f_k)) <= 1e-6 * max(1.0, p.f_k)
    for M in moments:
        P = SharingProblem([rho, 1.0], M, O)
        assert_optimality(P, solve(P))


def test_linear_curve(obj_linear_p2):
    pts = sharing_curve([1.0, 4.0], obj_linear_p2, 0, 1, np.linspace(0, 2.5, 9))
    for p in pts:
        assert p.f_j == pytest.approx(0.5 * p.f_k, abs=1e-8)
    assert sharing_curve([1.0, 4.0], obj_linear_p2, 0, 1, [0.0])[0].f_k == 0.0


def test_curve_partial_failure(obj_moebius):
    pts = sharing_curve([1.0, 4.0], obj_moebius, 0, 1, [1.0, 50.0, 2.0])
    assert [p.ok for p in pts] == [True, False, True]
    assert pts[1].error == "ForceOutOfDomain"


def test_predict_pair_edge_cases(k_moebius, moebius):
    xs = np.linspace(0.0, 2.0, 17)
    same_j = predict_pair_sharing(k_moebius, 1.0, 1.0, 4.0, xs)
    for x, y in same_j:
        assert y == pytest.approx(moebius(x), abs=1e-9)
    same_k = predict_pair_sharing(k_moebius, 4.0, 1.0, 4.0, xs)
    assert [y for _, y in same_k] == xs.tolist()


def test_predict_against_three_muscle_solve(k_linear):
    assert iterate_exponent(2.0, 1.0, 4.0) == pytest.approx(0.5)
    O = build_objective(k_linear, 1.0, 4.0)
    arms = [4.0, 2.0, 1.0]  # k, m, j
    for M in np.linspace(0.0, 4.0 * 2.0, 9)[:-1]:
        res = solve(SharingProblem(arms, M, O))
        fk, fm, fj = res.forces
        (_, pred), = predict_pair_sharing(k_linear, 2.0, 1.0, 4.0, [fk])
        assert pred == pytest.approx(np.sqrt(0.5) * fk, abs=1e-8)
        assert fm == pytest.approx(pred, abs=1e-8)


def test_pairwise_consistency(k_moebius):
    # (m, k) followed by (j, m) gives (j, k)
    rk, rm, rj = 4.0, 2.5, 1.0
    xs = np.linspace(0.0, 2.0, 21)
    km = dict(predict_pair_sharing(k_moebius, rm, rj, rk, xs))
    for x in xs:
        fm = km[float(x)]
        t = iterate_exponent(rj, rj, rk) - iterate_exponent(rm, rj, rk)
        fj = k_moebius.fractional_iterate(t, fm)
        assert fj == pytest.approx(k_moebius.source(x), abs=1e-6)


@pytest.mark.parametrize("h", ANALYTIC_MAPS, ids=lambda h: f"{h.kind}{h.a}")
def test_local_minimum_certificate(h):
    rng = np.random.default_rng(7)
    rho = 0.5
    O = build_objective(koenigs_build(h), rho, 1.0)
    arms = np.array([rho, 1.0])
    M = 0.6 * _max_moment(h, rho)
    res = solve(SharingProblem(arms, M, O))
    fj, fk = res.forces
    for _ in range(50):
        dk = rng.uniform(-0.2, 0.2) * fk
        fk2 = fk + dk
        fj2 = (M - fk2) / rho
        if not (0.0 <= fk2 <= h.domain_max and 0.0 <= fj2 <= h.domain_max):
            continue
        assert O.j_value(fj2) + O.j_value(fk2) >= res.objective_value


def test_scale_invariance(obj_moebius):
    big = obj_moebius.scaled(7.0)
    for M in np.linspace(0.0, 2.0, 11):
        a = solve(SharingProblem([1.0, 4.0, 2.0], M, obj_moebius))
        b = solve(SharingProblem([1.0, 4.0, 2.0], M, big))
        np.testing.assert_allclose(a.forces, b.forces, rtol=0, atol=1e-9)
        assert b.lam == pytest.approx(7.0 * a.lam, rel=1e-12)
