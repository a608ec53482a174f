"""Acceptance criteria, one test each, at the stated tolerances.

Run directly (``python3 tests/test_acceptance.py``) for a plain pass/fail
listing, or through pytest, where the terminal summary lists the same lines.
"""
import math
import sys
import time

import numpy as np
import pytest

from kappanorm import core, dualform, opkappa, ordrep, setflow
from kappanorm.axioms import GeneratorConfig, axiom_suite, random_convex_set, sample_point
from kappanorm.errors import InfeasibleError
from kappanorm.sets import Ball, Polytope
from oracles import (
    chain_minimax_dp,
    grid_kappa_form,
    grid_metric_D,
    has_integer_representation,
    linear_flow,
    lp_constrained_fit,
    natural_posets,
    pairwise_fit_eps,
    random_diagonalizable,
)

criterion = pytest.mark.criterion


def random_polygon(rng, k_max=8, spread=1.0):
    k = rng.integers(3, k_max + 1)
    return Polytope(rng.uniform(-spread, spread, (k, 2)) + rng.uniform(-1, 1, 2))


@criterion(1, "axiom suite for Euclidean rho, d=1,2,3")
def test_criterion_01_axiom_suite():
    t0 = time.perf_counter()
    for d in (1, 2, 3):
        rep = axiom_suite(core.rho, GeneratorConfig(seed=42, dim=d, instances=200), tol=1e-9)
        assert len(rep.results) == 9
        for r in rep.results:
            assert r.passed and r.worst_violation <= 1e-9, (d, r.to_json())
    assert time.perf_counter() - t0 < 30


@criterion(2, "metric D against dense-grid Hausdorff oracle")
def test_criterion_02_metric_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        A, B = random_polygon(rng), random_polygon(rng)
        worst = max(worst, abs(core.metric_D(A, B) - grid_metric_D(A.vertices, B.vertices, step=1e-3)))
    assert worst <= 2e-3
    assert time.perf_counter() - t0 < 60


@criterion(3, "kappa-form grid oracle and the D2, D5-D8 suite")
def test_criterion_03_kappa_form():
    rng = np.random.default_rng(3)
    worst = 0.0
    for i in range(50):
        x, y = rng.uniform(-2, 2, 2), rng.uniform(-2, 2, 2)
        A = Polytope(rng.uniform(-1, 1, (2, 2)))
        # half the instances pair a segment with a small triangle
        B = Polytope(rng.uniform(-1, 1, (2, 2)) if i % 2 else rng.uniform(-0.35, 0.35, (3, 2)) + rng.uniform(-1, 1, 2))
        ref = grid_kappa_form(x, A.vertices, y, B.vertices, step=1e-3)
        worst = max(worst, abs(dualform.kappa_form(x, A, y, B) - ref))
    assert worst <= 1e-6
    rep = dualform.duality_axiom_suite(GeneratorConfig(seed=7, dim=2, instances=200), tol=1e-9)
    failing = {r.name: r.worst_violation for r in rep.results
               if r.name in ("D2", "D5a", "D5b", "D6", "D7", "D8") and not r.passed}
    assert not failing, f"duality axioms violated: {failing}"


@criterion(4, "duality bounds and bipolar identity")
def test_criterion_04_duality_bounds():
    rng = np.random.default_rng(4)
    for k in range(100):
        A, B = random_convex_set(rng, 2), random_convex_set(rng, 2)
        x, y = sample_point(rng, A), sample_point(rng, B)
        fam = dualform.default_test_family(2, seed=k)
        assert dualform.kappa_form(x, A, y, B) <= core.rho(x, A) * core.rho(y, B) + 1e-12
        assert dualform.rho_tilde_sampled(x, A, fam) <= core.rho(x, A) + 1e-12
    for _ in range(20):
        k = rng.integers(2, 7)
        th = np.sort(rng.uniform(0, np.pi, k))
        r = rng.uniform(0.5, 2.0, k)
        V = np.column_stack([r * np.cos(th), r * np.sin(th)])
        P = Polytope(np.vstack([V, -V]))
        assert core.metric_D(dualform.polar(dualform.polar(P)), P) <= 1e-9


@criterion(5, "operator kappa-norm conditional axiom suite")
def test_criterion_05_operator_suite():
    rep = opkappa.operator_axiom_suite(GeneratorConfig(seed=11, dim=2, instances=100), tol=1e-8)
    for name in ("N1", "N2", "N5a", "N5b", "N6", "N7"):
        assert rep[name].passed and rep[name].checked > 0, rep[name].to_json()


@criterion(6, "point ODE by Picard iteration")
def test_criterion_06_point_ode():
    cfg = setflow.SolverConfig(h=1e-3)
    rot = setflow.VectorField.affine(np.array([[0.0, -1.0], [1.0, 0.0]]))
    _, X = setflow.solve_point_ode(rot, [1.0, 0.0], math.pi / 2, cfg)
    assert np.linalg.norm(X[-1] - [0.0, 1.0]) <= 1e-6
    rng = np.random.default_rng(6)
    for _ in range(10):
        L = random_diagonalizable(rng)
        x0 = rng.uniform(-1, 1, 2)
        _, X = setflow.solve_point_ode(setflow.VectorField.affine(L), x0, 1.0, cfg)
        assert np.linalg.norm(X[-1] - linear_flow(L, x0, 1.0)) <= 1e-6


def _box_flow(h):
    f = setflow.VectorField.affine(np.diag([1.0, 2.0]))
    A0 = Polytope([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    traj = setflow.solve_set_ode(f, A0, 1.0, setflow.SolverConfig(h=h))
    e, e2 = math.e, math.e**2
    exact = Polytope([[-e, -e2], [e, -e2], [e, e2], [-e, e2]])
    return core.metric_D(traj.final, exact), traj


@criterion(7, "set ODE for a diagonal linear field on a box")
def test_criterion_07_set_ode():
    t0 = time.perf_counter()
    err, traj = _box_flow(1e-3)
    assert err <= 1e-2
    for s in traj.diagnostics["segments"]:
        assert s["contraction_ratio"] <= s["contraction_bound"] + 1e-6
    err_half, _ = _box_flow(5e-4)
    assert err / err_half >= 1.8
    assert time.perf_counter() - t0 < 120


@criterion(8, "perturbation bound")
def test_criterion_08_perturbation():
    rng = np.random.default_rng(8)
    for k in range(20):
        C = random_polygon(rng) if k % 2 == 0 else Ball(rng.uniform(-1, 1, 2), rng.uniform(0.2, 1.5))
        for eps in (0.2, 0.02):
            C_sigma, D = core.perturb_bound(C, eps)
            assert D < eps
            if isinstance(C, Polytope):
                assert abs(D - eps / 2) <= 1e-3
                S = core.minkowski_sum_cl(C, C_sigma)
                assert abs(grid_metric_D(S.vertices, C.vertices, step=1e-3) - D) <= 1e-3


@criterion(9, "interval orders on every poset with n <= 6")
def test_criterion_09_interval_orders():
    t0 = time.perf_counter()
    for n in range(1, 7):
        for rel in natural_posets(n):
            P = ordrep.IntervalOrder(tuple(range(n)), frozenset(rel))
            ok = ordrep.check_interval_order(P)
            assert ok == has_integer_representation(n, rel)
            if ok:
                assert ordrep.verify_representation(P, ordrep.find_representation(P))
    assert time.perf_counter() - t0 < 120


@criterion(10, "monotone projection on small integer chains")
def test_criterion_10_monotone_projection():
    grid = np.arange(-3, 3 + 1 / 64, 1 / 64)
    for n in range(1, 7):
        fam = ordrep.ChainFamily((tuple(range(n)),))
        G = np.array(np.meshgrid(*[np.arange(-3, 4)] * n, indexing="ij"), dtype=float).reshape(n, -1).T
        ref = chain_minimax_dp(G, grid)
        for row, r in zip(G, ref):
            g = ordrep.FunctionOnT(dict(enumerate(row)))
            star, eps = ordrep.monotone_project_sup(g, fam)
            assert abs(eps - r) <= 1e-9
            again, eps2 = ordrep.monotone_project_sup(star, fam)
            assert eps2 == 0.0 and again.values == star.values
            if np.all(np.diff(row) >= 0):
                assert eps == 0.0 and star.values == g.values


@criterion(11, "slope-constrained fit")
def test_criterion_11_constrained_fit():
    rng = np.random.default_rng(11)
    for _ in range(100):
        xs = np.sort(rng.uniform(-3, 3, 4))
        gs = rng.uniform(-3, 3, 4)
        C1 = rng.uniform(0, 2)
        C2 = rng.uniform(0, C1)
        fit, eps = ordrep.constrained_fit(ordrep.FunctionOnT(dict(zip(xs, gs))), C1, C2)
        assert abs(eps - lp_constrained_fit(xs, gs, C1, C2)) <= 1e-6
        assert abs(eps - pairwise_fit_eps(xs, gs, C1, C2)) <= 1e-6
        assert ordrep.slope_margin(fit, C1, C2) >= -1e-9
        with pytest.raises(InfeasibleError):
            ordrep.constrained_fit(ordrep.FunctionOnT(dict(zip(xs, gs))), C2, C1 + 1e-3)


@criterion(12, "CLI determinism for every command")
def test_criterion_12_cli_determinism(tmp_path):
    from kappanorm import cli
    from test_cli import invocations, make_inputs

    for name, argv in invocations(make_inputs(tmp_path)).items():
        outs = []
        for k in range(2):
            path = tmp_path / f"{name}-{k}.json"
            assert cli.main(argv + ["--out", str(path)]) == 0, name
            outs.append(path.read_bytes())
        assert outs[0] == outs[1], name


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
