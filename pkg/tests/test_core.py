import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kappanorm import axioms, core
from kappanorm.errors import DimensionError, EmptySetError, UnsupportedSetError
from kappanorm.sets import Ball, Empty, NormKind, Polytope, Subspace, Union, box, point

from oracles import grid_metric_D, segment_distances

SQ = box([0, 0], [1, 1])


def face_distance(x, V):
    # exact dist(x, conv V): the nearest point is the projection onto the
    # affine hull of some vertex subset with nonnegative barycentric weights
    best = np.inf
    for k in range(1, min(len(V), 4) + 1):
        for S in combinations(range(len(V)), k):
            W = V[list(S)] - x
            b = np.linalg.lstsq((W[1:] - W[0]).T, -W[0], rcond=None)[0] if k > 1 else np.zeros(0)
            w = np.concatenate([[1.0 - b.sum()], b])
            if w.min() >= -1e-12:
                best = min(best, float(np.linalg.norm(w @ W)))
    return best


# ---------------------------------------------------------------- examples


def test_rho_examples():
    assert core.rho([2, 0], Ball([0, 0], 1)) == 1.0
    assert core.rho([0.5, 0], Ball([0, 0], 1)) == 0.0
    assert core.rho([3, 4], Subspace.span([[1, 0]])) == 4.0
    tri = Polytope([[0, 0], [1, 0], [0, 1]])
    assert core.rho([2, 2], tri) == pytest.approx(3 / math.sqrt(2), abs=1e-12)
    assert core.rho([1, 1], Empty(2)) == math.inf


def test_rho_under_other_ball_norms():
    assert core.rho([3, 4], Ball([0, 0], 1, NormKind.L1)) == 6.0
    assert core.rho([3, 4], Ball([0, 0], 1, NormKind.LINF)) == 3.0


def test_rho_bar_examples():
    assert core.rho_bar(Ball([0, 0], 2), Ball([0, 0], 1)) == 1.0
    assert core.rho_bar(Ball([0, 0], 1), Ball([0, 0], 2)) == 0.0
    assert core.rho_bar(SQ, box([1, 0], [2, 1])) == 1.0


def test_metric_examples():
    B = box([1, 0], [2, 1])
    assert core.metric_D(SQ, SQ) == 0.0
    assert core.metric_D(SQ, B) == pytest.approx(2.0)
    assert core.metric_D(core.affine_transform(3, [0, 0], SQ), core.affine_transform(3, [0, 0], B)) == pytest.approx(6.0)
    assert grid_metric_D(SQ.vertices, B.vertices, step=1e-2) == pytest.approx(2.0, abs=1e-9)


def test_minkowski_examples():
    S = core.minkowski_sum_cl(SQ, SQ)
    assert core.metric_D(S, box([0, 0], [2, 2])) == 0.0
    assert core.metric_D(core.minkowski_sum_cl(SQ, point([0, 0])), SQ) == 0.0
    S = core.minkowski_sum_cl(Polytope([[0, 0], [1, 0], [0, 1]]), Polytope([[0, 0], [0, 1]]))
    assert sorted(map(tuple, S.hull.tolist())) == [(0, 0), (0, 2), (1, 0), (1, 1)]
    ball = core.minkowski_sum_cl(Ball([1, 0], 1), Ball([0, 2], 0.5))
    assert isinstance(ball, Ball) and ball.radius == 1.5


def test_minkowski_bracket_sandwiches_the_exact_sum():
    inner, outer = core.minkowski_sum_bracket(SQ, Ball([0, 0], 1.0))
    for th in np.linspace(0, 2 * np.pi, 50):
        u = np.array([np.cos(th), np.sin(th)])
        exact = (SQ.vertices @ u).max() + 1.0
        assert (inner.vertices @ u).max() <= exact + 1e-12 <= (outer.vertices @ u).max() + 2e-12


def test_affine_examples():
    B = core.affine_transform(2, [0, 0], Ball([0, 0], 1))
    assert B.radius == 2
    assert core.metric_D(core.affine_transform(1, [1, 1], SQ), box([1, 1], [2, 2])) == 0.0
    P = core.affine_transform(-1, [0, 0], Polytope([[1, 0], [2, 0]]))
    assert P.vertices.tolist() == [[-1, 0], [-2, 0]]
    with pytest.raises(ValueError):
        core.affine_transform(0, [0, 0], SQ)


def test_quotient_examples():
    r, n = core.quotient_project([3, 4], Subspace.span([[1, 0]]))
    assert r.tolist() == [0, 4] and n == 4.0
    r, n = core.quotient_project([2, 0], Subspace.span([[1, 0]]))
    assert n == 0.0
    r, n = core.quotient_project([3, 4], Subspace(np.zeros((0, 2)), [0, 0]))
    assert r.tolist() == [3, 4] and n == 5.0
    with pytest.raises(ValueError):
        core.quotient_project([1, 1], Subspace([[1, 0]], [0, 1]))


def test_extend_to_singleton_examples():
    assert 4.999 <= core.extend_to_singleton([3, 4], 1000) <= 5.0
    assert core.extend_to_singleton([0, 0], 7) == 0.0
    assert core.extend_to_singleton([1, 0], 10) == pytest.approx(0.9)


def test_seminorm_examples():
    F = [Subspace.span([[0, 1]]), Subspace.span([[1, 0]])]
    assert core.seminorm_sup(F, [3, -4]) == 4.0
    assert core.seminorm_sup([], [3, -4]) == 0.0
    assert core.seminorm_sup(F[:1], [3, -4]) == core.rho([3, -4], F[0])


def test_perturb_examples():
    C_sigma, D = core.perturb_bound(SQ, 0.2)
    assert C_sigma.radius == 0.1
    assert D == pytest.approx(0.1, abs=1e-3)
    assert core.perturb_bound(Ball([0, 0], 1), 0.2)[1] == pytest.approx(0.1)
    assert core.rho_bar(SQ, core.minkowski_sum_cl(SQ, C_sigma)) == 0.0
    with pytest.raises(ValueError):
        core.perturb_bound(SQ, 0.0)


def test_errors():
    with pytest.raises(DimensionError):
        core.rho([1, 2, 3], SQ)
    with pytest.raises(EmptySetError):
        core.rho_bar(Empty(2), SQ)
    with pytest.raises(EmptySetError):
        core.metric_D(SQ, Empty(2))
    with pytest.raises(UnsupportedSetError):
        core.minkowski_sum_cl(SQ, Union((SQ,)))
    assert core.rho_bar(SQ, Empty(2)) == math.inf


# ---------------------------------------------------------------- oracles

coord = st.floats(-3, 3, allow_nan=False)
vec2 = st.tuples(coord, coord).map(np.array)
vec3 = st.tuples(coord, coord, coord).map(np.array)
poly2 = st.lists(vec2, min_size=1, max_size=7).map(lambda v: Polytope(np.array(v)))
poly3 = st.lists(vec3, min_size=1, max_size=8).map(lambda v: Polytope(np.array(v)))
balls2 = st.tuples(vec2, st.floats(0, 2)).map(lambda t: Ball(t[0], t[1]))
convex2 = st.one_of(poly2, balls2)


@given(poly2, vec2)
def test_polygon_distance_matches_edge_oracle(P, x):
    ref = segment_distances(x[None, :], P.hull)[0]
    assert core.rho(x, P) == pytest.approx(ref, abs=1e-9)


@given(poly3, vec3)
def test_polytope_distance_matches_face_oracle(P, x):
    assert core.rho(x, P) == pytest.approx(face_distance(x, np.asarray(P.vertices)), abs=1e-9)


# ---------------------------------------------------------------- properties


@given(poly2, poly2)
def test_metric_symmetric(A, B):
    assert core.metric_D(A, B) == pytest.approx(core.metric_D(B, A), abs=1e-12)


@given(poly2, poly2, poly2)
def test_metric_triangle(A, B, C):
    assert core.metric_D(A, C) <= core.metric_D(A, B) + core.metric_D(B, C) + 1e-9


@given(poly2, poly2, poly2, poly2)
def test_metric_minkowski_law(A, B, C, E):
    lhs = core.metric_D(core.minkowski_sum_cl(A, B), core.minkowski_sum_cl(C, E))
    assert lhs <= core.metric_D(A, C) + core.metric_D(B, E) + 1e-9


@given(poly2, poly2, st.floats(-4, 4).filter(lambda t: abs(t) > 1e-3))
def test_metric_homogeneous(A, B, lam):
    z = np.zeros(2)
    lhs = core.metric_D(core.affine_transform(lam, z, A), core.affine_transform(lam, z, B))
    assert lhs == pytest.approx(abs(lam) * core.metric_D(A, B), abs=1e-9)


@given(poly2)
def test_metric_vanishes_on_identical_sets(A):
    shuffled = Polytope(np.asarray(A.vertices)[::-1])
    assert core.metric_D(A, shuffled) <= 1e-12


@given(convex2, vec2, vec2)
def test_rho_midpoint_convex(C, x, y):
    assert core.rho((x + y) / 2, C) <= (core.rho(x, C) + core.rho(y, C)) / 2 + 1e-9


@given(st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_quotient_norm_is_distance(k, seed):
    rng = np.random.default_rng(seed)
    M = Subspace(np.linalg.qr(rng.standard_normal((4, 4)))[0][:, :k].T, np.zeros(4))
    x = rng.normal(size=4)
    _, n = core.quotient_project(x, M)
    assert abs(n - core.rho(x, M)) <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_seminorm_subadditive_and_homogeneous(seed):
    rng = np.random.default_rng(seed)
    F = [Subspace.span(rng.standard_normal((int(rng.integers(0, 3)), 3)), 3) for _ in range(3)]
    x, y = rng.normal(size=(2, 3))
    lam = rng.normal()
    q = lambda v: core.seminorm_sup(F, v)  # noqa: E731
    assert q(x + y) <= q(x) + q(y) + 1e-12
    assert q(lam * x) == pytest.approx(abs(lam) * q(x), abs=1e-12)


@given(convex2, st.sampled_from([0.2, 0.02, 1.0]))
def test_perturbation_below_eps(C, eps):
    assert core.perturb_bound(C, eps)[1] < eps


# ---------------------------------------------------------------- suite


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_axiom_suite_passes_for_euclidean_rho(dim):
    report = axioms.axiom_suite(core.rho, axioms.GeneratorConfig(seed=42, dim=dim, instances=60))
    assert report.passed, [r.to_json() for r in report.results if not r.passed]
    assert {r.name for r in report.results} == set(axioms.AXIOMS)


def test_suite_detects_shifted_evaluator():
    report = axioms.axiom_suite(lambda x, C: core.rho(x, C) + 1.0, axioms.GeneratorConfig(seed=42, instances=40))
    assert not report["N1"].passed


def test_suite_detects_squared_evaluator():
    report = axioms.axiom_suite(lambda x, C: core.rho(x, C) ** 2, axioms.GeneratorConfig(seed=42, instances=40))
    assert not report["N5a"].passed
    assert report["N5a"].witness is not None


def test_suite_is_deterministic():
    cfg = axioms.GeneratorConfig(seed=3, instances=20)
    assert axioms.axiom_suite(core.rho, cfg).to_json() == axioms.axiom_suite(core.rho, cfg).to_json()
