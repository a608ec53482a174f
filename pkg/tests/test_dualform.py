import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kappanorm import core, dualform
from kappanorm.axioms import GeneratorConfig
from kappanorm.dualform import (
    TestFamily,
    annihilator,
    default_test_family,
    dual_kappa_norm_sampled,
    equivalence_constants,
    kappa_form,
    polar,
    rho_tilde_sampled,
)
from kappanorm.errors import UnsupportedSetError
from kappanorm.sets import Ball, Empty, NormKind, Polytope, Subspace, Union, box, from_json, point

from oracles import grid_kappa_form

O = np.zeros(2)
SEG = Polytope([[1, 0], [2, 0]])
DIAMOND = Polytope([[1, 0], [0, 1], [-1, 0], [0, -1]])

coord = st.floats(-2, 2, allow_nan=False)
vec2 = st.tuples(coord, coord).map(np.array)
simplex2 = st.lists(vec2, min_size=1, max_size=3).map(lambda v: Polytope(np.array(v)))
poly2 = st.lists(vec2, min_size=1, max_size=6).map(lambda v: Polytope(np.array(v)))
ball2 = st.tuples(vec2, st.floats(0, 1.5)).map(lambda t: Ball(t[0], t[1]))
convex2 = st.one_of(poly2, ball2)


def brute_form(x, A, y, B, m=360):
    """inf |<b - y, a - x>| over dense boundary-plus-interior samples (for balls)."""

    def cloud(S):
        if isinstance(S, Ball):
            th = np.linspace(0, 2 * np.pi, m, endpoint=False)
            ring = np.column_stack([np.cos(th), np.sin(th)])
            return np.vstack([S.center + S.radius * s * ring for s in np.linspace(0, 1, 6)])
        return np.asarray(S.vertices)

    G = (cloud(B) - y) @ (cloud(A) - x).T
    lo, hi = G.min(), G.max()
    return 0.0 if lo <= 0 <= hi else min(abs(lo), abs(hi))


# ---------------------------------------------------------------- examples


def test_form_examples():
    assert kappa_form(O, SEG, O, SEG) == 1.0
    assert kappa_form([1.5, 0], SEG, [7, 7], box([0, 0], [1, 1])) == 0.0
    V = Polytope([[1, -1], [1, 1]])
    assert kappa_form(O, V, O, V) == 0.0
    assert kappa_form(2 * O, core.affine_transform(2, O, SEG), O, SEG) == 2.0
    assert grid_kappa_form(O, SEG.vertices, O, SEG.vertices) == pytest.approx(1.0)


def test_form_is_symmetric_in_the_pairs():
    A, B = Polytope([[1, 2], [3, 1]]), Ball([2, 2], 0.3)
    x, y = np.array([0.0, 0.5]), np.array([-1.0, 0.0])
    assert kappa_form(x, A, y, B) == pytest.approx(kappa_form(y, B, x, A), abs=1e-12)


def test_empty_arguments():
    assert kappa_form(O, SEG, O, Empty(2)) == math.inf
    assert kappa_form(O, Empty(2), O, SEG) == math.inf
    assert kappa_form([1, 0], SEG, O, Empty(2)) == 0.0
    with pytest.raises(UnsupportedSetError):
        kappa_form(O, Union((SEG,)), O, SEG)


def test_subspace_arguments_degenerate_to_zero():
    M = Subspace.span([[1, 0]])
    assert kappa_form([0, 1], M, [0, 1], Subspace.span([[1, 0]])) == 0.0
    # a subspace orthogonal to everything the other pair can move along reduces to its offset
    assert kappa_form([0, 0], Subspace([[0, 1]], [1, 0]), [0, 0], Polytope([[2, 0]])) == 2.0


def test_annihilator_examples():
    e1 = Subspace.span([[1, 0]])
    assert abs(annihilator(e1).basis @ np.array([1.0, 0.0])).max() < 1e-12
    assert len(annihilator(Subspace(np.zeros((0, 3)), np.zeros(3))).basis) == 3
    assert len(annihilator(Subspace(np.eye(3), np.zeros(3))).basis) == 0
    with pytest.raises(ValueError):
        annihilator(Subspace([[1, 0]], [0, 1]))


def test_polar_examples():
    P = polar(Ball(O, 2))
    assert P.radius == 0.5 and P.norm is NormKind.L2
    sq = Polytope([[1, 1], [1, -1], [-1, 1], [-1, -1]])
    assert core.metric_D(polar(sq), DIAMOND) <= 1e-12
    assert core.metric_D(polar(polar(DIAMOND)), DIAMOND) <= 1e-12
    assert polar(Ball(O, 1, NormKind.L1)).norm is NormKind.LINF


def test_polar_errors():
    with pytest.raises(ValueError):
        polar(Ball(O, 0.0))
    with pytest.raises(ValueError):
        polar(Polytope([[0, 0], [1, 0], [0, 1]]))
    with pytest.warns(UserWarning):
        polar(Polytope([[2, 0], [-1, 1], [-1, -1]]))


def test_polar_in_three_dimensions():
    cube = box([-1, -1, -1], [1, 1, 1])
    octa = Polytope(np.vstack([np.eye(3), -np.eye(3)]))
    assert core.metric_D(polar(cube), octa) <= 1e-9


def test_dual_norm_examples():
    T = TestFamily(((np.array([1.0, 0.0]), point([0, 0])),))
    assert dual_kappa_norm_sampled(O, Ball([3, 0], 1), T) == pytest.approx(2.0)
    assert dual_kappa_norm_sampled([3, 0], Ball([3, 0], 1), T) == 0.0
    Td = TestFamily(((O, Ball([3, 0], 1)),))
    # inf |<b, -(3, 0)>| over the ball is 6, and rho(0, B) = 2
    ref = brute_form(np.array([3.0, 0.0]), point([0, 0]), O, Ball([3, 0], 1)) / 2.0
    assert ref == pytest.approx(3.0)
    assert rho_tilde_sampled([3, 0], point([0, 0]), Td) == pytest.approx(ref)
    fam = default_test_family(2, seed=0)
    assert rho_tilde_sampled([3, 0], Ball(O, 1), fam) <= 2.0
    assert rho_tilde_sampled([0.5, 0], Ball(O, 1), fam) == 0.0


def test_family_rejects_zero_distance_probe():
    with pytest.raises(ValueError):
        TestFamily(((np.array([0.0, 0.0]), Ball(O, 1.0)),))
    with pytest.raises(ValueError):
        TestFamily(())


def test_family_json_round_trip():
    fam = default_test_family(2, seed=4, n=6)
    again = TestFamily.from_json(fam.to_json())
    assert again.to_json() == fam.to_json()


def test_equivalence_examples():
    fam = default_test_family(2, seed=1)
    samples = [(np.array([3.0, 0.0]), Ball(O, 1)), (np.array([0.0, 4.0]), SEG), (np.array([1.0, 1.0]), point([2, 2]))]
    assert equivalence_constants(samples, fam, rho_tilde_fn=core.rho)[:2] == (1.0, 1.0)
    c = equivalence_constants(samples, fam, rho_tilde_fn=lambda x, A: core.rho(x, A) / 2)
    assert c.c1 == pytest.approx(2.0) and c.c2 == pytest.approx(2.0)
    c = equivalence_constants(samples, fam)
    assert c.c1 <= c.c2


def test_equivalence_flags_degenerate_samples():
    fam = TestFamily(((np.array([0.0, 1.0]), Subspace.span([[1, 0]])),))
    c = equivalence_constants([(np.array([3.0, 0.0]), Ball(O, 1))], fam)
    assert c.degenerate == [0] and math.isnan(c.c1)


# ---------------------------------------------------------------- oracles


@given(vec2, simplex2, vec2, simplex2)
def test_vertex_pair_rule_matches_grid(x, A, y, B):
    ref = grid_kappa_form(x, A.vertices, y, B.vertices, step=5e-2)
    assert kappa_form(x, A, y, B) == pytest.approx(ref, abs=1e-9)


@given(vec2, ball2, vec2, poly2)
def test_ball_polytope_matches_sampling(x, A, y, B):
    got = kappa_form(x, A, y, B)
    ref = brute_form(x, A, y, B)
    # sampling only sees part of the image, so it can only overestimate the gap to zero
    assert got <= ref + 1e-9
    assert ref - got <= 0.05 * (1 + np.abs(B.vertices).max() + np.abs(y).max()) ** 2


@given(vec2, ball2, vec2, ball2)
def test_ball_ball_matches_sampling(x, A, y, B):
    got = kappa_form(x, A, y, B)
    ref = brute_form(x, A, y, B)
    assert got <= ref + 1e-9
    assert ref - got <= 0.05 * (1 + np.abs(A.center).max() + A.radius + np.abs(x).max()) ** 2


# ---------------------------------------------------------------- properties


@given(vec2, convex2, vec2, convex2)
def test_termwise_cauchy_schwarz_bound(x, A, y, B):
    assert kappa_form(x, A, y, B) <= core.rho(x, A) * core.rho(y, B) + 1e-12


@given(vec2, convex2, st.integers(0, 50))
def test_sampled_norms_bounded_by_rho(x, A, seed):
    fam = default_test_family(2, seed, n=8)
    assert rho_tilde_sampled(x, A, fam) <= core.rho(x, A) + 1e-12
    assert dual_kappa_norm_sampled(x, A, fam) <= core.rho(x, A) + 1e-12


@given(vec2, poly2, vec2, st.integers(0, 50))
def test_sampled_dual_norm_antitone(y, B, extra, seed):
    fam = default_test_family(2, seed, n=8)
    bigger = Polytope(np.vstack([B.vertices, extra]))
    assert dual_kappa_norm_sampled(y, bigger, fam) <= dual_kappa_norm_sampled(y, B, fam) + 1e-9


@given(vec2, poly2, st.floats(0.25, 3), vec2, st.integers(0, 50))
def test_sampled_dual_norm_translation_and_scaling(y, B, lam, b, seed):
    fam = default_test_family(2, seed, n=8)
    base = dual_kappa_norm_sampled(y, B, fam)
    scaled = dual_kappa_norm_sampled(lam * y, core.affine_transform(lam, O, B), fam)
    assert scaled == pytest.approx(lam * base, rel=1e-9, abs=1e-9)
    moved = dual_kappa_norm_sampled(y + b, core.affine_transform(1, b, B), fam)
    assert moved == pytest.approx(base, rel=1e-9, abs=1e-9)


def _balanced_polygon(rng, k):
    th = np.sort(rng.uniform(0, np.pi, k))
    r = rng.uniform(0.5, 2.0, k)
    V = np.column_stack([r * np.cos(th), r * np.sin(th)])
    return Polytope(np.vstack([V, -V]))


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_bipolar_identity(seed, k):
    P = _balanced_polygon(np.random.default_rng(seed), k)
    assert core.metric_D(polar(polar(P)), P) <= 1e-9


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_polar_is_antitone(seed, k):
    P = _balanced_polygon(np.random.default_rng(seed), k)
    Q = Polytope(np.vstack([P.vertices, 1.3 * P.vertices]))
    for v in polar(Q).hull:
        assert core.rho(v, polar(P)) <= 1e-9


@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_polar_vertices_pair_to_at_most_one(seed, k):
    P = _balanced_polygon(np.random.default_rng(seed), k)
    G = P.vertices @ polar(P).hull.T
    assert np.abs(G).max() <= 1 + 1e-9


# ---------------------------------------------------------------- suite


def test_suite_holds_for_the_exact_axioms():
    rep = dualform.duality_axiom_suite(GeneratorConfig(seed=7, dim=2, instances=60))
    for name in ("D1c", "D2", "D4", "D6", "D7", "D8"):
        assert rep[name].passed, rep[name].to_json()
        assert rep[name].checked > 0


def test_subadditivity_counterexample_for_the_concrete_form():
    # two singletons on either side of a segment whose sum straddles nothing
    y, B = O, Polytope([[1, 0], [0, 1]])
    A1, A2 = point([2, -1]), point([-1, 2])
    single = kappa_form(O, A1, y, B) + kappa_form(O, A2, y, B)
    summed = kappa_form(O, core.minkowski_sum_cl(A1, A2), y, B)
    assert single == 0.0 and summed == 1.0
    assert grid_kappa_form(O, np.array([[1.0, 1.0]]), y, B.vertices) == 1.0


def test_subadditivity_witness_replays():
    rep = dualform.duality_axiom_suite(GeneratorConfig(seed=7, dim=2, instances=60))
    r = rep["D5a"]
    assert not r.passed
    w = {k: from_json(v) if isinstance(v, dict) else np.array(v) for k, v in r.witness.items()}
    f = kappa_form
    base = f(w["x"], w["A"], w["y"], w["B"])
    v1 = f(w["x"] + w["x2"], core.minkowski_sum_cl(w["A"], w["A2"]), w["y"], w["B"]) - base - f(w["x2"], w["A2"], w["y"], w["B"])
    v2 = f(w["x"], w["A"], w["y"] + w["y2"], core.minkowski_sum_cl(w["B"], w["B2"])) - base - f(w["x"], w["A"], w["y2"], w["B2"])
    assert max(v1, v2) == pytest.approx(r.worst_violation, rel=1e-9)


def test_suite_is_deterministic():
    cfg = GeneratorConfig(seed=2, dim=2, instances=10)
    assert dualform.duality_axiom_suite(cfg).to_json() == dualform.duality_axiom_suite(cfg).to_json()
