"""Duality form <(x,A)|(y,B)> = inf_{a in A, b in B} |<b - y, a - x>| on R^d.

The dual space is identified with R^d through the dot product. Dual
kappa-norms defined by suprema over all point/set pairs are replaced by
maxima over explicit probe families, so they are lower bounds of the
unsampled quantities.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog, minimize_scalar
from scipy.spatial import ConvexHull, QhullError

from . import core
from .axioms import GeneratorConfig
from .errors import UnsupportedSetError
from .geometry import hull_vertices, min_norm_point
from .reports import SuiteReport, ViolationTracker
from .sets import (
    Ball,
    Cylinder,
    Empty,
    NormKind,
    Polytope,
    Subspace,
    Union,
    as_vector,
    check_dims,
    from_json,
    is_empty,
    to_json,
)

VANISH_TOL = 1e-12


# ---------------------------------------------------------------- the form


def kappa_form(x, A, y, B):
    """inf over a in A, b in B of |<b - y, a - x>|; +inf per the empty-set rule."""
    x, y = as_vector(x), as_vector(y)
    for S, p in ((A, x), (B, y)):
        check_dims(p, S)
        if isinstance(S, (Union, Cylinder)):
            raise UnsupportedSetError(f"kappa_form is undefined for {type(S).__name__}")
    if x.size != y.size:
        raise ValueError("kappa_form: x and y must have the same dimension")
    a_empty, b_empty = is_empty(A), is_empty(B)
    if a_empty or b_empty:
        if (not a_empty and core.contains(A, x)) or (not b_empty and core.contains(B, y)):
            return 0.0
        return math.inf
    lo, hi = form_image(x, A, y, B)
    if lo <= 0.0 <= hi:
        return 0.0
    return min(abs(lo), abs(hi))


def form_image(x, A, y, B):
    """Closed interval {<b - y, a - x> : a in A, b in B} as (lo, hi)."""
    A = _reduce_subspace(A, B, y)
    if A is None:
        return -math.inf, math.inf
    B = _reduce_subspace(B, A, x)
    if B is None:
        return -math.inf, math.inf
    if isinstance(A, Ball) and A.norm is not NormKind.L2:
        A = core.ball_to_polytope(A)
    if isinstance(B, Ball) and B.norm is not NormKind.L2:
        B = core.ball_to_polytope(B)
    if isinstance(A, Polytope) and isinstance(B, Polytope):
        G = (B.hull - y) @ (A.hull - x).T
        return float(G.min()), float(G.max())
    if isinstance(A, Ball) and isinstance(B, Polytope):
        return _ball_poly_image(A.center - x, A.radius, B.hull - y)
    if isinstance(A, Polytope) and isinstance(B, Ball):
        return _ball_poly_image(B.center - y, B.radius, A.hull - x)
    return _ball_ball_image(A.center - x, A.radius, B.center - y, B.radius)


def _reduce_subspace(S, other, other_point):
    """Replace a subspace by its offset point when the pairing cannot move along it.

    Returns None when the image is the whole real line.
    """
    if not isinstance(S, Subspace) or len(S.basis) == 0:
        return Polytope(S.offset.reshape(1, -1)) if isinstance(S, Subspace) else S
    Q = S.basis
    if isinstance(other, Polytope):
        moving = np.max(np.abs((other.hull - other_point) @ Q.T)) > VANISH_TOL
    elif isinstance(other, Ball):
        moving = other.radius > 0.0 or np.max(np.abs(Q @ (other.center - other_point))) > VANISH_TOL
    elif isinstance(other, Subspace):
        moving = (
            np.max(np.abs(Q @ (other.offset - other_point))) > VANISH_TOL
            or (len(other.basis) > 0 and np.max(np.abs(Q @ other.basis.T)) > VANISH_TOL)
        )
    else:
        raise UnsupportedSetError(type(other).__name__)
    if moving:
        return None
    return Polytope(S.offset.reshape(1, -1))


def _ball_poly_image(m, r, U):
    # <u, m + r s> over |s| <= 1, u over the polytope U; both extremes at vertices
    centre = U @ m
    spread = r * np.linalg.norm(U, axis=1)
    return float(np.min(centre - spread)), float(np.max(centre + spread))


def _ball_ball_image(mw, rw, mu, ru):
    d = mw.size
    if ru == 0.0:
        return _ball_poly_image(mw, rw, mu.reshape(1, -1))
    if rw == 0.0:
        return _ball_poly_image(mu, ru, mw.reshape(1, -1))
    if d == 1:
        cands = [(mu[0] + su * ru) * (mw[0] + sw * rw) for su in (-1, 1) for sw in (-1, 1)]
        return min(cands), max(cands)
    # u = mu + ru s on the sphere; only the projection of s on span{mu, mw} matters
    E = _plane_basis(mu, mw)

    def g(theta, sign):
        theta = np.asarray(theta, dtype=float)
        s = np.multiply.outer(np.cos(theta), E[0]) + np.multiply.outer(np.sin(theta), E[1])
        u = mu + ru * s
        return u @ mw + sign * rw * np.linalg.norm(u, axis=-1)

    th = np.linspace(0.0, 2.0 * np.pi, 2049)[:-1]
    step = th[1] - th[0]

    def extreme(sign, maximise):
        vals = g(th, sign)
        k = int(np.argmax(vals) if maximise else np.argmin(vals))
        f = (lambda t: -g(t, sign)) if maximise else (lambda t: g(t, sign))
        res = minimize_scalar(f, bounds=(th[k] - step, th[k] + step), method="bounded",
                              options={"xatol": 1e-13})
        best = float(g(res.x, sign))
        return max(best, vals[k]) if maximise else min(best, vals[k])

    return float(extreme(-1.0, False)), float(extreme(+1.0, True))


def _plane_basis(a, b):
    M = np.vstack([a, b])
    _, s, vt = np.linalg.svd(M)
    basis = [vt[i] for i in range(len(s)) if s[i] > VANISH_TOL * max(1.0, s[0])]
    full = np.linalg.qr(np.vstack(basis + [np.eye(a.size)]).T)[0].T if basis else np.eye(a.size)
    return full[:2]


# ---------------------------------------------------------------- polars


def annihilator(M):
    """Orthogonal complement of a subspace through the origin."""
    if not isinstance(M, Subspace):
        raise UnsupportedSetError("annihilator needs a Subspace")
    if not M.through_origin:
        raise ValueError("annihilator: subspace must pass through the origin")
    d = M.dim
    if len(M.basis) == 0:
        return Subspace(np.eye(d), np.zeros(d))
    N = null_space(M.basis)
    return Subspace(N.T, np.zeros(d))


def polar(A):
    """Absolute polar {b : |<q, b>| <= 1 for all q in A}."""
    if isinstance(A, Subspace):
        return annihilator(A)
    if isinstance(A, Ball):
        if np.max(np.abs(A.center)) > VANISH_TOL:
            raise UnsupportedSetError("polar of an off-centre ball is not a ball")
        if A.radius == 0.0:
            raise ValueError("polar of a zero-radius ball is unbounded")
        dual = {NormKind.L2: NormKind.L2, NormKind.L1: NormKind.LINF, NormKind.LINF: NormKind.L1}
        return Ball(np.zeros(A.dim), 1.0 / A.radius, dual[A.norm])
    if not isinstance(A, Polytope):
        raise UnsupportedSetError(f"polar is not implemented for {type(A).__name__}")
    V = A.hull
    d = A.dim
    if not _origin_interior(V):
        raise ValueError("polar: the origin must lie in the interior of the polytope")
    if not all(core.rho(-v, A) <= 1e-9 for v in V):
        warnings.warn("polar: polytope is not balanced; returning the polar of conv(A, -A)",
                      stacklevel=2)
    sym = np.vstack([V, -V])
    if d == 1:
        m = float(np.max(np.abs(sym)))
        return Polytope(np.array([[-1.0 / m], [1.0 / m]]))
    if d == 2:
        H = hull_vertices(sym)
        P, Q = H, np.roll(H, -1, axis=0)
        n = np.column_stack([Q[:, 1] - P[:, 1], P[:, 0] - Q[:, 0]])
        h = np.einsum("ij,ij->i", n, P)
        return Polytope(n / h[:, None])
    hull = ConvexHull(sym)
    verts = hull.equations[:, :-1] / (-hull.equations[:, -1])[:, None]
    return Polytope(hull_vertices(np.unique(np.round(verts, 14), axis=0)))


def _origin_interior(V, tol=1e-12):
    d = V.shape[1]
    if d == 1:
        return V.min() < -tol and V.max() > tol
    if d == 2:
        if len(V) < 3:
            return False
        P, Q = V, np.roll(V, -1, axis=0)
        cross = (Q[:, 0] - P[:, 0]) * (-P[:, 1]) - (Q[:, 1] - P[:, 1]) * (-P[:, 0])
        return bool(np.all(cross > tol))
    try:
        hull = ConvexHull(V)
    except QhullError:
        return False
    return bool(np.all(hull.equations[:, -1] < -tol))


# ---------------------------------------------------------------- sampled dual norms


@dataclass(frozen=True, eq=False)
class TestFamily:
    """Finite probe list of (point, set) pairs with positive distance."""

    __test__ = False  # not a pytest class
    probes: tuple

    def __post_init__(self):
        probes = tuple((as_vector(x), A) for x, A in self.probes)
        if not probes:
            raise ValueError("a test family needs at least one probe")
        for x, A in probes:
            if not core.rho(x, A) > 0.0:
                raise ValueError("every probe must satisfy rho(x, A) > 0")
        object.__setattr__(self, "probes", probes)

    def to_json(self):
        return {"probes": [{"x": [float(t) for t in x], "A": to_json(A)} for x, A in self.probes]}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple((p["x"], from_json(p["A"])) for p in obj["probes"]))


def default_test_family(dim, seed, n=32):
    """Singletons at seeded points plus unit balls at seeded centres."""
    rng = np.random.default_rng(seed)
    probes = []
    while len(probes) < n:
        x = rng.uniform(-3.0, 3.0, dim)
        if len(probes) % 2 == 0:
            A = Polytope(rng.uniform(-3.0, 3.0, (1, dim)))
        else:
            A = Ball(rng.uniform(-3.0, 3.0, dim), 1.0)
        if core.rho(x, A) > 1e-3:
            probes.append((x, A))
    return TestFamily(tuple(probes))


def dual_kappa_norm_sampled(y, B, family):
    """max over probes (x, A) of kappa_form(x, A, y, B) / rho(x, A)."""
    return max(kappa_form(x, A, y, B) / core.rho(x, A) for x, A in family.probes)


def rho_tilde_sampled(x, A, dual_family):
    """max over dual probes (y, B) of kappa_form(x, A, y, B) / rho(y, B)."""
    return max(kappa_form(x, A, y, B) / core.rho(y, B) for y, B in dual_family.probes)


class Equivalence(NamedTuple):
    c1: float
    c2: float
    degenerate: list


def equivalence_constants(samples, dual_family, rho_fn=None, rho_tilde_fn=None):
    """Empirical (min, max) of rho / rho_tilde over ``samples``.

    Samples with rho_tilde = 0 < rho are excluded and listed in ``degenerate``.
    """
    rho_fn = rho_fn or core.rho
    rho_tilde_fn = rho_tilde_fn or (lambda x, A: rho_tilde_sampled(x, A, dual_family))
    ratios, degenerate = [], []
    for i, (x, A) in enumerate(samples):
        r, rt = rho_fn(x, A), rho_tilde_fn(x, A)
        if rt > 0.0:
            ratios.append(r / rt)
        elif r > 0.0:
            degenerate.append(i)
    if not ratios:
        return Equivalence(math.nan, math.nan, degenerate)
    return Equivalence(min(ratios), max(ratios), degenerate)


# ---------------------------------------------------------------- axiom suite


def sup_form_over(C, x_set, y, B):
    """sup_{z in C} kappa_form(z, x_set, y, B) for polytopes, by two small LPs."""
    U = B.hull - y
    Av = x_set.hull
    Cv = C.hull
    rows_u = np.repeat(U, len(Av), axis=0)          # pair (j, i)
    rhs = np.einsum("ij,ij->i", rows_u, np.tile(Av, (len(U), 1)))
    UC = rows_u @ Cv.T                               # <u_j, c_k>
    n = len(Cv)
    best = 0.0
    # sup lo(z):  t <= <u, a> - <u, z>;   sup -hi(z):  t <= <u, z> - <u, a>
    for sign in (1.0, -1.0):
        A_ub = np.hstack([np.ones((len(rhs), 1)), sign * UC])
        b_ub = sign * rhs
        res = linprog(np.r_[-1.0, np.zeros(n)], A_ub=A_ub, b_ub=b_ub,
                      A_eq=np.r_[0.0, np.ones(n)].reshape(1, -1), b_eq=[1.0],
                      bounds=[(None, None)] + [(0, None)] * n, method="highs")
        if res.status == 0:
            best = max(best, -res.fun)
    return best


DUAL_AXIOMS = ("D1c", "D2", "D4", "D5a", "D5b", "D6", "D7", "D8")


def _rand_poly(rng, d, lo=1, hi=5, scale=1.0):
    n = int(rng.integers(lo, hi + 1))
    return Polytope(rng.uniform(-2.0, 2.0, d) + scale * rng.uniform(-1.0, 1.0, (n, d)))


def _rand_point(rng, P, p_inside=0.15):
    if rng.random() < p_inside:
        return rng.dirichlet(np.ones(len(P.vertices))) @ P.vertices
    return rng.uniform(-3.0, 3.0, P.dim)


def _grow(rng, P):
    extra = P.vertices.mean(axis=0) + rng.uniform(-1.5, 1.5, (int(rng.integers(1, 3)), P.dim))
    return Polytope(np.vstack([P.vertices, extra]))


def _w(**kw):
    out = {}
    for k, v in kw.items():
        out[k] = to_json(v) if isinstance(v, (Polytope, Ball, Subspace, Empty)) else [float(t) for t in np.ravel(v)]
    return out


def duality_axiom_suite(config, tol=1e-9):
    """Check (D1c), (D2), (D4)-(D8) for ``kappa_form`` on random polytopes."""
    rng = np.random.default_rng(config.seed)
    d = config.dim
    T = ViolationTracker(DUAL_AXIOMS, tol)
    f = kappa_form
    for _ in range(config.instances):
        A, B = _rand_poly(rng, d), _rand_poly(rng, d)
        x, y = _rand_point(rng, A), _rand_point(rng, B)
        val = f(x, A, y, B)

        # D2: larger sets give smaller values
        A1, B1 = _grow(rng, A), _grow(rng, B)
        T.record("D2", max(0.0, f(x, A1, y, B1) - val), _w(x=x, A=A, y=y, B=B))

        # D4: increasing chains shrinking towards an interior point
        ca = rng.dirichlet(np.ones(len(A.vertices))) @ A.vertices
        cb = rng.dirichlet(np.ones(len(B.vertices))) @ B.vertices
        chain_a = [f(x, core.affine_transform(1 - 2.0 ** -k, 2.0 ** -k * ca, A), y, B) for k in range(1, 51)]
        chain_b = [f(x, A, y, core.affine_transform(1 - 2.0 ** -k, 2.0 ** -k * cb, B)) for k in range(1, 51)]
        T.record("D4", max(abs(min(chain_a) - val), abs(min(chain_b) - val)), _w(x=x, A=A, y=y, B=B))

        # D5a: subadditivity in each argument pair
        A2 = _rand_poly(rng, d)
        x2 = _rand_point(rng, A2)
        lhs = f(x + x2, core.minkowski_sum_cl(A, A2), y, B)
        v1 = max(0.0, lhs - val - f(x2, A2, y, B))
        B2 = _rand_poly(rng, d)
        y2 = _rand_point(rng, B2)
        lhs = f(x, A, y + y2, core.minkowski_sum_cl(B, B2))
        v2 = max(0.0, lhs - val - f(x, A, y2, B2))
        T.record("D5a", max(v1, v2), _w(x=x, A=A, y=y, B=B, x2=x2, A2=A2, y2=y2, B2=B2))

        # D5b: triangle law through an intermediate set C (or E)
        C = _rand_poly(rng, d)
        v1 = max(0.0, val - f(x, C, y, B) - sup_form_over(C, A, y, B))
        E = _rand_poly(rng, d)
        v2 = max(0.0, val - f(x, A, y, E) - sup_form_over(E, B, x, A))
        T.record("D5b", max(v1, v2), _w(x=x, A=A, y=y, B=B, C=C, E=E))

        # D6
        lam = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        zero = np.zeros(d)
        s1 = f(lam * x, core.affine_transform(lam, zero, A), y, B)
        s2 = f(x, A, lam * y, core.affine_transform(lam, zero, B))
        T.record("D6", max(abs(s1 - abs(lam) * val), abs(s2 - abs(lam) * val)), _w(x=x, A=A, y=y, B=B))

        # D7
        a, b = rng.uniform(-2, 2, d), rng.uniform(-2, 2, d)
        T.record("D7", abs(f(x + a, core.affine_transform(1.0, a, A), y + b, core.affine_transform(1.0, b, B)) - val),
                 _w(x=x, A=A, y=y, B=B))

        # D8: empty arguments give +inf away from the sets
        if not core.contains(A, x) and not core.contains(B, y):
            ok = f(x, A, y, Empty(d)) == math.inf and f(x, Empty(d), y, B) == math.inf
            T.record("D8", 0.0 if ok else 1.0, _w(x=x, A=A, y=y, B=B))

        # D1c: a separating dual probe exists when x is outside A
        if not core.contains(A, x):
            p, _, _ = min_norm_point(A.vertices - x)
            n = p / np.linalg.norm(p)
            cands = [(zero, Polytope(n.reshape(1, -1))), (zero, Ball(n, 0.5 * core.rho(x, A) / (1.0 + _diam(A, x))))]
            best = max(f(x, A, yy, BB) for yy, BB in cands)
            T.record("D1c", 0.0 if best > 0 else 1.0, _w(x=x, A=A))

    return SuiteReport("duality", asdict(config), T.results())


def _diam(A, x):
    return float(np.max(np.linalg.norm(A.vertices - x, axis=1)))


__all__ = [
    "kappa_form",
    "form_image",
    "annihilator",
    "polar",
    "TestFamily",
    "default_test_family",
    "dual_kappa_norm_sampled",
    "rho_tilde_sampled",
    "Equivalence",
    "equivalence_constants",
    "sup_form_over",
    "duality_axiom_suite",
    "GeneratorConfig",
]
