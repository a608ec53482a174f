"""Point-to-set kappa-norm over R^d and the set operations it is tested on.

``rho(x, C)`` is the infimum distance from ``x`` to ``C`` (Euclidean unless
``C`` is a ball carrying another norm), ``rho_bar`` its directed supremum
over a source set, and ``metric_D`` the symmetrised sum of the two
directed distances.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import DimensionError, EmptySetError, UnsupportedSetError
from .geometry import (
    hull_vertices,
    inradius_about,
    polytope_distance,
    regular_polygon,
    sphere_points,
)
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
    is_empty,
    orthonormalize,
    require_nonempty,
)

MEMBERSHIP_TOL = 1e-9
BALL_SAMPLES = 64
SUP_SAMPLES_2D = 4096


def _norm(v, kind):
    if kind is NormKind.L2:
        return float(np.sqrt(v @ v))
    if kind is NormKind.L1:
        return float(np.sum(np.abs(v)))
    return float(np.max(np.abs(v)))


def _project_out(v, basis):
    if len(basis) == 0:
        return v
    return v - (v @ basis.T) @ basis


def rho(x, C):
    """Distance from the point ``x`` to the closed set ``C``; +inf for Empty."""
    x = as_vector(x)
    check_dims(x, C)
    if isinstance(C, Ball):
        return max(0.0, _norm(x - C.center, C.norm) - C.radius)
    if isinstance(C, Polytope):
        return polytope_distance(x, C.vertices, C.hull if C.dim == 2 else None)
    if isinstance(C, Subspace):
        r = _project_out(x - C.offset, C.basis)
        return float(np.sqrt(r @ r))
    if isinstance(C, Cylinder):
        D = C.directions
        base = C.base
        if isinstance(base, Ball) and base.norm is NormKind.L2:
            r = _project_out(x - base.center, D)
            return max(0.0, float(np.sqrt(r @ r)) - base.radius)
        V = _project_out(_vertices_of(base), D)
        return polytope_distance(_project_out(x, D), V)
    if isinstance(C, Union):
        return min(rho(x, p) for p in C.parts)
    if isinstance(C, Empty):
        return math.inf
    raise TypeError(f"not a ClosedSet: {C!r}")


def contains(C, x, tol=MEMBERSHIP_TOL):
    return rho(x, C) <= tol


# ---------------------------------------------------------------- polytope views


def ball_to_polytope(B, m=BALL_SAMPLES, outer=False):
    """Polytope inscribed in (or, with ``outer``, circumscribing) a ball.

    L1 and LINF balls are polytopes already and are converted exactly.
    """
    d, c, r = B.dim, B.center, B.radius
    if B.norm is NormKind.LINF:
        return Polytope(c + r * np.array(np.meshgrid(*[[-1.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T)
    if B.norm is NormKind.L1:
        return Polytope(c + r * np.vstack([np.eye(d), -np.eye(d)]))
    if r == 0.0 or d == 1:
        return Polytope(np.array([c - r, c + r]).reshape(-1, d))
    if d == 2:
        return Polytope(regular_polygon(m, r, c, outer=outer))
    U = sphere_points(m, d)
    if outer:
        U = U / inradius_about(U, np.zeros(d))
    return Polytope(c + r * U)


def _vertices_of(C, m=BALL_SAMPLES):
    if isinstance(C, Polytope):
        return np.asarray(C.vertices)
    if isinstance(C, Ball):
        return np.asarray(ball_to_polytope(C, m).vertices)
    raise UnsupportedSetError(f"{type(C).__name__} has no vertex representation")


def _direction_span(C):
    if isinstance(C, Subspace):
        return C.basis
    if isinstance(C, Cylinder):
        return C.directions
    return np.zeros((0, C.dim))


def _spans_contain(outer, inner, tol=1e-9):
    if len(inner) == 0:
        return True
    if len(outer) == 0:
        return False
    resid = inner - (inner @ outer.T) @ outer
    return float(np.max(np.abs(resid))) <= tol


# ---------------------------------------------------------------- directed distance


def rho_bar_resolved(A, B, samples=SUP_SAMPLES_2D):
    """``(sup_{x in A} rho(x, B), resolution)``.

    ``resolution`` is 0 when the value is exact and otherwise bounds how far
    the sampled supremum may sit below the true one.
    """
    if is_empty(A):
        raise EmptySetError("rho_bar: source set must be nonempty")
    if A.dim is not None and B.dim is not None and A.dim != B.dim:
        raise DimensionError("rho_bar: dimension mismatch")
    if is_empty(B):
        return math.inf, 0.0
    if isinstance(A, Union):
        vals = [rho_bar_resolved(p, B, samples) for p in A.parts if not is_empty(p)]
        return max(v for v, _ in vals), max(r for _, r in vals)
    convex_target = not isinstance(B, Union)

    if isinstance(A, Subspace) or isinstance(A, Cylinder):
        dirs = _direction_span(A)
        if not _spans_contain(_direction_span(B), dirs):
            return math.inf, 0.0
        src = Polytope(A.offset.reshape(1, -1)) if isinstance(A, Subspace) else A.base
        return rho_bar_resolved(src, B, samples)
    if isinstance(A, Ball) and A.norm is not NormKind.L2:
        A = ball_to_polytope(A)
    if isinstance(A, Polytope):
        V = A.hull
        if convex_target:
            if isinstance(B, Polytope) and B.dim == 2:
                return float(kernels.directed_hausdorff_2d(V, B.hull)), 0.0
            return max(rho(v, B) for v in V), 0.0
        return _sampled_sup(A, B, samples)
    if isinstance(A, Ball):
        if isinstance(B, Ball) and B.norm is NormKind.L2:
            return max(0.0, float(np.linalg.norm(A.center - B.center)) + A.radius - B.radius), 0.0
        if A.radius == 0.0:
            return rho(A.center, B), 0.0
        if convex_target:
            return _sampled_ball_boundary_sup(A, B, samples)
        return _sampled_sup(A, B, samples)
    raise TypeError(f"not a ClosedSet: {A!r}")


def _sampled_ball_boundary_sup(A, B, samples):
    # convex x -> rho(x, B) peaks on the sphere
    d, r = A.dim, A.radius
    if d == 1:
        return max(rho(A.center - r, B), rho(A.center + r, B)), 0.0
    U = sphere_points(samples if d == 2 else max(samples // 4, 512), d)
    vals = [rho(A.center + r * u, B) for u in U]
    if d == 2:
        resolution = 2.0 * r * math.sin(math.pi / (2 * samples))
    else:
        resolution = r * math.sqrt(8.0 / len(U))
    return max(vals), resolution


def _sampled_sup(A, B, samples):
    rng = np.random.default_rng(0)
    V = A.hull if isinstance(A, Polytope) else _vertices_of(A)
    w = rng.dirichlet(np.ones(len(V)), size=samples)
    pts = np.vstack([V, w @ V])
    diam = float(np.max(np.linalg.norm(V - V.mean(axis=0), axis=1))) * 2.0
    k = max(1, A.dim)
    return max(rho(p, B) for p in pts), diam / samples ** (1.0 / k)


def rho_bar(A, B):
    """Directed distance sup_{x in A} rho(x, B)."""
    return rho_bar_resolved(A, B)[0]


def metric_D(A, B):
    """Symmetrised directed distance rho_bar(A, B) + rho_bar(B, A)."""
    require_nonempty(A, "metric_D argument")
    require_nonempty(B, "metric_D argument")
    return rho_bar(A, B) + rho_bar(B, A)


# ---------------------------------------------------------------- set algebra


def _polytope_sum(P, Q):
    if P.dim == 2:
        return Polytope(kernels.minkowski_sum_2d(P.hull, Q.hull))
    sums = (P.hull[:, None, :] + Q.hull[None, :, :]).reshape(-1, P.dim)
    return Polytope(hull_vertices(sums))


def minkowski_sum_bracket(P, B, m=BALL_SAMPLES):
    """(inner, outer) polytopes around P + B for an L2 ball B."""
    inner = _polytope_sum(P, ball_to_polytope(B, m))
    outer = _polytope_sum(P, ball_to_polytope(B, m, outer=True))
    return inner, outer


def minkowski_sum_cl(A, B, m=BALL_SAMPLES):
    """Closure of A + B for convex operands.

    Exact except for a polytope plus a Euclidean ball, where the ball is
    replaced by its inscribed ``m``-vertex polytope (the inner half of
    ``minkowski_sum_bracket``).
    """
    for S in (A, B):
        if isinstance(S, (Union, Empty)):
            raise UnsupportedSetError(f"minkowski_sum_cl is undefined for {type(S).__name__}")
    if A.dim != B.dim:
        raise DimensionError("minkowski_sum_cl: dimension mismatch")
    if isinstance(A, (Subspace, Cylinder)) or isinstance(B, (Subspace, Cylinder)):
        return _flat_sum(A, B, m)
    if isinstance(A, Ball) and isinstance(B, Ball) and A.norm is B.norm:
        return Ball(A.center + B.center, A.radius + B.radius, A.norm)
    if isinstance(A, Ball) and A.norm is NormKind.L2 and isinstance(B, Ball):
        A, B = B, A
    PA = ball_to_polytope(A, m) if isinstance(A, Ball) else A
    PB = ball_to_polytope(B, m) if isinstance(B, Ball) else B
    return _polytope_sum(PA, PB)


def _flat_sum(A, B, m):
    d = A.dim
    dirs = orthonormalize(np.vstack([_direction_span(A), _direction_span(B)]), d)

    def bounded_part(S):
        if isinstance(S, Subspace):
            return Polytope(S.offset.reshape(1, -1))
        if isinstance(S, Cylinder):
            return S.base
        return S

    base = minkowski_sum_cl(bounded_part(A), bounded_part(B), m)
    if isinstance(base, Ball):
        c = _project_out(base.center, dirs)
        base = Ball(c, base.radius, base.norm)
        if base.radius == 0.0:
            base = Polytope(c.reshape(1, -1))
    else:
        base = Polytope(hull_vertices(_project_out(np.asarray(base.vertices), dirs)))
    if isinstance(base, Polytope) and len(base.hull) == 1:
        return Subspace(dirs, base.hull[0])
    if len(dirs) == 0:
        return base
    return Cylinder(base, dirs)


def affine_transform(lam, shift, A):
    """lam * A + shift, preserving the variant."""
    lam = float(lam)
    if lam == 0.0 or not math.isfinite(lam):
        raise ValueError("affine_transform requires a finite nonzero scale")
    if isinstance(A, Empty):
        return A
    shift = as_vector(shift, A.dim)
    if isinstance(A, Ball):
        return Ball(lam * A.center + shift, abs(lam) * A.radius, A.norm)
    if isinstance(A, Polytope):
        return Polytope(lam * A.vertices + shift)
    if isinstance(A, Subspace):
        return Subspace(A.basis, lam * A.offset + shift)
    if isinstance(A, Cylinder):
        return Cylinder(affine_transform(lam, shift, A.base), A.directions)
    if isinstance(A, Union):
        return Union(tuple(affine_transform(lam, shift, p) for p in A.parts))
    raise TypeError(f"not a ClosedSet: {A!r}")


def quotient_project(x, M):
    """Orthogonal-complement representative of x + M and its norm."""
    x = as_vector(x)
    if not isinstance(M, Subspace):
        raise UnsupportedSetError("quotient_project needs a Subspace")
    check_dims(x, M)
    if not M.through_origin:
        raise ValueError("quotient_project: subspace must pass through the origin")
    r = _project_out(x, M.basis)
    return r, float(np.sqrt(r @ r))


def extend_to_singleton(x, N):
    """max_{1<=n<=N} rho(x, Ball(0, 1/n)); within 1/N of |x|."""
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    x = as_vector(x)
    return max(rho(x, Ball(np.zeros(x.size), 1.0 / n)) for n in range(1, int(N) + 1))


def seminorm_sup(family, x):
    """max_i dist(x, M_i) over a finite family of linear subspaces; 0 if empty."""
    x = as_vector(x)
    best = 0.0
    for M in family:
        if not isinstance(M, Subspace) or not M.through_origin:
            raise ValueError("seminorm family members must be subspaces through the origin")
        best = max(best, rho(x, M))
    return best


def perturb_bound(C_v, eps):
    """Pick C_sigma = Ball(0, eps/2) and report D(cl(C_v + C_sigma), C_v) < eps."""
    eps = float(eps)
    if not eps > 0:
        raise ValueError("eps must be positive")
    require_nonempty(C_v, "C_v")
    C_sigma = Ball(np.zeros(C_v.dim), eps / 2.0)
    return C_sigma, metric_D(minkowski_sum_cl(C_v, C_sigma), C_v)
