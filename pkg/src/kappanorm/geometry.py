"""Low-level convex geometry on vertex arrays."""
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import kernels

HULL_EPS = 1e-12


def affine_frame(V, tol=1e-12):
    """Centroid, orthonormal directions of the affine hull, and coordinates."""
    c = V.mean(axis=0)
    _, s, vt = np.linalg.svd(V - c, full_matrices=False)
    scale = max(1.0, float(np.max(np.abs(V))))
    rank = int(np.sum(s > tol * scale * max(1, len(V))))
    W = vt[:rank]
    return c, W, (V - c) @ W.T


def hull_vertices(V, eps=HULL_EPS):
    """Extreme points of conv(V); rows are taken verbatim from ``V``."""
    V = np.unique(np.asarray(V, dtype=float), axis=0)
    n, d = V.shape
    if n == 1:
        return V
    if d == 1:
        return np.array([V.min(axis=0), V.max(axis=0)]) if V.min() < V.max() else V[:1]
    if d == 2:
        return kernels.convex_hull_2d(V, eps)
    c, W, X = affine_frame(V)
    r = W.shape[0]
    if r == 0:
        return V[:1]
    if r == 1:
        t = X[:, 0]
        return V[[int(np.argmin(t)), int(np.argmax(t))]]
    if r == 2:
        H = kernels.convex_hull_2d(X, eps)
        idx = [int(np.argmin(np.sum((X - h) ** 2, axis=1))) for h in H]
        return V[idx]
    try:
        hull = ConvexHull(X)
    except QhullError:
        return V
    return V[np.sort(hull.vertices)]


def min_norm_point(P, tol=1e-13, max_iter=500):
    """Point of minimal Euclidean norm in conv(P) (Wolfe's active-set method).

    The dot-product optimality test cannot resolve norms below about
    sqrt(eps) times the input scale. Near that floor, every remaining vertex
    is also tried directly and kept if it lowers the norm.
    Returns ``(point, weights, support)`` with ``point = weights @ P[support]``.
    """
    P = np.asarray(P, dtype=float)
    n = len(P)
    norms2 = np.einsum("ij,ij->i", P, P)
    i0 = int(np.argmin(norms2))
    if n == 1:
        return P[0].copy(), np.ones(1), [0]
    scale = math.sqrt(max(1.0, float(np.max(norms2))))
    S = [i0]
    w = np.ones(1)
    x = P[i0].copy()
    for _ in range(max_iter):
        xx = float(x @ x)
        if xx == 0.0 or len(S) == n:
            break
        dots = P @ x
        # members of S sit at <x, x> up to round-off; only look outside S
        dots[S] = np.inf
        order = np.argsort(dots, kind="stable")[: n - len(S)]
        # min_p <x, p> / |x| is a lower bound on the optimum, so the gap over |x| bounds the error
        certified = xx - dots[order[0]] <= tol * scale * math.sqrt(xx)
        near_floor = xx <= (1e-6 * scale) ** 2
        if certified and not near_floor:
            break
        trials = [] if certified else [S + [int(order[0])]]
        if near_floor:
            # the certificate is unreliable here; try every vertex directly
            trials += [S + [int(j)] for j in order] + [S + [int(j) for j in order]]
        for T in trials:
            S2, w2 = _minor_cycle(P, T, np.append(w, np.zeros(len(T) - len(S))), max_iter)
            x2 = w2 @ P[S2]
            if float(x2 @ x2) < xx * (1.0 - 1e-12):
                S, w, x = S2, w2, x2
                break
        else:
            break
    return x, w, S


def _minor_cycle(P, S, w, max_iter):
    """Move w to the affine minimiser of P[S], dropping vertices that leave the simplex."""
    for _ in range(max_iter):
        alpha = _affine_minimizer(P[S])
        if np.all(alpha > 0.0):
            return S, alpha
        # step from w towards alpha until the first weight hits zero, and drop it
        cand = np.flatnonzero((alpha <= 0.0) & (w - alpha > 0.0))
        theta, hit = 1.0, None
        if cand.size:
            ratios = w[cand] / (w[cand] - alpha[cand])
            k = int(np.argmin(ratios))
            if ratios[k] < 1.0:
                theta, hit = float(ratios[k]), int(cand[k])
        w = theta * alpha + (1.0 - theta) * w
        if hit is not None:
            w[hit] = 0.0
        w[w <= 0.0] = 0.0
        keep = w > 0.0
        if not np.any(keep):
            keep[int(np.argmax(alpha))] = True
            w = np.ones(1)
        S = [s for s, k in zip(S, keep) if k]
        w = w[keep]
        w /= w.sum()
    return S, w


def _affine_minimizer(Q):
    # minimise |Q^T a| subject to sum(a) = 1, as least squares on the edge
    # vectors so the conditioning is not squared by a Gram matrix
    k = len(Q)
    if k == 1:
        return np.ones(1)
    D = (Q[1:] - Q[0]).T
    b = np.linalg.lstsq(D, -Q[0], rcond=None)[0]
    return np.concatenate([[1.0 - b.sum()], b])


def polytope_distance(x, V, hull=None):
    """Euclidean distance from ``x`` to conv(V)."""
    x = np.asarray(x, dtype=float)
    d = x.size
    if d == 1:
        lo, hi = float(V.min()), float(V.max())
        return max(0.0, lo - x[0], x[0] - hi)
    if d == 2:
        H = hull if hull is not None else hull_vertices(V)
        return float(kernels.point_polygon_distance(x, H))
    p, _, _ = min_norm_point(V - x)
    return float(np.linalg.norm(p))


def regular_polygon(m, radius=1.0, center=(0.0, 0.0), outer=False):
    ang = 2.0 * np.pi * np.arange(m) / m
    r = radius / np.cos(np.pi / m) if outer else radius
    return np.asarray(center, dtype=float) + r * np.column_stack([np.cos(ang), np.sin(ang)])


def sphere_points(m, d):
    """Deterministic, roughly uniform points on the unit sphere in R^d."""
    if d == 1:
        return np.array([[-1.0], [1.0]])
    if d == 2:
        return regular_polygon(m)
    if d == 3:
        i = np.arange(m) + 0.5
        phi = np.arccos(1.0 - 2.0 * i / m)
        theta = np.pi * (1.0 + 5.0 ** 0.5) * i
        pts = np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])
    else:
        rng = np.random.default_rng(12345)
        pts = rng.standard_normal((m, d))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    axes = np.vstack([np.eye(d), -np.eye(d)])
    return np.vstack([pts, axes])


def inradius_about(V, center):
    """Distance from ``center`` to the nearest facet of conv(V) (full-dimensional)."""
    hull = ConvexHull(V - center)
    return float(np.min(-hull.equations[:, -1]))
