"""Pure-Python/NumPy implementations of the hot geometric kernels.

Every function here has a drop-in twin in ``_ckernels.pyx``; the two are
kept behaviourally identical and are cross-checked in the test suite.
"""
import numpy as np

BACKEND = "python"


def _canonical_start(hull):
    # bottom-most vertex first (min y, then min x)
    if len(hull) < 2:
        return hull
    k = np.lexsort((hull[:, 0], hull[:, 1]))[0]
    return np.roll(hull, -k, axis=0)


def _half_hull(pts):
    # exact orientation only; tolerance is applied afterwards in _prune
    chain = []
    for p in pts:
        while len(chain) >= 2:
            o, a = chain[-2], chain[-1]
            cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
            if cross <= 0.0:
                chain.pop()
            else:
                break
        chain.append(p)
    return chain


def _prune(hull, eps):
    # Drop a vertex only when it is nearly collinear with its neighbours
    # *and* lies between them; thin spikes keep their tip.
    h = list(hull)
    changed = True
    while changed and len(h) >= 3:
        changed = False
        i = 0
        while i < len(h) and len(h) >= 3:
            o, m, p = h[i - 1], h[i], h[(i + 1) % len(h)]
            ax, ay = m[0] - o[0], m[1] - o[1]
            bx, by = p[0] - o[0], p[1] - o[1]
            cross = ax * by - ay * bx
            fwd = ax * (p[0] - m[0]) + ay * (p[1] - m[1])
            if cross <= eps * np.hypot(ax, ay) * np.hypot(bx, by) and fwd >= 0.0:
                del h[i]
                changed = True
            else:
                i += 1
    return h


def convex_hull_2d(points, eps=1e-12):
    """Counter-clockwise hull vertices, starting at the bottom-most point.

    Collinear and (near-)duplicate points are dropped; ``eps`` is the
    relative cross-product tolerance.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    pts = np.unique(pts, axis=0)
    if len(pts) <= 2:
        return _canonical_start(pts.copy())
    rows = [tuple(p) for p in pts]
    lower = _half_hull(rows)
    upper = _half_hull(rows[::-1])
    hull = np.array(_prune(lower[:-1] + upper[:-1], eps), dtype=float)
    if len(hull) == 0:
        hull = pts[:1].copy()
    return _canonical_start(hull)


def _segment_distance(x, a, b):
    d = b - a
    dd = d @ d
    if dd == 0.0:
        return float(np.hypot(*(x - a)))
    t = min(1.0, max(0.0, ((x - a) @ d) / dd))
    p = a + t * d
    return float(np.hypot(x[0] - p[0], x[1] - p[1]))


def point_polygon_distance(x, hull):
    """Euclidean distance from ``x`` to the convex polygon ``hull`` (CCW)."""
    x = np.asarray(x, dtype=float)
    hull = np.asarray(hull, dtype=float)
    k = len(hull)
    if k == 1:
        return float(np.hypot(*(x - hull[0])))
    if k == 2:
        return _segment_distance(x, hull[0], hull[1])
    nxt = np.roll(hull, -1, axis=0)
    e = nxt - hull
    r = x - hull
    cross = e[:, 0] * r[:, 1] - e[:, 1] * r[:, 0]
    if np.all(cross >= 0.0):
        return 0.0
    dd = np.einsum("ij,ij->i", e, e)
    t = np.clip(np.einsum("ij,ij->i", r, e) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    diff = r - t[:, None] * e
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", diff, diff))))


def directed_hausdorff_2d(points, hull):
    """max over ``points`` of the distance to the convex polygon ``hull``."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return max(point_polygon_distance(p, hull) for p in points)


def minkowski_sum_2d(P, Q, eps=1e-12):
    """Minkowski sum of two convex polygons (any vertex order)."""
    # re-hull the inputs: accumulated round-off leaves near-duplicate
    # vertices and slightly reflex turns that would break the angle merge
    P = convex_hull_2d(P, eps)
    Q = convex_hull_2d(Q, eps)
    if len(P) < 3 or len(Q) < 3:
        sums = (P[:, None, :] + Q[None, :, :]).reshape(-1, 2)
        return convex_hull_2d(sums, eps)
    eP = np.roll(P, -1, axis=0) - P
    eQ = np.roll(Q, -1, axis=0) - Q
    edges = np.vstack([eP, eQ])
    ang = np.arctan2(edges[:, 1], edges[:, 0])
    ang = np.where(ang < 0.0, ang + 2.0 * np.pi, ang)
    order = np.argsort(ang, kind="stable")
    edges = edges[order]
    verts = (P[0] + Q[0]) + np.vstack([np.zeros((1, 2)), np.cumsum(edges[:-1], axis=0)])
    return convex_hull_2d(verts, eps)


def bellman_ford(n, src, dst, w, tol=1e-12):
    """Feasibility of the difference system ``x[dst] - x[src] <= w``.

    Returns ``(feasible, x)``; ``x`` is the shortest-path potential from a
    virtual source joined to every node with weight 0.
    """
    src = np.asarray(src, dtype=np.intp)
    dst = np.asarray(dst, dtype=np.intp)
    w = np.asarray(w, dtype=float)
    dist = np.zeros(n)
    for _ in range(n + 1):
        cand = dist[src] + w
        new = dist.copy()
        np.minimum.at(new, dst, cand)
        if np.all(dist - new <= tol * (1.0 + np.abs(dist))):
            return True, new
        dist = new
    return False, dist
