# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport atan2, hypot, M_PI

cnp.import_array()

BACKEND = "cython"


cdef inline double _hypot(double x, double y) nogil:
    return hypot(x, y)


cdef object _canonical_start(cnp.ndarray hull):
    cdef Py_ssize_t n = hull.shape[0]
    cdef Py_ssize_t i, k = 0
    cdef const double[:, :] h
    if n < 2:
        return hull
    h = hull
    for i in range(1, n):
        if h[i, 1] < h[k, 1] or (h[i, 1] == h[k, 1] and h[i, 0] < h[k, 0]):
            k = i
    if k == 0:
        return hull
    return np.roll(hull, -k, axis=0)


cdef Py_ssize_t _chain(const double[:, :] pts, Py_ssize_t start, Py_ssize_t stop,
                       Py_ssize_t step, double[:, :] out) nogil:
    cdef Py_ssize_t i = start, m = 0
    cdef double ax, ay, bx, by, cross
    while i != stop:
        while m >= 2:
            ax = out[m - 1, 0] - out[m - 2, 0]
            ay = out[m - 1, 1] - out[m - 2, 1]
            bx = pts[i, 0] - out[m - 2, 0]
            by = pts[i, 1] - out[m - 2, 1]
            cross = ax * by - ay * bx
            if cross <= 0.0:
                m -= 1
            else:
                break
        out[m, 0] = pts[i, 0]
        out[m, 1] = pts[i, 1]
        m += 1
        i += step
    return m


cdef Py_ssize_t _prune(double[:, :] h, Py_ssize_t n, double eps) nogil:
    # same rule as the Python twin: nearly collinear and between neighbours
    cdef bint changed = True
    cdef Py_ssize_t i, j, pi, ni
    cdef double ax, ay, bx, by, cross, fwd
    while changed and n >= 3:
        changed = False
        i = 0
        while i < n and n >= 3:
            pi = i - 1 if i > 0 else n - 1
            ni = i + 1 if i + 1 < n else 0
            ax = h[i, 0] - h[pi, 0]
            ay = h[i, 1] - h[pi, 1]
            bx = h[ni, 0] - h[pi, 0]
            by = h[ni, 1] - h[pi, 1]
            cross = ax * by - ay * bx
            fwd = ax * (h[ni, 0] - h[i, 0]) + ay * (h[ni, 1] - h[i, 1])
            if cross <= eps * _hypot(ax, ay) * _hypot(bx, by) and fwd >= 0.0:
                for j in range(i, n - 1):
                    h[j, 0] = h[j + 1, 0]
                    h[j, 1] = h[j + 1, 1]
                n -= 1
                changed = True
            else:
                i += 1
    return n


def convex_hull_2d(points, double eps=1e-12):
    cdef cnp.ndarray pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("convex hull of an empty point set")
    pts = np.ascontiguousarray(np.unique(pts, axis=0))
    cdef Py_ssize_t n = pts.shape[0]
    if n <= 2:
        return _canonical_start(pts.copy())
    cdef const double[:, :] p = pts
    lo = np.empty((n, 2))
    up = np.empty((n, 2))
    cdef double[:, :] lov = lo
    cdef double[:, :] upv = up
    cdef Py_ssize_t ml, mu, k
    with nogil:
        ml = _chain(p, 0, n, 1, lov)
        mu = _chain(p, n - 1, -1, -1, upv)
    hull = np.ascontiguousarray(np.vstack([lo[:ml - 1], up[:mu - 1]]))
    cdef double[:, :] hv = hull
    with nogil:
        k = _prune(hv, hv.shape[0], eps)
    hull = hull[:k]
    if hull.shape[0] == 0:
        hull = pts[:1].copy()
    return _canonical_start(hull)


cdef double _seg(double x0, double x1, double a0, double a1,
                 double b0, double b1) nogil:
    cdef double d0 = b0 - a0, d1 = b1 - a1
    cdef double dd = d0 * d0 + d1 * d1
    cdef double t
    if dd == 0.0:
        return _hypot(x0 - a0, x1 - a1)
    t = ((x0 - a0) * d0 + (x1 - a1) * d1) / dd
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return _hypot(x0 - a0 - t * d0, x1 - a1 - t * d1)


cdef double _ppd(double x0, double x1, const double[:, :] h) nogil:
    cdef Py_ssize_t k = h.shape[0]
    cdef Py_ssize_t i, j
    cdef bint inside = True
    cdef double best, d, cross
    if k == 1:
        return _hypot(x0 - h[0, 0], x1 - h[0, 1])
    if k == 2:
        return _seg(x0, x1, h[0, 0], h[0, 1], h[1, 0], h[1, 1])
    for i in range(k):
        j = i + 1 if i + 1 < k else 0
        cross = (h[j, 0] - h[i, 0]) * (x1 - h[i, 1]) - (h[j, 1] - h[i, 1]) * (x0 - h[i, 0])
        if cross < 0.0:
            inside = False
            break
    if inside:
        return 0.0
    best = 1e308
    for i in range(k):
        j = i + 1 if i + 1 < k else 0
        d = _seg(x0, x1, h[i, 0], h[i, 1], h[j, 0], h[j, 1])
        if d < best:
            best = d
    return best


def point_polygon_distance(x, hull):
    cdef const double[:] xv = np.asarray(x, dtype=np.float64).ravel()
    cdef const double[:, :] h = np.ascontiguousarray(hull, dtype=np.float64).reshape(-1, 2)
    return _ppd(xv[0], xv[1], h)


def directed_hausdorff_2d(points, hull):
    cdef const double[:, :] p = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2)
    cdef const double[:, :] h = np.ascontiguousarray(hull, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t i
    cdef double best = 0.0, d
    with nogil:
        for i in range(p.shape[0]):
            d = _ppd(p[i, 0], p[i, 1], h)
            if d > best:
                best = d
    return best


cdef inline double _angle(double dx, double dy) nogil:
    cdef double a = atan2(dy, dx)
    if a < 0.0:
        a += 2.0 * M_PI
    return a


def minkowski_sum_2d(P, Q, double eps=1e-12):
    cdef cnp.ndarray Pa = np.ascontiguousarray(convex_hull_2d(P, eps))
    cdef cnp.ndarray Qa = np.ascontiguousarray(convex_hull_2d(Q, eps))
    if Pa.shape[0] < 3 or Qa.shape[0] < 3:
        sums = (Pa[:, None, :] + Qa[None, :, :]).reshape(-1, 2)
        return convex_hull_2d(sums, eps)
    cdef const double[:, :] p = Pa
    cdef const double[:, :] q = Qa
    cdef Py_ssize_t n = p.shape[0], m = q.shape[0]
    edges_arr = np.empty((n + m, 2))
    cdef double[:, :] e = edges_arr
    cdef Py_ssize_t i = 0, j = 0, k = 0, ni, nj
    cdef double ai, aj
    with nogil:
        # merge edge sequences by polar angle; ties keep P first
        while i < n or j < m:
            if i < n:
                ni = i + 1 if i + 1 < n else 0
                ai = _angle(p[ni, 0] - p[i, 0], p[ni, 1] - p[i, 1])
            if j < m:
                nj = j + 1 if j + 1 < m else 0
                aj = _angle(q[nj, 0] - q[j, 0], q[nj, 1] - q[j, 1])
            if j >= m or (i < n and ai <= aj):
                e[k, 0] = p[ni, 0] - p[i, 0]
                e[k, 1] = p[ni, 1] - p[i, 1]
                i += 1
            else:
                e[k, 0] = q[nj, 0] - q[j, 0]
                e[k, 1] = q[nj, 1] - q[j, 1]
                j += 1
            k += 1
    verts_arr = np.empty((n + m, 2))
    cdef double[:, :] v = verts_arr
    cdef Py_ssize_t c
    with nogil:
        v[0, 0] = p[0, 0] + q[0, 0]
        v[0, 1] = p[0, 1] + q[0, 1]
        for c in range(1, n + m):
            v[c, 0] = v[c - 1, 0] + e[c - 1, 0]
            v[c, 1] = v[c - 1, 1] + e[c - 1, 1]
    return convex_hull_2d(verts_arr, eps)


def bellman_ford(Py_ssize_t n, src, dst, w, double tol=1e-12):
    cdef const Py_ssize_t[:] s = np.ascontiguousarray(src, dtype=np.intp)
    cdef const Py_ssize_t[:] t = np.ascontiguousarray(dst, dtype=np.intp)
    cdef const double[:] wt = np.ascontiguousarray(w, dtype=np.float64)
    dist_arr = np.zeros(n)
    new_arr = np.zeros(n)
    cdef double[:] dist = dist_arr
    cdef double[:] new = new_arr
    cdef Py_ssize_t it, k, i
    cdef double cand
    cdef bint stable
    for it in range(n + 1):
        stable = True
        with nogil:
            for i in range(n):
                new[i] = dist[i]
            for k in range(s.shape[0]):
                cand = dist[s[k]] + wt[k]
                if cand < new[t[k]]:
                    new[t[k]] = cand
            for i in range(n):
                if dist[i] - new[i] > tol * (1.0 + (dist[i] if dist[i] > 0 else -dist[i])):
                    stable = False
                dist[i] = new[i]
        if stable:
            return True, dist_arr
    return False, dist_arr
