"""Interval orders, monotone cones over chain families, and slope-constrained fits.

All structures are finite. Elements are hashable ids (strings in JSON).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import kernels
from .errors import InfeasibleError, KappaError, NotIntervalOrderError

FIT_TOL = 1e-9


# ---------------------------------------------------------------- orders


@dataclass(frozen=True, eq=False)
class IntervalOrder:
    """A strict partial order on ``elements``; ``less`` holds the pairs x < y.

    Despite the name, the (2+2)-free property is not enforced here; see
    ``check_interval_order``.
    """

    elements: tuple
    less: frozenset
    positions: dict | None = None

    def __post_init__(self):
        elems = tuple(self.elements)
        if len(set(elems)) != len(elems):
            raise ValueError("duplicate element ids")
        known = set(elems)
        less = frozenset((a, b) for a, b in self.less)
        for a, b in less:
            if a not in known or b not in known:
                raise ValueError(f"relation pair ({a!r}, {b!r}) uses an unknown element")
            if a == b:
                raise ValueError(f"relation is not irreflexive at {a!r}")
        for a, b in less:
            for c, d in less:
                if b == c and (a, d) not in less:
                    raise ValueError(f"relation is not transitive: {a!r}<{b!r}<{d!r} but not {a!r}<{d!r}")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "less", less)
        if self.positions is not None:
            object.__setattr__(self, "positions", {k: float(self.positions[k]) for k in elems})

    @classmethod
    def from_pairs(cls, elements, pairs, positions=None):
        """Build the order generated by ``pairs`` (transitive closure)."""
        elements = tuple(elements)
        idx = {e: i for i, e in enumerate(elements)}
        R = np.zeros((len(elements), len(elements)), dtype=bool)
        for a, b in pairs:
            R[idx[a], idx[b]] = True
        R = _closure(R)
        if np.any(np.diag(R)):
            raise ValueError("generated relation has a cycle")
        less = {(elements[i], elements[j]) for i, j in zip(*np.nonzero(R))}
        return cls(elements, frozenset(less), positions)

    def lt(self, a, b):
        return (a, b) in self.less

    def predecessors(self, x):
        return frozenset(a for a, b in self.less if b == x)

    def to_json(self):
        out = {"elements": list(self.elements), "less": sorted([a, b] for a, b in self.less)}
        if self.positions is not None:
            out["positions"] = dict(self.positions)
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["elements"]), frozenset(tuple(p) for p in obj["less"]), obj.get("positions"))


def _closure(R):
    R = R.copy()
    for k in range(len(R)):
        R |= R[:, k : k + 1] & R[k : k + 1, :]
    return R


def find_two_plus_two(P):
    """A witness (a, b, c, d) with a<b, c<d, a not< d, c not< b, or None."""
    pairs = sorted(P.less, key=repr)
    for a, b in pairs:
        for c, d in pairs:
            if (a, d) not in P.less and (c, b) not in P.less:
                return a, b, c, d
    return None


def check_interval_order(P):
    """True iff the order contains no 2+2."""
    return find_two_plus_two(P) is None


@dataclass(frozen=True, eq=False)
class Representation:
    """x < y iff v(x) + sigma(x) < v(y)."""

    v: dict
    sigma: dict

    def __post_init__(self):
        if set(self.v) != set(self.sigma):
            raise ValueError("v and sigma must share one domain")
        for k, s in self.sigma.items():
            if not s >= 0:
                raise ValueError(f"sigma({k!r}) = {s} is negative")

    def to_json(self):
        return {"v": {str(k): float(x) for k, x in self.v.items()},
                "sigma": {str(k): float(x) for k, x in self.sigma.items()}}


def representation_margin(P, R):
    """Smallest slack of the biconditional over all ordered pairs (> 0 iff it holds)."""
    for x in P.elements:
        if x not in R.v:
            raise KeyError(f"representation misses element {x!r}")
    margin = math.inf
    for x in P.elements:
        right = R.v[x] + R.sigma[x]
        for y in P.elements:
            if x == y:
                continue
            gap = R.v[y] - right
            # x < y needs gap > 0; otherwise gap <= 0, scored so that 0 is still a pass
            margin = min(margin, gap if P.lt(x, y) else (1.0 if gap <= 0 else -gap))
    return margin


def verify_representation(P, R):
    return representation_margin(P, R) > 0


def find_representation(P):
    """Integer representation from the chain of predecessor sets."""
    witness = find_two_plus_two(P)
    if witness is not None:
        raise NotIntervalOrderError(witness)
    preds = {x: P.predecessors(x) for x in P.elements}
    chain = sorted(set(preds.values()), key=len)
    rank = {S: j for j, S in enumerate(chain)}
    v, sigma = {}, {}
    for x in P.elements:
        first = next((j for j, S in enumerate(chain) if x in S), len(chain))
        v[x] = rank[preds[x]]
        sigma[x] = first - 1 - v[x]
    R = Representation(v, sigma)
    if not verify_representation(P, R):
        raise KappaError("internal error: constructed representation failed verification")
    return R


# ---------------------------------------------------------------- functions and chains


@dataclass(frozen=True, eq=False)
class FunctionOnT:
    values: dict
    weight: dict | None = None

    def __post_init__(self):
        vals = {k: float(v) for k, v in self.values.items()}
        if not all(math.isfinite(v) for v in vals.values()):
            raise ValueError("function values must be finite")
        w = {k: 1.0 for k in vals} if self.weight is None else {k: float(self.weight[k]) for k in vals}
        if not all(x > 0 for x in w.values()):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "weight", w)

    def __getitem__(self, k):
        return self.values[k]

    def to_json(self):
        return {"values": {str(k): v for k, v in self.values.items()},
                "weight": {str(k): v for k, v in self.weight.items()}}


def weighted_sup_norm(f, ids=None):
    """max over ids of |f(x)| phi(x)."""
    ids = f.values.keys() if ids is None else ids
    return max((abs(f.values[k]) * f.weight[k] for k in ids), default=0.0)


@dataclass(frozen=True, eq=False)
class ChainFamily:
    """Chains listed in increasing order; optional per-chain bounds (a_t, b_t)."""

    chains: tuple
    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        chains = tuple(tuple(c) for c in self.chains)
        for c in chains:
            if len(set(c)) != len(c):
                raise ValueError("a chain lists each element at most once")
        bounds = {int(k): (float(a), float(b)) for k, (a, b) in self.bounds.items()}
        for k, (a, b) in bounds.items():
            for x in chains[k]:
                if isinstance(x, (int, float)) and not a <= x <= b:
                    raise ValueError(f"chain {k} element {x!r} outside its bounds [{a}, {b}]")
        object.__setattr__(self, "chains", chains)
        object.__setattr__(self, "bounds", bounds)

    @property
    def elements(self):
        seen = {}
        for c in self.chains:
            for x in c:
                seen.setdefault(x, None)
        return tuple(seen)

    def preorder(self):
        """(ids, reach) with reach[i, j] iff id_i <= id_j in the generated preorder."""
        ids = self.elements
        idx = {e: i for i, e in enumerate(ids)}
        R = np.eye(len(ids), dtype=bool)
        for c in self.chains:
            for a, b in zip(c, c[1:]):
                R[idx[a], idx[b]] = True
        return ids, _closure(R)

    def to_json(self):
        return {"chains": [list(c) for c in self.chains],
                "bounds": {str(k): list(v) for k, v in self.bounds.items()}}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(tuple(c) for c in obj["chains"]), obj.get("bounds", {}))


def _cycle(ids, R):
    both = R & R.T & ~np.eye(len(ids), dtype=bool)
    if np.any(both):
        i, j = map(int, np.argwhere(both)[0])
        return ids[i], ids[j]
    return None


def is_monotone(g, chains, tol=0.0):
    return all(g[b] - g[a] >= -tol for c in chains.chains for a, b in zip(c, c[1:]))


def monotone_project_sup(g, chains):
    """Best weighted-sup approximation of g by a function nondecreasing on every chain.

    With unit weights the result is (M + m) / 2, M the running max over
    predecessors and m the running min over successors. Returns (g*, distance).
    """
    ids, R = chains.preorder()
    cyc = _cycle(ids, R)
    if cyc is not None:
        raise ValueError(f"chain family generates a cycle between {cyc[0]!r} and {cyc[1]!r}; "
                         "the cone forces equal values there")
    gv = np.array([g[k] for k in ids])
    inv = np.array([1.0 / g.weight[k] for k in ids])
    # eps* = max over x <= y of (g(x) - g(y)) / (1/phi(x) + 1/phi(y))
    diff = (gv[:, None] - gv[None, :]) / (inv[:, None] + inv[None, :])
    eps = max(0.0, float(np.max(np.where(R, diff, -np.inf))))
    lo, hi = gv - eps * inv, gv + eps * inv
    L = np.max(np.where(R, lo[:, None], -np.inf), axis=0)
    U = np.min(np.where(R, hi[None, :], np.inf), axis=1)
    star = dict(g.values)
    star.update({k: float(x) for k, x in zip(ids, 0.5 * (L + U))})
    return FunctionOnT(star, g.weight), eps


# ---------------------------------------------------------------- constraint sets


@dataclass(frozen=True, eq=False)
class ConstraintSet:
    """g is a member iff max_{x in t} |g(x) - f(x)| phi(x) <= r_t for every chain t."""

    entries: tuple            # (chain, {id: target}, radius)
    weight: dict

    def __post_init__(self):
        for _, _, r in self.entries:
            if not r >= 0:
                raise ValueError("radii must be nonnegative")

    @property
    def zero_radius(self):
        """True when some radius is 0, outside the nonempty-interior hypothesis."""
        return any(r == 0 for _, _, r in self.entries)

    def intervals(self):
        box = {}
        for chain, targets, r in self.entries:
            for x in chain:
                half = r / self.weight.get(x, 1.0)
                lo, hi = targets[x] - half, targets[x] + half
                a, b = box.get(x, (-math.inf, math.inf))
                box[x] = (max(a, lo), min(b, hi))
        return box

    def contains(self, g, tol=1e-12):
        return all(abs(g[x] - targets[x]) * self.weight.get(x, 1.0) <= r + tol
                   for chain, targets, r in self.entries for x in chain)

    def to_json(self):
        return {"entries": [{"chain": list(c), "targets": {str(k): v for k, v in t.items()}, "radius": r}
                            for c, t, r in self.entries],
                "weight": {str(k): v for k, v in self.weight.items()}}


def build_constraint_set(f, chains, radii):
    """Constraint set around f; ``radii`` maps chain index to r_t (or is a sequence)."""
    if not isinstance(radii, dict):
        radii = dict(enumerate(radii))
    entries = []
    for k, chain in enumerate(chains.chains):
        r = float(radii[k])
        if r < 0:
            raise ValueError("radii must be nonnegative")
        entries.append((chain, {x: f[x] for x in chain}, r))
    return ConstraintSet(tuple(entries), {x: f.weight[x] for x in chains.elements})


def cone_feasibility(C, chains):
    """Is there g, nondecreasing on every chain, inside every interval of C?

    Elements equivalent under the generated preorder are merged first.
    Returns (feasible, witness or None).
    """
    ids, R = chains.preorder()
    box = C.intervals()
    lo = np.array([box.get(k, (-math.inf, math.inf))[0] for k in ids])
    hi = np.array([box.get(k, (-math.inf, math.inf))[1] for k in ids])
    # running max of lower bounds over everything below (classes included)
    if np.any(_propagate(lo, R) > hi):
        return False, None
    finite = np.concatenate([lo[np.isfinite(lo)], hi[np.isfinite(hi)]])
    floor = float(finite.min()) - 1.0 if finite.size else 0.0
    low = _propagate(np.maximum(lo, floor), R)
    witness = FunctionOnT(dict(zip(ids, low.tolist())), {k: C.weight.get(k, 1.0) for k in ids})
    if not (C.contains(witness, tol=1e-9) and is_monotone(witness, chains)):
        raise KappaError("internal error: feasibility witness failed verification")
    return True, witness


def _propagate(vals, R):
    return np.max(np.where(R, vals[:, None], -np.inf), axis=0)


# ---------------------------------------------------------------- slope-constrained fit


def _fit_feasible(xs, g, inv_w, eps, C1, C2):
    n = len(xs)
    z = n
    src, dst, w = [], [], []
    for i in range(n):
        src += [z, i]
        dst += [i, z]
        w += [g[i] + eps * inv_w[i], -(g[i] - eps * inv_w[i])]
    for i in range(n - 1):
        d = xs[i + 1] - xs[i]
        src += [i, i + 1]
        dst += [i + 1, i]
        w += [C1 * d, -C2 * d]
    ok, dist = kernels.bellman_ford(n + 1, np.array(src), np.array(dst), np.array(w, dtype=float))
    if not ok:
        return None
    return dist[:n] - dist[z]


def constrained_fit(g, C1, C2, positions=None, tol=FIT_TOL):
    """Closest g~ (weighted sup distance) with C2 <= slope <= C1 between all points.

    ``positions`` maps ids to reals; by default the ids are the positions.
    Returns (g~, eps).
    """
    C1, C2 = float(C1), float(C2)
    if C2 < 0:
        raise ValueError("C2 must be >= 0")
    if C2 > C1:
        raise InfeasibleError(f"no function has slopes in [{C2}, {C1}]")
    ids = list(g.values)
    pos = {k: float(k if positions is None else positions[k]) for k in ids}
    if len(set(pos.values())) != len(ids):
        raise ValueError("positions must be distinct")
    ids.sort(key=pos.__getitem__)
    xs = np.array([pos[k] for k in ids])
    gv = np.array([g[k] for k in ids])
    inv_w = np.array([1.0 / g.weight[k] for k in ids])
    if len(ids) == 1:
        return FunctionOnT(dict(g.values), g.weight), 0.0

    fit = _fit_feasible(xs, gv, inv_w, 0.0, C1, C2)
    if fit is not None:
        return FunctionOnT(dict(zip(ids, gv.tolist())), g.weight), 0.0
    # at this eps the line of slope C2 through any point fits every band
    lo, hi = 0.0, float(np.max((np.abs(gv) + C1 * (xs[-1] - xs[0])) / inv_w))
    best = _fit_feasible(xs, gv, inv_w, hi, C1, C2)
    if best is None:
        raise KappaError("internal error: upper bracket of the fit is infeasible")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        cand = _fit_feasible(xs, gv, inv_w, mid, C1, C2)
        if cand is None:
            lo = mid
        else:
            hi, best = mid, cand
    eps = float(np.max(np.abs(best - gv) / inv_w))
    return FunctionOnT(dict(zip(ids, best.tolist())), g.weight), eps


def slope_margin(fit, C1, C2, positions=None):
    """Smallest slack over all pairs of both slope constraint families."""
    ids = list(fit.values)
    pos = {k: float(k if positions is None else positions[k]) for k in ids}
    margin = math.inf
    for a, b in product(ids, ids):
        if pos[a] < pos[b]:
            d, dg = pos[b] - pos[a], fit[b] - fit[a]
            margin = min(margin, C1 * d - dg, dg - C2 * d)
    return margin


__all__ = [
    "IntervalOrder",
    "Representation",
    "FunctionOnT",
    "ChainFamily",
    "ConstraintSet",
    "find_two_plus_two",
    "check_interval_order",
    "find_representation",
    "verify_representation",
    "representation_margin",
    "weighted_sup_norm",
    "is_monotone",
    "monotone_project_sup",
    "build_constraint_set",
    "cone_feasibility",
    "constrained_fit",
    "slope_margin",
]
