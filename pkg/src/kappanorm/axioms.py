"""Randomised check of the eight kappa-norm axioms for an evaluator rho(x, C).

Each generated instance evaluates both sides of every axiom; failures are
recorded in the report rather than raised.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linprog

from . import core
from .reports import SuiteReport, ViolationTracker
from .sets import Ball, Empty, Polytope, Subspace, Union, to_json

AXIOMS = ("N1", "N2", "N3", "N4", "N5a", "N5b", "N6", "N7", "N8")
CHAIN_LEVELS = 50
N4_FINAL_GAP = 1e-6


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    dim: int = 2
    instances: int = 200


# ---------------------------------------------------------------- generators


def random_convex_set(rng, d, kinds=("ball", "polytope", "subspace")):
    kind = kinds[rng.integers(len(kinds))]
    c = rng.uniform(-2.0, 2.0, d)
    if kind == "ball":
        return Ball(c, rng.uniform(0.0, 1.5))
    if kind == "polytope":
        n = int(rng.integers(1, d + 4))
        return Polytope(c + rng.uniform(-1.0, 1.0, (n, d)))
    k = int(rng.integers(0, d))
    basis = np.linalg.qr(rng.standard_normal((d, d)))[0][:, :k].T
    return Subspace(basis, c)


def random_set(rng, d):
    if rng.random() < 0.15:
        return Union((random_convex_set(rng, d), random_convex_set(rng, d)))
    return random_convex_set(rng, d)


def sample_inside(rng, C):
    if isinstance(C, Ball):
        u = rng.standard_normal(C.dim)
        u /= max(np.linalg.norm(u), 1e-300)
        return C.center + C.radius * rng.random() * u
    if isinstance(C, Polytope):
        w = rng.dirichlet(np.ones(len(C.vertices)))
        return w @ C.vertices
    if isinstance(C, Subspace):
        return C.offset + rng.uniform(-3.0, 3.0, len(C.basis)) @ C.basis
    if isinstance(C, Union):
        return sample_inside(rng, C.parts[rng.integers(len(C.parts))])
    raise TypeError(type(C).__name__)


def sample_point(rng, C, p_inside=0.35):
    if rng.random() < p_inside:
        return sample_inside(rng, C)
    return rng.uniform(-4.0, 4.0, C.dim)


def is_member(x, C, tol=1e-9):
    """Membership test that does not go through ``core.rho``."""
    x = np.asarray(x, dtype=float)
    if isinstance(C, Empty):
        return False
    if isinstance(C, Union):
        return any(is_member(x, p, tol) for p in C.parts)
    if isinstance(C, Ball):
        return float(np.linalg.norm(x - C.center)) <= C.radius + tol
    if isinstance(C, Subspace):
        if len(C.basis) == 0:
            return float(np.max(np.abs(x - C.offset))) <= tol
        coef, *_ = np.linalg.lstsq(C.basis.T, x - C.offset, rcond=None)
        return float(np.max(np.abs(C.basis.T @ coef - (x - C.offset)))) <= tol
    if isinstance(C, Polytope):
        V = C.vertices
        n = len(V)
        A_eq = np.vstack([V.T, np.ones((1, n))])
        b_eq = np.concatenate([x, [1.0]])
        res = linprog(np.zeros(n), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * n, method="highs")
        return res.status == 0
    raise TypeError(type(C).__name__)


def _shrink(C, s, center):
    # center + s * (C - center)
    return core.affine_transform(s, (1.0 - s) * center, C)


def _witness(**kw):
    out = {}
    for k, v in kw.items():
        if isinstance(v, (Ball, Polytope, Subspace, Union, Empty)):
            out[k] = to_json(v)
        elif isinstance(v, np.ndarray):
            out[k] = [float(t) for t in v]
        else:
            out[k] = float(v)
    return out


# ---------------------------------------------------------------- suite


def axiom_suite(evaluator, config, tol=1e-9):
    """Check the kappa-norm axioms for ``evaluator(x, C)`` on random instances.

    ``config`` is a :class:`GeneratorConfig`. Sets are Euclidean balls,
    polytopes, affine subspaces and two-part unions.
    """
    rng = np.random.default_rng(config.seed)
    d = config.dim
    T = ViolationTracker(AXIOMS, tol)

    for _ in range(config.instances):
        C = random_set(rng, d)
        x = sample_point(rng, C)
        r = evaluator(x, C)

        # N1: zero exactly on members
        member = is_member(x, C)
        zero = r <= tol
        T.record("N1", abs(r) if member else (0.0 if not zero else 1.0),
                 _witness(x=x, C=C), failed=(member != zero))

        # N8
        r_empty = evaluator(x, Empty(d))
        T.record("N8", 0.0 if (r_empty == math.inf and math.isfinite(r)) else 1.0, _witness(x=x, C=C))

        # N3: 1-Lipschitz in the point
        x2 = x + rng.standard_normal(d) * 10.0 ** rng.uniform(-6, 0.5)
        T.record("N3", max(0.0, abs(evaluator(x2, C) - r) - float(np.linalg.norm(x2 - x))),
                 _witness(x=x, x2=x2, C=C))

        # N6, N7
        lam = rng.uniform(0.1, 3.0) * rng.choice([-1.0, 1.0])
        T.record("N6", abs(evaluator(lam * x, core.affine_transform(lam, np.zeros(d), C)) - abs(lam) * r),
                 _witness(x=x, C=C, lam=lam))
        y = rng.uniform(-3.0, 3.0, d)
        T.record("N7", abs(evaluator(x + y, core.affine_transform(1.0, y, C)) - r), _witness(x=x, y=y, C=C))

        # N2: C' built by dilating a convex set
        Cc = random_convex_set(rng, d)
        xc = sample_point(rng, Cc)
        delta = rng.uniform(0.0, 1.0)
        Cbig = core.minkowski_sum_cl(Cc, Ball(np.zeros(d), delta))
        T.record("N2", max(0.0, evaluator(xc, Cbig) - evaluator(xc, Cc)), _witness(x=xc, C=Cc, delta=delta))

        # N4: increasing chain C_k = c + (1 - 2^-k)(C - c)
        Cn = random_convex_set(rng, d, kinds=("ball", "polytope"))
        xn = sample_point(rng, Cn, p_inside=0.2)
        center = sample_inside(rng, Cn)
        vals = [evaluator(xn, _shrink(Cn, 1.0 - 2.0 ** -k, center)) for k in range(1, CHAIN_LEVELS + 1)]
        increase = max([0.0] + [b - a for a, b in zip(vals, vals[1:])])
        gap = abs(evaluator(xn, Cn) - min(vals))
        T.record("N4", max(increase, gap), _witness(x=xn, C=Cn),
                 failed=not (increase <= tol and gap <= N4_FINAL_GAP))

        # N5a: rho(x + y, cl(C1 + C2)) <= rho(x, C1) + rho(y, C2)
        C1, C2 = _summable_pair(rng, d)
        x1, y1 = sample_point(rng, C1, 0.2), sample_point(rng, C2, 0.2)
        lhs = evaluator(x1 + y1, core.minkowski_sum_cl(C1, C2))
        T.record("N5a", max(0.0, lhs - evaluator(x1, C1) - evaluator(y1, C2)),
                 _witness(x=x1, y=y1, C1=C1, C2=C2))

        # N5b: rho(x, C1) <= rho(x, C2) + sup_{z in C2} rho(z, C1), C2 a polytope
        C1b = random_convex_set(rng, d)
        C2b = random_convex_set(rng, d, kinds=("polytope",))
        xb = sample_point(rng, C2b, 0.2)
        sup = max(evaluator(v, C1b) for v in C2b.vertices)
        T.record("N5b", max(0.0, evaluator(xb, C1b) - evaluator(xb, C2b) - sup),
                 _witness(x=xb, C1=C1b, C2=C2b))

    return SuiteReport("kappa_norm", asdict(config), T.results())


def _summable_pair(rng, d):
    kind = rng.integers(4)
    if kind == 0:
        return random_convex_set(rng, d, ("polytope",)), random_convex_set(rng, d, ("polytope",))
    if kind == 1:
        return random_convex_set(rng, d, ("ball",)), random_convex_set(rng, d, ("ball",))
    if kind == 2:
        return random_convex_set(rng, d, ("subspace",)), random_convex_set(rng, d, ("subspace",))
    return random_convex_set(rng, d, ("polytope",)), random_convex_set(rng, d, ("subspace",))
