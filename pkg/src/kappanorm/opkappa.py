"""Conditional operator kappa-norm over invertible d x d matrices.

For a probe (x, E) with E bounded, balanced and 0 in its interior, the inner
quantity is inf_{a in E} |(B - A)(x - a)| / rho(x, E). The sampled norm takes
the minimum over B in S and the maximum over probes.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import core
from .axioms import GeneratorConfig
from .errors import SingularOperatorError, UnsupportedSetError
from .reports import SuiteReport, ViolationTracker
from .sets import Ball, NormKind, Polytope, as_vector, from_json, to_json

DET_TOL = 1e-12
OPBALL_SAMPLES = 64


@dataclass(frozen=True, eq=False)
class Operator:
    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise ValueError("operator matrix must be square and nonempty")
        if not np.all(np.isfinite(M)):
            raise ValueError("operator matrix must be finite")
        if abs(np.linalg.det(M)) <= DET_TOL:
            raise SingularOperatorError("operator is not invertible")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def condition(self):
        return float(np.linalg.cond(self.matrix))

    def to_json(self):
        return {"matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["matrix"])


@dataclass(frozen=True, eq=False)
class FiniteSet:
    """Finite operator set; the empty tuple stands for the empty set."""

    ops: tuple

    def __post_init__(self):
        ops = tuple(o if isinstance(o, Operator) else Operator(o) for o in self.ops)
        if len({o.dim for o in ops}) > 1:
            raise ValueError("operators in a set must share one dimension")
        object.__setattr__(self, "ops", ops)

    def members(self):
        return [o.matrix for o in self.ops]

    def to_json(self):
        return {"type": "finite", "ops": [o.to_json() for o in self.ops]}


@dataclass(frozen=True, eq=False)
class OpBall:
    """Operator-norm ball, evaluated through a seeded inner sample."""

    center: Operator
    radius: float
    m: int = OPBALL_SAMPLES
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.center, Operator):
            object.__setattr__(self, "center", Operator(self.center))
        if not self.radius >= 0.0:
            raise ValueError("operator ball radius must be >= 0")

    def members(self, m=None):
        m = self.m if m is None else m
        C = self.center.matrix
        if self.radius == 0.0:
            return [C]
        rng = np.random.default_rng(self.seed)
        d = C.shape[0]
        out = [C]
        while len(out) < m:
            U = rng.standard_normal((d, d))
            U *= rng.random() ** (1.0 / (d * d)) / np.linalg.norm(U, 2)
            M = C + self.radius * U
            if abs(np.linalg.det(M)) > DET_TOL:
                out.append(M)
        return out

    def to_json(self):
        return {"type": "ball", "center": self.center.to_json(), "radius": self.radius,
                "m": self.m, "seed": self.seed}


def operator_set_from_json(obj):
    if obj["type"] == "finite":
        return FiniteSet(tuple(Operator.from_json(o) for o in obj["ops"]))
    return OpBall(Operator.from_json(obj["center"]), float(obj["radius"]),
                  int(obj.get("m", OPBALL_SAMPLES)), int(obj.get("seed", 0)))


def _balanced(E, tol=1e-9):
    if isinstance(E, Ball):
        return float(np.max(np.abs(E.center))) <= tol
    return all(core.rho(-v, E) <= tol for v in E.hull)


def _origin_interior(E):
    if isinstance(E, Ball):
        return E.radius > 0.0
    from .dualform import _origin_interior as inner
    return inner(E.hull)


@dataclass(frozen=True, eq=False)
class ProbeFamily:
    probes: tuple

    def __post_init__(self):
        probes = tuple((as_vector(x), E) for x, E in self.probes)
        if not probes:
            raise ValueError("a probe family needs at least one probe")
        for x, E in probes:
            if not isinstance(E, (Ball, Polytope)):
                raise UnsupportedSetError("probe sets must be bounded balls or polytopes")
            if not (_balanced(E) and _origin_interior(E)):
                raise ValueError("probe sets must be balanced with 0 in the interior")
            if not core.rho(x, E) > 0.0:
                raise ValueError("probe point must lie outside its set")
        object.__setattr__(self, "probes", probes)

    def lipschitz_constant(self):
        """K with |rho_L(A,S) - rho_L(A',S)| <= K |A - A'|_2."""
        K = 0.0
        for x, E in self.probes:
            if isinstance(E, Ball) and E.norm is NormKind.L2:
                far = float(np.linalg.norm(x - E.center)) + E.radius
            else:
                V = core.ball_to_polytope(E).hull if isinstance(E, Ball) else E.hull
                far = float(np.max(np.linalg.norm(V - x, axis=1)))
            K = max(K, far / core.rho(x, E))
        return K

    def to_json(self):
        return {"probes": [{"x": [float(t) for t in x], "E": to_json(E)} for x, E in self.probes]}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple((p["x"], from_json(p["E"])) for p in obj["probes"]))


def default_probe_family(dim, seed=0, n=8):
    rng = np.random.default_rng(seed)
    probes = []
    for i in range(n):
        if i % 2 == 0:
            E = Ball(np.zeros(dim), rng.uniform(0.5, 1.5))
        else:
            W = rng.uniform(0.3, 1.5, (dim + 1, dim))
            E = Polytope(np.vstack([W, -W]))
        u = rng.standard_normal(dim)
        x = u / np.linalg.norm(u) * rng.uniform(2.5, 5.0)
        probes.append((x, E))
    return ProbeFamily(tuple(probes))


# ---------------------------------------------------------------- evaluation


def _ball_image_distance(K, v, r):
    """min over |s| <= r of |K s - v|: a convex trust-region least squares."""
    U, sig, Vt = np.linalg.svd(K)
    c = U.T @ v
    pos = sig > 1e-14 * max(1.0, sig[0] if sig.size else 1.0)
    free = c[pos] / sig[pos]
    if np.linalg.norm(free) <= r:
        return float(np.linalg.norm(c[~pos]))

    def norm_at(mu):
        return np.linalg.norm(sig[pos] * c[pos] / (sig[pos] ** 2 + mu))

    lo, hi = 0.0, max(1.0, float(np.max(np.abs(sig[pos] * c[pos]))) / r)
    while norm_at(hi) > r:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if norm_at(mid) > r:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    s = sig[pos] * c[pos] / (sig[pos] ** 2 + hi)
    res = np.concatenate([c[pos] - sig[pos] * s, c[~pos]])
    return float(np.linalg.norm(res))


def probe_value(K, x, E):
    """inf_{a in E} |K (x - a)| / rho(x, E)."""
    v = K @ x
    if isinstance(E, Ball) and E.norm is NormKind.L2:
        num = _ball_image_distance(K, v - K @ E.center, E.radius)
    else:
        P = core.ball_to_polytope(E) if isinstance(E, Ball) else E
        num = core.rho(v, Polytope(P.hull @ K.T))
    return num / core.rho(x, E)


def _members(S, m=None):
    if isinstance(S, FiniteSet):
        return S.members()
    if isinstance(S, OpBall):
        return S.members(m)
    raise UnsupportedSetError(f"not an operator set: {type(S).__name__}")


def rho_L_matrices(A, members, P):
    """rho_L_sampled with S given as a list of raw matrices."""
    if len(members) == 0:
        return math.inf
    A = np.asarray(A, dtype=float)
    best = 0.0
    for x, E in P.probes:
        best = max(best, min(probe_value(B - A, x, E) for B in members))
    return best


def rho_L_sampled(A, S, P):
    """Sampled conditional operator kappa-norm of A from the set S."""
    Am = A.matrix if isinstance(A, Operator) else np.asarray(A, dtype=float)
    return rho_L_matrices(Am, _members(S), P)


def rho_L_bracket(A, S, P):
    """Values with the OpBall inner sample at m and 2m."""
    Am = A.matrix if isinstance(A, Operator) else np.asarray(A, dtype=float)
    if not isinstance(S, OpBall):
        v = rho_L_sampled(A, S, P)
        return v, v
    return rho_L_matrices(Am, S.members(S.m), P), rho_L_matrices(Am, S.members(2 * S.m), P)


# ---------------------------------------------------------------- axiom suite

OPERATOR_AXIOMS = ("N1", "N2", "N3", "N5a", "N5b", "N6", "N7")


def _invertible(M):
    return abs(np.linalg.det(M)) > DET_TOL


def _rand_op(rng, d):
    while True:
        M = rng.uniform(-2.0, 2.0, (d, d))
        if _invertible(M):
            return M


def _rand_opset(rng, d, k=None):
    k = int(rng.integers(1, 4)) if k is None else k
    return [_rand_op(rng, d) for _ in range(k)]


def _w(**kw):
    return {k: (np.asarray(v).tolist() if not isinstance(v, float) else v) for k, v in kw.items()}


def operator_axiom_suite(config, tol=1e-8, probes=None):
    """Check the conditional axioms for ``rho_L_sampled`` on random finite operator sets.

    Instances whose generated sums or scalings leave the invertible operators
    are skipped and counted per axiom.
    """
    rng = np.random.default_rng(config.seed)
    d = config.dim
    P = probes or default_probe_family(d, seed=config.seed)
    K = P.lipschitz_constant()
    T = ViolationTracker(OPERATOR_AXIOMS, tol)
    skipped = {n: 0 for n in OPERATOR_AXIOMS}
    rho = lambda A, S: rho_L_matrices(A, S, P)

    for _ in range(config.instances):
        A = _rand_op(rng, d)
        S = _rand_opset(rng, d)
        r = rho(A, S)

        # N1 forward
        T.record("N1", rho(A, S + [A]), _w(A=A, S=S))

        # N2: S2 subset of S1
        S1 = S + _rand_opset(rng, d)
        T.record("N2", max(0.0, rho(A, S1) - r), _w(A=A, S=S, S1=S1))

        # N3: Lipschitz in A with the family's modulus
        A2 = A + rng.standard_normal((d, d)) * 10.0 ** rng.uniform(-4, 0)
        if _invertible(A2):
            T.record("N3", max(0.0, abs(rho(A2, S) - r) - K * np.linalg.norm(A2 - A, 2)), _w(A=A, A2=A2, S=S))
        else:
            skipped["N3"] += 1

        # N5a: rho(A1 + A2, S1 + S2) <= rho(A1, S1) + rho(A2, S2)
        B, SB = _rand_op(rng, d), _rand_opset(rng, d)
        Ssum = [X + Y for X in S for Y in SB]
        if _invertible(A + B) and all(_invertible(M) for M in Ssum):
            T.record("N5a", max(0.0, rho(A + B, Ssum) - r - rho(B, SB)), _w(A1=A, S1=S, A2=B, S2=SB))
        else:
            skipped["N5a"] += 1

        # N5b: rho(A, S1) <= rho(A, S2) + sup_{C in S2} rho(C, S1)
        S2 = _rand_opset(rng, d)
        sup = max(rho(C, S) for C in S2)
        T.record("N5b", max(0.0, r - rho(A, S2) - sup), _w(A=A, S1=S, S2=S2))

        # N6
        lam = rng.uniform(0.2, 3.0) * rng.choice([-1.0, 1.0])
        T.record("N6", abs(rho(lam * A, [lam * M for M in S]) - abs(lam) * r), _w(A=A, S=S, lam=float(lam)))

        # N7
        C = _rand_op(rng, d)
        if _invertible(A + C) and all(_invertible(M + C) for M in S):
            T.record("N7", abs(rho(A + C, [M + C for M in S]) - r), _w(A=A, S=S, C=C))
        else:
            skipped["N7"] += 1

    cfg = asdict(config)
    cfg["lipschitz_K"] = K
    return SuiteReport("operator", cfg, T.results(), skipped)


__all__ = [
    "Operator",
    "FiniteSet",
    "OpBall",
    "ProbeFamily",
    "default_probe_family",
    "operator_set_from_json",
    "probe_value",
    "rho_L_sampled",
    "rho_L_matrices",
    "rho_L_bracket",
    "operator_axiom_suite",
    "GeneratorConfig",
]
