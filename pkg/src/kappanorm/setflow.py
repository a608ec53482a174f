"""Point and set-valued ODEs solved by Picard iteration.

The set equation is read as the integral fixed point

    A(t) = cl(A0 + int_0^t f(tau, A(tau)) dtau),

where the integral of a set-valued map is the Minkowski integral (the set of
integrals of its selections). For non-scalar dynamics this is not the
pointwise reachable set of x' = f(t, x): every selection may use a different
point of A(tau) at every instant, so the fixed point is generally larger.

Sets inside the solver are polytopes held as vertex arrays. Euclidean balls
are replaced by inscribed polygons on entry.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import core, kernels
from .errors import ConvergenceError, UnsupportedSetError
from .geometry import hull_vertices, regular_polygon, sphere_points
from .sets import Ball, NormKind, Polytope, as_vector, require_nonempty

AFFINE_CHECK_TOL = 1e-12


# ---------------------------------------------------------------- fields


@dataclass(frozen=True, eq=False)
class VectorField:
    """f(t, x). Affine fields carry L and b(t) so images can be exact."""

    func: object = None
    L: np.ndarray | None = None
    b: object = None
    name: str = "custom"

    def __post_init__(self):
        if self.L is not None:
            L = np.array(self.L, dtype=float)
            if L.ndim != 2 or L.shape[0] != L.shape[1]:
                raise ValueError("L must be square")
            L.setflags(write=False)
            object.__setattr__(self, "L", L)
            if self.b is not None and not callable(self.b):
                object.__setattr__(self, "b", as_vector(self.b, L.shape[0]))
        elif self.func is None:
            raise ValueError("a vector field needs func or L")
        if self.func is not None and self.L is not None:
            rng = np.random.default_rng(0)
            X = rng.uniform(-2.0, 2.0, (8, self.L.shape[0]))
            for t in (0.0, 0.5):
                got = np.array([self.func(t, x) for x in X])
                if np.max(np.abs(got - self._affine(t, X))) > AFFINE_CHECK_TOL * max(1.0, np.max(np.abs(got))):
                    raise ValueError("func disagrees with its affine payload")

    @classmethod
    def affine(cls, L, b=None, name="affine"):
        return cls(L=L, b=b, name=name)

    @property
    def is_affine(self):
        return self.L is not None

    def shift(self, t):
        d = self.L.shape[0]
        if self.b is None:
            return np.zeros(d)
        return as_vector(self.b(t), d) if callable(self.b) else self.b

    def _affine(self, t, X):
        return X @ self.L.T + self.shift(t)

    def __call__(self, t, x):
        x = np.asarray(x, dtype=float)
        if self.is_affine:
            return self._affine(t, x)
        if x.ndim == 1:
            return as_vector(self.func(t, x))
        return np.array([as_vector(self.func(t, row)) for row in x])

    @property
    def conformal_scale(self):
        """s when L L^T = s^2 I (affine fields only), else None."""
        if not self.is_affine:
            return None
        G = self.L @ self.L.T
        s2 = float(G[0, 0])
        if np.allclose(G, s2 * np.eye(len(G)), rtol=0.0, atol=1e-12 * max(1.0, s2)):
            return math.sqrt(s2)
        return None

    def fixes_origin(self, times, d):
        """True when f(t, 0) = 0 at every given time."""
        zero = np.zeros(d)
        return all(np.max(np.abs(self(t, zero))) == 0.0 for t in times)

    def to_json(self):
        if self.name in BUILTINS:
            return {"builtin": self.name}
        if self.is_affine:
            b = self.b if (self.b is None or not callable(self.b)) else None
            return {"affine": {"L": self.L.tolist(), "b": None if b is None else [float(v) for v in b]}}
        raise ValueError("custom callable fields are not serialisable")


def _quadratic_shear(t, x):
    return np.array([x[0], x[1] + x[0] ** 2])


BUILTINS = {
    "zero": lambda: VectorField.affine(np.zeros((2, 2)), name="zero"),
    "identity": lambda: VectorField.affine(np.eye(2), name="identity"),
    "rotation": lambda: VectorField.affine([[0.0, -1.0], [1.0, 0.0]], name="rotation"),
    "quadratic_shear": lambda: VectorField(func=_quadratic_shear, name="quadratic_shear"),
}


def builtin_field(name):
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin field {name!r}; choose from {sorted(BUILTINS)}") from None


def field_from_json(obj):
    if "builtin" in obj:
        return builtin_field(obj["builtin"])
    aff = obj["affine"]
    return VectorField.affine(aff["L"], aff.get("b"))


@dataclass(frozen=True)
class SolverConfig:
    h: float = 1e-3
    picard_tol: float = 1e-8
    max_picard_iters: int = 200
    hull_prune_eps: float = 1e-9
    quadrature: str = "trapezoid"
    ball_vertices: int = core.BALL_SAMPLES
    contraction_margin: float = 0.5

    def __post_init__(self):
        if not (self.h > 0 and self.picard_tol > 0 and self.max_picard_iters >= 1):
            raise ValueError("h, picard_tol and max_picard_iters must be positive")
        if self.hull_prune_eps < 0:
            raise ValueError("hull_prune_eps must be >= 0")
        if self.quadrature not in ("left", "trapezoid"):
            raise ValueError("quadrature must be 'left' or 'trapezoid'")
        if not 0 < self.contraction_margin < 1:
            raise ValueError("contraction_margin must lie in (0, 1)")


@dataclass
class SetTrajectory:
    times: np.ndarray
    sets: list
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.sets):
            raise ValueError("times and sets must have equal length")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        for S in self.sets:
            require_nonempty(S, "trajectory node")

    @property
    def final(self):
        return self.sets[-1]

    def to_csv(self, every=1):
        """Rows t, vertex_index, x1..xd for every ``every``-th node and the last."""
        d = self.sets[0].dim
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "vertex_index"] + [f"x{i + 1}" for i in range(d)])
        idx = list(range(0, len(self.times), every))
        if idx[-1] != len(self.times) - 1:
            idx.append(len(self.times) - 1)
        for n in idx:
            for k, v in enumerate(_as_vertices(self.sets[n], 0)):
                w.writerow([repr(float(self.times[n])), k] + [repr(float(c)) for c in v])
        return buf.getvalue()


# ---------------------------------------------------------------- vertex-array helpers


def _as_vertices(A, m):
    if isinstance(A, np.ndarray):
        return A
    if isinstance(A, Polytope):
        return np.asarray(A.hull)
    if isinstance(A, Ball):
        if A.norm is not NormKind.L2 or A.dim == 1:
            return core.ball_to_polytope(A).hull
        if A.dim == 2:
            return regular_polygon(m, A.radius, A.center)
        return A.center + A.radius * sphere_points(m, A.dim)
    raise UnsupportedSetError(f"set-valued flow needs a polytope or ball, got {type(A).__name__}")


def _hull(V, eps):
    if V.shape[1] == 2:
        return kernels.convex_hull_2d(V, eps)
    return hull_vertices(V, eps)


def _msum(P, Q, eps):
    if P.shape[1] == 2:
        return kernels.minkowski_sum_2d(P, Q, eps)
    return hull_vertices((P[:, None, :] + Q[None, :, :]).reshape(-1, P.shape[1]), eps)


def _dist(P, Q):
    if P.shape[1] == 2:
        return kernels.directed_hausdorff_2d(P, Q) + kernels.directed_hausdorff_2d(Q, P)
    return core.metric_D(Polytope(P), Polytope(Q))


def _image(f, t, V, eps):
    return _hull(f(t, V), eps)


# ---------------------------------------------------------------- operations


def set_image(f, t, A, m=core.BALL_SAMPLES):
    """f(t, A) = {f(t, x) : x in A}.

    Exact for affine f on polytopes and for conformal affine f on Euclidean
    balls. Otherwise the hull of the mapped vertices, which may miss part of
    a curved image (see ``image_containment_deficiency``).
    """
    if isinstance(A, Ball) and A.norm is NormKind.L2 and f.conformal_scale is not None:
        return Ball(f(t, A.center), f.conformal_scale * A.radius)
    return Polytope(_image(f, t, _as_vertices(A, m), 0.0))


def image_containment_deficiency(f, t, A, samples=2000, seed=0, m=core.BALL_SAMPLES):
    """max over sampled a in A of rho(f(t, a), set_image(f, t, A))."""
    V = _as_vertices(A, m)
    rng = np.random.default_rng(seed)
    W = rng.dirichlet(np.ones(len(V)) * 0.3, samples)
    pts = np.vstack([W @ V, _edge_points(V, 16)])
    img = set_image(f, t, A, m)
    return max(core.rho(y, img) for y in f(t, pts))


def _edge_points(V, k):
    s = np.linspace(0.0, 1.0, k)[:, None, None]
    W = np.roll(V, -1, axis=0)
    return ((1 - s) * V[None] + s * W[None]).reshape(-1, V.shape[1])


def lipschitz_ratio(f, A, t=0.0, samples=256, seed=0):
    """Empirical lower bound for C_A: max rho(f(t,x), f(t,A)) / rho(x, A)."""
    require_nonempty(A, "lipschitz_ratio set")
    rng = np.random.default_rng(seed)
    V = _as_vertices(A, core.BALL_SAMPLES)
    c = V.mean(axis=0)
    span = max(1.0, float(np.max(np.abs(V - c))))
    img = set_image(f, t, A)
    best = 0.0
    for _ in range(samples):
        x = c + rng.uniform(-3.0, 3.0, A.dim) * span
        r = core.rho(x, A)
        if r > 1e-9:
            best = max(best, core.rho(f(t, x), img) / r)
    return best


def lipschitz_estimate(f, A, t=0.0, samples=256, seed=0):
    """lipschitz_ratio, raised to |L|_2 for affine fields."""
    est = lipschitz_ratio(f, A, t, samples, seed)
    if f.is_affine:
        est = max(est, float(np.linalg.norm(f.L, 2)))
    return est


def set_integral(F, t1, t2, h, rule="left", prune_eps=1e-9, m=core.BALL_SAMPLES):
    """Riemann-Minkowski sum of h * F(tau_j) over a uniform grid of [t1, t2].

    ``rule="left"`` sums at the left nodes; ``"trapezoid"`` uses half weights
    at both ends of each step.
    """
    if not t2 > t1:
        raise ValueError("set_integral needs t2 > t1")
    n = max(1, int(round((t2 - t1) / h)))
    if abs(n * h - (t2 - t1)) > 1e-9 * max(1.0, t2 - t1):
        n = int(math.ceil((t2 - t1) / h))
    step = (t2 - t1) / n
    taus = t1 + step * np.arange(n + 1)
    vals = [F(float(tau)) for tau in (taus if rule == "trapezoid" else taus[:-1])]
    for S in vals:
        require_nonempty(S, "integrand value")
    if rule == "trapezoid":
        weights = [0.5 * step] + [step] * (n - 1) + [0.5 * step]
    elif rule == "left":
        weights = [step] * n
    else:
        raise ValueError("rule must be 'left' or 'trapezoid'")
    if all(isinstance(S, Ball) for S in vals) and len({S.norm for S in vals}) == 1:
        total = core.affine_transform(weights[0], np.zeros(vals[0].dim), vals[0])
        for w, S in zip(weights[1:], vals[1:]):
            total = core.minkowski_sum_cl(total, core.affine_transform(w, np.zeros(S.dim), S))
        return total
    acc = None
    for w, S in zip(weights, vals):
        V = w * _as_vertices(S, m)
        acc = V if acc is None else _msum(acc, V, prune_eps)
    return Polytope(acc)


def solve_point_ode(f, x0, t_end, cfg=SolverConfig()):
    """Picard iteration x <- x0 + int_0^t f(tau, x(tau)) with trapezoid quadrature.

    Returns ``(times, X)`` with one row of X per grid node.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    x0 = as_vector(x0)
    times = _grid(0.0, t_end, cfg.h)
    dt = np.diff(times)[:, None]
    X = np.tile(x0, (len(times), 1))
    residuals = []
    for _ in range(cfg.max_picard_iters):
        F = np.array([f(t, x) for t, x in zip(times, X)]) if not f.is_affine else X @ f.L.T + np.array([f.shift(t) for t in times])
        inc = np.vstack([np.zeros((1, x0.size)), np.cumsum(0.5 * dt * (F[:-1] + F[1:]), axis=0)])
        Xn = x0 + inc
        res = float(np.max(np.abs(Xn - X)))
        residuals.append(res)
        X = Xn
        if res < cfg.picard_tol:
            return times, X
    raise ConvergenceError("point Picard iteration did not converge", residuals)


def _grid(t0, t1, h):
    n = max(1, int(round((t1 - t0) / h)))
    if abs(n * h - (t1 - t0)) > 1e-9 * max(1.0, t1 - t0):
        n = int(math.ceil((t1 - t0) / h))
    return t0 + (t1 - t0) * np.arange(n + 1) / n


def _cumulative(start, images, dt, cfg):
    out = [start]
    acc = start
    for k in range(len(dt)):
        if cfg.quadrature == "trapezoid":
            inc = (0.5 * dt[k]) * _msum(images[k], images[k + 1], cfg.hull_prune_eps)
        else:
            inc = dt[k] * images[k]
        acc = _msum(acc, inc, cfg.hull_prune_eps)
        out.append(acc)
    return out


def _picard_arrays(f, start, times, guess, cfg):
    images = [_image(f, t, V, cfg.hull_prune_eps) for t, V in zip(times, guess)]
    return _cumulative(start, images, np.diff(times), cfg)


def picard_step_set(f, A0, traj, cfg=SolverConfig()):
    """One Picard map t -> cl(A0 + int_{t_0}^t f(tau, traj(tau)) dtau)."""
    start = _as_vertices(A0, cfg.ball_vertices)
    guess = [_as_vertices(S, cfg.ball_vertices) for S in traj.sets]
    out = _picard_arrays(f, start, traj.times, guess, cfg)
    return SetTrajectory(traj.times, [Polytope(V) for V in out])


def _integral_of_constant(f, V, t1, t2, cfg):
    times = _grid(t1, t2, cfg.h)
    return _picard_arrays(f, np.zeros((1, V.shape[1])), times, [V] * len(times), cfg)[-1]


def contraction_check(f, A1, A2, t1, t2, cfg=SolverConfig(), C_hat=None):
    """(D(int f(A1), int f(A2)) / D(A1, A2), C_hat * (t2 - t1)) over [t1, t2]."""
    if not t2 > t1:
        raise ValueError("contraction_check needs t2 > t1")
    V1, V2 = _as_vertices(A1, cfg.ball_vertices), _as_vertices(A2, cfg.ball_vertices)
    if C_hat is None:
        C_hat = max(lipschitz_estimate(f, Polytope(V1), t1), lipschitz_estimate(f, Polytope(V2), t1))
    bound = C_hat * (t2 - t1)
    d12 = _dist(V1, V2)
    if d12 == 0.0:
        return 0.0, bound
    I1 = _integral_of_constant(f, V1, t1, t2, cfg)
    I2 = _integral_of_constant(f, V2, t1, t2, cfg)
    return _dist(I1, I2) / d12, bound


def solve_set_ode(f, A0, t_end, cfg=SolverConfig(), initial_guess=None):
    """Solve A(t) = cl(A0 + int_0^t f(tau, A(tau)) dtau) on [0, t_end].

    The horizon is cut into segments on which C_hat * length is at most
    ``cfg.contraction_margin``; each segment starts from the end set of the
    previous one. ``initial_guess`` is a scale s: the Picard iteration on a
    segment starts from the constant trajectory s * (segment start set).
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    require_nonempty(A0, "initial set")
    start = _as_vertices(A0, cfg.ball_vertices)
    scale = 1.0 if initial_guess is None else float(initial_guess)
    times = _grid(0.0, t_end, cfg.h)
    step = times[1] - times[0]

    diag = {
        "quadrature": cfg.quadrature,
        "segments": [],
        "hypothesis_violation": not f.fixes_origin(times[:: max(1, len(times) // 16)], start.shape[1]),
    }
    if isinstance(A0, Ball) and A0.norm is NormKind.L2 and A0.dim >= 2:
        diag["ball_conversion_error"] = A0.radius * (1.0 - math.cos(math.pi / cfg.ball_vertices))

    sets = [start]
    k0 = 0
    while k0 < len(times) - 1:
        seg_start = sets[-1]
        C_hat = lipschitz_estimate(f, Polytope(seg_start), times[k0])
        n_steps = len(times) - 1 - k0
        if C_hat > 0:
            n_steps = min(n_steps, max(1, int(cfg.contraction_margin / (C_hat * step))))
        seg_times = times[k0 : k0 + n_steps + 1]
        guess = [scale * seg_start] * len(seg_times)
        residuals = []
        for _ in range(cfg.max_picard_iters):
            new = _picard_arrays(f, seg_start, seg_times, guess, cfg)
            res = max(_dist(P, Q) for P, Q in zip(new, guess))
            residuals.append(res)
            guess = new
            if res < cfg.picard_tol:
                break
        else:
            raise ConvergenceError("set Picard iteration did not converge", residuals)
        ratio, bound = contraction_check(f, seg_start, guess[-1], seg_times[0], seg_times[-1], cfg, C_hat)
        diag["segments"].append({
            "t0": float(seg_times[0]),
            "t1": float(seg_times[-1]),
            "C_hat": C_hat,
            "iterations": len(residuals),
            "residuals": residuals,
            "contraction_ratio": ratio,
            "contraction_bound": bound,
        })
        sets.extend(guess[1:])
        k0 += n_steps
    return SetTrajectory(times, [Polytope(V) for V in sets], diag)


__all__ = [
    "VectorField",
    "SolverConfig",
    "SetTrajectory",
    "builtin_field",
    "field_from_json",
    "set_image",
    "image_containment_deficiency",
    "lipschitz_ratio",
    "lipschitz_estimate",
    "set_integral",
    "solve_point_ode",
    "picard_step_set",
    "solve_set_ode",
    "contraction_check",
]
