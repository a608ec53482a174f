"""Closed subsets of R^d and their JSON form.

Five variants from the public schema (ball, polytope, subspace, union,
empty) plus ``Cylinder``, a bounded convex base swept along a linear
subspace, which is what a Minkowski sum of a subspace and a bounded set
produces.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, EmptySetError

ORTHONORMAL_TOL = 1e-12


class NormKind(str, enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"


def as_vector(x, dim=None):
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise DimensionError("vectors must have dimension >= 1")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {v.size}")
    v.setflags(write=False)
    return v


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def check_orthonormal(basis, tol=ORTHONORMAL_TOL):
    if len(basis) == 0:
        return
    gram = basis @ basis.T
    err = np.max(np.abs(gram - np.eye(len(basis))))
    if err > tol:
        raise ValueError(f"basis is not orthonormal (max Gram error {err:.2e})")


def orthonormalize(vectors, dim, tol=1e-10):
    """Orthonormal basis (rows) of the span of ``vectors``."""
    vectors = np.asarray(vectors, dtype=float).reshape(-1, dim)
    if len(vectors) == 0:
        return np.zeros((0, dim))
    _, s, vt = np.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[:rank]


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float
    norm: NormKind = NormKind.L2

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        r = float(self.radius)
        if not np.isfinite(r) or r < 0:
            raise ValueError(f"ball radius must be finite and >= 0, got {r}")
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "norm", NormKind(self.norm))

    @property
    def dim(self):
        return self.center.size


@dataclass(frozen=True, eq=False)
class Polytope:
    """Closed convex hull of finitely many vertices."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim == 1:
            v = v.reshape(1, -1)
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValueError("a polytope needs a nonempty (n, d) vertex array")
        if not np.all(np.isfinite(v)):
            raise ValueError("polytope vertices must be finite")
        object.__setattr__(self, "vertices", _frozen(v))

    @property
    def dim(self):
        return self.vertices.shape[1]

    @cached_property
    def hull(self):
        """Extreme points (CCW order in the plane)."""
        from .geometry import hull_vertices

        return _frozen(hull_vertices(self.vertices))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Affine flat ``offset + span(basis)``; ``basis`` rows are orthonormal."""

    basis: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        off = as_vector(self.offset)
        b = np.array(self.basis, dtype=float).reshape(-1, off.size)
        check_orthonormal(b)
        object.__setattr__(self, "basis", _frozen(b))
        object.__setattr__(self, "offset", off)

    @property
    def dim(self):
        return self.offset.size

    @property
    def through_origin(self):
        return bool(np.max(np.abs(self.offset)) <= ORTHONORMAL_TOL)

    @classmethod
    def span(cls, vectors, dim=None):
        vectors = np.asarray(vectors, dtype=float)
        if dim is None:
            dim = vectors.shape[-1]
        return cls(orthonormalize(vectors, dim), np.zeros(dim))


@dataclass(frozen=True, eq=False)
class Cylinder:
    """``base + span(directions)`` with a bounded convex base."""

    base: "Ball | Polytope"
    directions: np.ndarray

    def __post_init__(self):
        if not isinstance(self.base, (Ball, Polytope)):
            raise TypeError("cylinder base must be a Ball or Polytope")
        d = np.array(self.directions, dtype=float).reshape(-1, self.base.dim)
        check_orthonormal(d)
        object.__setattr__(self, "directions", _frozen(d))

    @property
    def dim(self):
        return self.base.dim


@dataclass(frozen=True, eq=False)
class Union:
    parts: tuple

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("a union needs at least one part")
        dims = {p.dim for p in parts if not isinstance(p, Empty) or p.dim is not None}
        if len(dims) > 1:
            raise DimensionError(f"union parts have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        for p in self.parts:
            if p.dim is not None:
                return p.dim
        return None


@dataclass(frozen=True)
class Empty:
    dim: int | None = None


ClosedSet = Ball | Polytope | Subspace | Cylinder | Union | Empty
CONVEX_TYPES = (Ball, Polytope, Subspace, Cylinder)


def is_empty(C):
    if isinstance(C, Empty):
        return True
    if isinstance(C, Union):
        return all(is_empty(p) for p in C.parts)
    return False


def require_nonempty(C, what="set"):
    if is_empty(C):
        raise EmptySetError(f"{what} must be nonempty")


def check_dims(x, C):
    d = C.dim
    if d is not None and x.size != d:
        raise DimensionError(f"point has dimension {x.size}, set has dimension {d}")


def box(lo, hi):
    """Axis-aligned box as a Polytope."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    corners = np.array(np.meshgrid(*[[0.0, 1.0]] * d, indexing="ij")).reshape(d, -1).T
    return Polytope(lo + corners * (hi - lo))


def point(x):
    return Polytope(np.asarray(x, dtype=float).reshape(1, -1))


# ---------------------------------------------------------------- JSON

CLOSED_SET_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {
        "vec": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "set": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "ball"},
                        "center": {"$ref": "#/$defs/vec"},
                        "radius": {"type": "number", "minimum": 0},
                        "norm": {"enum": ["l1", "l2", "linf"]},
                    },
                    "required": ["type", "center", "radius"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "polytope"},
                        "vertices": {"type": "array", "items": {"$ref": "#/$defs/vec"}, "minItems": 1},
                    },
                    "required": ["type", "vertices"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "subspace"},
                        "basis": {"type": "array", "items": {"$ref": "#/$defs/vec"}},
                        "offset": {"$ref": "#/$defs/vec"},
                    },
                    "required": ["type", "basis", "offset"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "cylinder"},
                        "base": {"$ref": "#/$defs/set"},
                        "directions": {"type": "array", "items": {"$ref": "#/$defs/vec"}},
                    },
                    "required": ["type", "base", "directions"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {
                        "type": {"const": "union"},
                        "parts": {"type": "array", "items": {"$ref": "#/$defs/set"}, "minItems": 1},
                    },
                    "required": ["type", "parts"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"type": {"const": "empty"}},
                    "required": ["type"],
                    "additionalProperties": False,
                },
            ]
        },
    },
    "$ref": "#/$defs/set",
}


def _floats(a):
    return [float(v) for v in np.asarray(a).reshape(-1)]


def to_json(C):
    if isinstance(C, Ball):
        return {"type": "ball", "center": _floats(C.center), "radius": C.radius, "norm": C.norm.value}
    if isinstance(C, Polytope):
        return {"type": "polytope", "vertices": [_floats(v) for v in C.vertices]}
    if isinstance(C, Subspace):
        return {"type": "subspace", "basis": [_floats(b) for b in C.basis], "offset": _floats(C.offset)}
    if isinstance(C, Cylinder):
        return {"type": "cylinder", "base": to_json(C.base), "directions": [_floats(b) for b in C.directions]}
    if isinstance(C, Union):
        return {"type": "union", "parts": [to_json(p) for p in C.parts]}
    if isinstance(C, Empty):
        return {"type": "empty"}
    raise TypeError(f"not a ClosedSet: {C!r}")


def from_json(obj):
    kind = obj["type"]
    if kind == "ball":
        return Ball(obj["center"], obj["radius"], NormKind(obj.get("norm", "l2")))
    if kind == "polytope":
        return Polytope(obj["vertices"])
    if kind == "subspace":
        off = as_vector(obj["offset"])
        return Subspace(np.array(obj["basis"], dtype=float).reshape(-1, off.size), off)
    if kind == "cylinder":
        base = from_json(obj["base"])
        return Cylinder(base, np.array(obj["directions"], dtype=float).reshape(-1, base.dim))
    if kind == "union":
        return Union(tuple(from_json(p) for p in obj["parts"]))
    if kind == "empty":
        return Empty()
    raise ValueError(f"unknown set type {kind!r}")
