import json

import jsonschema
import numpy as np
import pytest

from kappanorm.errors import DimensionError
from kappanorm.sets import (
    CLOSED_SET_SCHEMA,
    Ball,
    Cylinder,
    Empty,
    NormKind,
    Polytope,
    Subspace,
    Union,
    box,
    from_json,
    point,
    to_json,
)

SAMPLES = [
    Ball([0.0, 1.0], 2.0),
    Ball([1.0, 1.0, 1.0], 0.5, NormKind.LINF),
    Polytope([[0, 0], [1, 0], [0, 1]]),
    Subspace([[1.0, 0.0]], [0.0, 3.0]),
    Subspace(np.zeros((0, 2)), [1.0, 2.0]),
    Cylinder(Ball([0.0, 0.0, 0.0], 1.0), [[0.0, 0.0, 1.0]]),
    Union((Ball([0.0, 0.0], 1.0), point([3.0, 3.0]))),
    Empty(),
]


@pytest.mark.parametrize("C", SAMPLES, ids=lambda C: type(C).__name__)
def test_json_round_trip(C):
    obj = to_json(C)
    jsonschema.validate(obj, CLOSED_SET_SCHEMA)
    again = to_json(from_json(json.loads(json.dumps(obj))))
    assert again == obj


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        Ball([0.0], -1.0)


def test_non_orthonormal_basis_rejected():
    with pytest.raises(ValueError):
        Subspace([[1.0, 1.0]], [0.0, 0.0])


def test_union_with_mixed_dimensions_rejected():
    with pytest.raises(DimensionError):
        Union((Ball([0.0], 1.0), Ball([0.0, 0.0], 1.0)))


def test_polytope_rejects_nonfinite_vertices():
    with pytest.raises(ValueError):
        Polytope([[0.0, np.inf]])


def test_vertex_arrays_are_read_only():
    P = box([0, 0], [1, 1])
    with pytest.raises(ValueError):
        P.vertices[0, 0] = 5.0


def test_span_orthonormalises():
    M = Subspace.span([[2.0, 0.0, 0.0], [1.0, 1.0, 0.0]])
    np.testing.assert_allclose(M.basis @ M.basis.T, np.eye(2), atol=1e-12)
    assert M.through_origin


def test_box_corners():
    assert sorted(map(tuple, box([0, 0], [1, 2]).vertices.tolist())) == [(0, 0), (0, 2), (1, 0), (1, 2)]
