import itertools

import numpy as np
import pytest

import chamberwalk as cw
from chamberwalk.core import (
    ZERO,
    chamber_to_permutation,
    fubini_number,
    ordered_set_partitions,
    permutation_to_chamber,
    validate_closure,
)


def test_face_product_example():
    f = cw.parse_sign_vector("+0-")
    g = cw.parse_sign_vector("--+")
    assert cw.face_product(f, g) == cw.parse_sign_vector("+--")


def test_face_product_length_mismatch():
    with pytest.raises(cw.DimensionError):
        cw.face_product((1, 0), (1, 0, -1))


def test_is_chamber():
    assert cw.is_chamber(cw.parse_sign_vector("+++"))
    assert not cw.is_chamber(cw.parse_sign_vector("0+-"))
    assert not cw.is_chamber((0, 0, 0))


@pytest.mark.parametrize("builder,n", [("boolean", 5), ("braid", 4)])
def test_semigroup_laws_random(builder, n):
    arr = cw.build_boolean(n) if builder == "boolean" else cw.build_braid(n)
    rng = np.random.default_rng(1)
    faces = arr.faces
    idx = rng.integers(0, len(faces), size=(10_000, 3))
    for i, j, k in idx:
        f, g, h = faces[i], faces[j], faces[k]
        assert cw.face_product(cw.face_product(f, g), h) == cw.face_product(
            f, cw.face_product(g, h)
        )
        assert cw.face_product(f, f) == f
        assert cw.face_product(cw.face_product(f, g), f) == cw.face_product(f, g)


def test_chamber_absorption():
    arr = cw.build_braid(3)
    for f in arr.faces:
        for c in arr.chambers:
            assert cw.is_chamber(cw.face_product(f, c))


def test_build_boolean_counts():
    for n in (2, 3):
        arr = cw.build_boolean(n)
        assert arr.m == n
        assert arr.n_chambers == 2**n
        assert len(arr.faces) == 3**n
        assert arr.symmetry_certified
    with pytest.raises(ValueError):
        cw.build_boolean(0)


def test_build_braid_counts():
    # face counts cross-checked against direct ordered-set-partition enumeration
    for n, m, nch in [(2, 1, 2), (3, 3, 6), (4, 6, 24)]:
        arr = cw.build_braid(n)
        assert arr.m == m
        assert arr.n_chambers == nch
        assert len(arr.faces) == sum(1 for _ in ordered_set_partitions(range(n)))
        assert len(arr.faces) == fubini_number(n)
    assert fubini_number(3) == 13
    assert fubini_number(4) == 75
    with pytest.raises(ValueError):
        cw.build_braid(1)


def test_braid_faces_closed_under_product():
    arr = cw.build_braid(4)
    assert validate_closure(arr.faces) is None


def test_partition_to_sign_vector():
    # cards are 0-based; pairs ordered (0,1), (0,2), (1,2)
    assert cw.partition_to_sign_vector([{0}, {1, 2}], 3) == cw.parse_sign_vector("++0")
    assert cw.partition_to_sign_vector([{0, 1, 2}], 3) == (0, 0, 0)
    assert cw.partition_to_sign_vector([{1}, {0}, {2}], 3) == cw.parse_sign_vector(
        "-++"
    )
    with pytest.raises(ValueError):
        cw.partition_to_sign_vector([{0}, {0, 1}], 2)
    with pytest.raises(ValueError):
        cw.partition_to_sign_vector([{0}], 2)


def test_linear_orders_are_chambers():
    for perm in itertools.permutations(range(4)):
        c = cw.partition_to_sign_vector([{x} for x in perm], 4)
        assert cw.is_chamber(c)
        assert chamber_to_permutation(c, 4) == perm


def _pop_shuffle(perm, blocks):
    out = []
    placed = set()
    for block in blocks:
        out.extend(c for c in perm if c in block)
        placed |= set(block)
    out.extend(c for c in perm if c not in placed)
    return tuple(out)


def test_braid_product_matches_pop_shuffle():
    # permutation-level simulation is the oracle for the face action
    n = 5
    rng = np.random.default_rng(7)
    parts = [p for p in ordered_set_partitions(range(n))]
    for _ in range(1000):
        perm = tuple(rng.permutation(n))
        blocks = parts[rng.integers(len(parts))]
        face = cw.partition_to_sign_vector(blocks, n)
        moved = cw.face_product(face, permutation_to_chamber(perm))
        assert moved == permutation_to_chamber(_pop_shuffle(perm, blocks))


def test_check_separating():
    b3 = cw.build_braid(3)
    tf = cw.tsetlin_faces(cw.TsetlinSpec([1 / 3, 1 / 3, 1 / 3]))
    assert cw.check_separating(b3, tf)

    a2 = cw.build_boolean(2)
    w = cw.WeightedFaceSet(((1, 0),), np.array([1.0]))
    assert not cw.check_separating(a2, w)
    from chamberwalk.core import violated_hyperplanes

    assert violated_hyperplanes(a2, w) == [1]
    empty = cw.WeightedFaceSet((), np.array([]))
    assert not cw.check_separating(a2, empty)


def test_weighted_face_set_validation():
    with pytest.raises(ValueError):
        cw.WeightedFaceSet(((1, 1),), np.array([0.5]))
    with pytest.raises(ValueError):
        cw.WeightedFaceSet(((1, 1), (0, 1)), np.array([0.7, -0.3]))


def test_custom_arrangement_rejects_unclosed_faces():
    # omit the product (+,+) of (+,0) and (0,+)
    faces = [(0, 0), (1, 0), (0, 1), (1, 1), (-1, -1), (-1, 0), (0, -1), (1, -1)]
    with pytest.raises(ValueError, match="closed"):
        cw.build_custom(2, [(1, 1), (-1, -1), (1, -1)], faces)


def test_arrangement_file_roundtrip(tmp_path):
    arr = cw.build_boolean(2)
    w = cw.hypercube_nn_faces([0.3, 0.2], [0.25, 0.25])
    path = tmp_path / "bool2.arr"
    from chamberwalk.core import write_arrangement_file

    write_arrangement_file(path, arr, w)
    arr2, w2 = cw.load_arrangement_file(path)
    assert arr2.m == 2
    assert set(arr2.chambers) == set(arr.chambers)
    assert set(arr2.faces) == set(arr.faces)
    got = dict(zip(w2.faces, w2.weights))
    for f, wt in zip(w.faces, w.weights):
        assert got[f] == pytest.approx(wt, abs=1e-15)


def test_boolean_faces_all_zero_identity():
    arr = cw.build_boolean(3)
    e = (ZERO,) * 3
    for f in arr.faces:
        assert cw.face_product(e, f) == f
        assert cw.face_product(f, e) == f
