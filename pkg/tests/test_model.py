import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvops.model import (
    ModelError,
    ZeroModel,
    basis_operators,
    block_model,
    block_tensor,
    check_symmetries,
    conjugate_tensor,
    curvature_operator,
    decompose,
    is_skew_tsankov,
    model_from_json,
    model_to_json,
    nilpotency_order,
    random_orthogonal,
)


def _orbit(tensor, i, j, k, l, value):
    # writes one value across the full symmetry orbit of (i, j, k, l)
    for (a, b, c, d), sign in (
        ((i, j, k, l), 1.0),
        ((j, i, k, l), -1.0),
        ((i, j, l, k), -1.0),
        ((j, i, l, k), 1.0),
        ((k, l, i, j), 1.0),
        ((l, k, i, j), -1.0),
        ((k, l, j, i), -1.0),
        ((l, k, j, i), 1.0),
    ):
        tensor[a, b, c, d] = sign * value


def test_zero_tensor_passes():
    model = ZeroModel(np.eye(3), np.zeros((3, 3, 3, 3)))
    report = check_symmetries(model)
    assert report.passed and report.worst == 0.0


def test_completed_single_block_passes():
    tensor = np.zeros((2, 2, 2, 2))
    _orbit(tensor, 0, 1, 1, 0, 3.0)
    assert check_symmetries(ZeroModel(np.eye(2), tensor)).passed


def test_broken_antisymmetry_detected():
    tensor = np.zeros((2, 2, 2, 2))
    tensor[0, 1, 1, 0] = 3.0  # partner entries left at zero
    report = check_symmetries(ZeroModel(np.eye(2), tensor))
    assert not report.passed
    assert report.worst == pytest.approx(3.0)


def test_operator_of_equal_arguments_vanishes(rng):
    tensor = np.zeros((3, 3, 3, 3))
    _orbit(tensor, 0, 1, 1, 0, 2.0)
    _orbit(tensor, 0, 2, 2, 0, -1.0)
    model = ZeroModel(np.eye(3), tensor)
    x = rng.normal(size=3)
    assert curvature_operator(model, x, x).norm() == pytest.approx(0.0, abs=1e-14)


def test_dim2_operator_orientation():
    a = 3.0
    tensor = np.zeros((2, 2, 2, 2))
    _orbit(tensor, 0, 1, 1, 0, a)
    op = curvature_operator(ZeroModel(np.eye(2), tensor), [1.0, 0.0], [0.0, 1.0])
    assert op.apply([1.0, 0.0]) == pytest.approx([0.0, -a])
    assert op.apply([0.0, 1.0]) == pytest.approx([a, 0.0])


def test_operator_skew_adjoint(rng):
    inner = np.diag([1.0, -1.0, 1.0, 1.0])
    tensor = np.zeros((4, 4, 4, 4))
    _orbit(tensor, 0, 1, 1, 0, 1.5)
    _orbit(tensor, 0, 1, 2, 3, 0.7)
    _orbit(tensor, 2, 3, 3, 2, -2.0)
    model = ZeroModel(inner, tensor)
    x, y, v, w = rng.normal(size=(4, 4))
    op = curvature_operator(model, x, y)
    left = op.apply(v) @ inner @ w
    right = v @ inner @ op.apply(w)
    assert left == pytest.approx(-right)


def test_dim2_always_commutes(rng):
    tensor = np.zeros((2, 2, 2, 2))
    _orbit(tensor, 0, 1, 1, 0, rng.uniform(-5, 5))
    assert is_skew_tsankov(ZeroModel(np.eye(2), tensor)).passed


def test_constant_curvature_dim4_fails():
    delta = np.eye(4)
    tensor = np.einsum("il,jk->ijkl", delta, delta) - np.einsum(
        "ik,jl->ijkl", delta, delta
    )
    report = is_skew_tsankov(ZeroModel(delta, tensor))
    assert not report.passed
    assert report.worst_norm == pytest.approx(np.sqrt(2.0))


def test_block_tensor_matches_orbit():
    built = block_tensor(4, np.eye(4)[:, 0], np.eye(4)[:, 1], 2.5)
    manual = np.zeros((4, 4, 4, 4))
    _orbit(manual, 0, 1, 1, 0, 2.5)
    assert np.allclose(built, manual)


def test_riemannian_nonzero_model_is_not_nilpotent():
    model = block_model(4, [(np.eye(4)[:, 0], np.eye(4)[:, 1], 2.0)])
    result = nilpotency_order(model, max_order=8)
    assert result.order is None


def test_nilpotency_of_a_nilpotent_toy():
    # hyperbolic-pair inner in dim 4, one curvature entry on the x-pair:
    # the lone operator maps x-directions into null directions and kills
    # them, so its square vanishes
    inner = np.zeros((4, 4))
    inner[0, 2] = inner[2, 0] = inner[1, 3] = inner[3, 1] = 1.0
    tensor = np.zeros((4, 4, 4, 4))
    _orbit(tensor, 0, 1, 1, 0, -1.0)
    result = nilpotency_order(ZeroModel(inner, tensor))
    assert result.order == 2


def test_decompose_zero_tensor():
    model = ZeroModel(np.eye(5), np.zeros((5, 5, 5, 5)))
    dec = decompose(model)
    assert dec.block_count == 0
    assert dec.kernel_basis.shape == (5, 5)


def test_decompose_single_block():
    model = block_model(4, [(np.eye(4)[:, 0], np.eye(4)[:, 1], 3.0)])
    dec = decompose(model)
    assert dec.block_count == 1
    assert dec.eigencurvatures[0] == pytest.approx(3.0)
    u, v = dec.planes[0]
    span = np.stack([u, v]).T
    # plane recovered up to rotation inside itself: e1, e2 lie in the span
    coeffs, residual, *_ = np.linalg.lstsq(span, np.eye(4)[:, :2], rcond=None)
    assert np.abs(span @ coeffs - np.eye(4)[:, :2]).max() < 1e-9
    assert np.abs(dec.reconstruct() - model.tensor).max() < 1e-9


def test_decompose_two_blocks_conjugated(rng):
    q = random_orthogonal(rng, 5)
    planes = [(q[:, 0], q[:, 1], 1.0), (q[:, 2], q[:, 3], 2.0)]
    model = block_model(5, planes)
    dec = decompose(model)
    assert dec.block_count == 2
    assert sorted(dec.eigencurvatures) == pytest.approx([1.0, 2.0])
    (u1, v1), (u2, v2) = dec.planes
    gram = np.stack([u1, v1]) @ np.stack([u2, v2]).T
    assert np.abs(gram).max() < 1e-9  # planes mutually orthogonal
    assert np.abs(dec.reconstruct() - model.tensor).max() < 1e-9
    assert dec.kernel_basis.shape == (5, 1)


def test_decompose_with_random_spd_inner(rng):
    # non-orthonormal frame: inner = B^T B, blocks on B-columns
    b = rng.normal(size=(4, 4)) + 4 * np.eye(4)
    inner = b.T @ b
    frame = np.linalg.inv(b)  # columns are inner-orthonormal
    planes = [(frame[:, 0], frame[:, 1], -2.0)]
    model = block_model(4, planes, inner=inner)
    assert is_skew_tsankov(model).passed
    dec = decompose(model)
    assert dec.block_count == 1
    assert dec.eigencurvatures[0] == pytest.approx(-2.0)
    assert np.abs(dec.reconstruct() - model.tensor).max() < 1e-9


def test_decompose_repeated_eigencurvature(rng):
    # equal curvatures force the degenerate-eigenspace refinement path
    planes = [
        (np.eye(6)[:, 0], np.eye(6)[:, 1], 2.0),
        (np.eye(6)[:, 2], np.eye(6)[:, 3], 2.0),
    ]
    model = block_model(6, planes)
    dec = decompose(model, rng=rng)
    assert dec.block_count == 2
    assert sorted(dec.eigencurvatures) == pytest.approx([2.0, 2.0])
    assert np.abs(dec.reconstruct() - model.tensor).max() < 1e-9


def test_decompose_rejects_noncommuting():
    delta = np.eye(4)
    tensor = np.einsum("il,jk->ijkl", delta, delta) - np.einsum(
        "ik,jl->ijkl", delta, delta
    )
    with pytest.raises(ModelError):
        decompose(ZeroModel(delta, tensor))


def test_indefinite_inner_rejected_by_decompose():
    inner = np.diag([-1.0, 1.0, 1.0, 1.0])
    model = ZeroModel(inner, np.zeros((4, 4, 4, 4)))
    with pytest.raises(ModelError):
        decompose(model)


def test_degenerate_inner_rejected():
    with pytest.raises(ModelError):
        ZeroModel(np.zeros((2, 2)), np.zeros((2, 2, 2, 2)))


def test_json_round_trip_completes_orbit():
    doc = {
        "dim": 2,
        "inner": [[1.0, 0.0], [0.0, 1.0]],
        "entries": [[0, 1, 1, 0, 3.0]],
    }
    model = model_from_json(doc)
    assert model.tensor[1, 0, 1, 0] == pytest.approx(-3.0)
    assert model.tensor[1, 0, 0, 1] == pytest.approx(3.0)
    again = model_from_json(json.loads(json.dumps(model_to_json(model))))
    assert np.allclose(again.tensor, model.tensor)
    assert np.allclose(again.inner, model.inner)


def test_json_conflicting_entries_rejected():
    doc = {
        "dim": 2,
        "inner": [[1.0, 0.0], [0.0, 1.0]],
        "entries": [[0, 1, 1, 0, 3.0], [1, 0, 1, 0, 3.0]],  # orbit says -3
    }
    with pytest.raises(ModelError):
        model_from_json(doc)


def test_conjugation_preserves_checks(rng):
    model = block_model(
        5, [(np.eye(5)[:, 0], np.eye(5)[:, 1], 1.5), (np.eye(5)[:, 2], np.eye(5)[:, 3], -0.5)]
    )
    q = random_orthogonal(rng, 5)
    rotated = ZeroModel(np.eye(5), conjugate_tensor(model.tensor, q))
    assert check_symmetries(rotated).passed
    assert is_skew_tsankov(rotated).passed


def test_basis_operators_count():
    model = ZeroModel(np.eye(4), np.zeros((4, 4, 4, 4)))
    ops, pairs = basis_operators(model)
    assert ops.shape == (6, 4, 4)
    assert pairs == [(i, j) for i in range(4) for j in range(i + 1, 4)]


@given(
    st.integers(min_value=1, max_value=2),
    st.lists(
        st.floats(min_value=0.1, max_value=5.0, allow_nan=False),
        min_size=1,
        max_size=2,
    ),
    st.integers(min_value=0, max_value=2**31 - 1),
)
@settings(max_examples=60, deadline=None)
def test_random_block_models_commute(k, mags, seed):
    rng = np.random.default_rng(seed)
    k = min(k, len(mags))
    m = 2 * k + int(rng.integers(0, 2))
    q = random_orthogonal(rng, m)
    planes = [(q[:, 2 * i], q[:, 2 * i + 1], mags[i]) for i in range(k)]
    model = block_model(m, planes)
    assert check_symmetries(model).passed
    assert is_skew_tsankov(model).passed
