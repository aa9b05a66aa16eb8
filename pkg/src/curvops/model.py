"""Pointwise curvature algebra.

A :class:`ZeroModel` is a finite-dimensional inner-product space together
with an algebraic curvature tensor.  This module checks the tensor
symmetries, builds the skew-adjoint curvature operators, tests whether the
operators pairwise commute, measures nilpotency order, and -- for
positive-definite models with commuting operators -- recovers the canonical
orthogonal splitting into curvature two-planes plus a flat complement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

__all__ = [
    "BlockDecomposition",
    "CommutatorReport",
    "ModelError",
    "NilpotencyResult",
    "Signature",
    "SkewOperator",
    "SymmetryReport",
    "ZeroModel",
    "basis_operators",
    "block_model",
    "block_tensor",
    "check_symmetries",
    "curvature_operator",
    "decompose",
    "is_skew_tsankov",
    "load_model",
    "model_from_json",
    "model_to_json",
    "nilpotency_order",
    "random_orthogonal",
    "save_model",
]


class ModelError(ValueError):
    """Raised when a model violates a structural requirement."""


class Signature(NamedTuple):
    """Metric signature: ``p`` timelike (negative) and ``q`` spacelike
    (positive) directions.  Compares equal to the plain tuple ``(p, q)``."""

    p: int
    q: int

    @property
    def dim(self) -> int:
        return self.p + self.q

    @property
    def is_riemannian(self) -> bool:
        return self.p == 0

    def __str__(self) -> str:
        return f"({self.p},{self.q})"


class ZeroModel:
    """Inner-product space with a 4-index curvature tensor.

    ``inner`` is the (symmetric, non-degenerate) Gram matrix of the working
    basis; ``tensor[i, j, k, l]`` holds A(e_i, e_j, e_k, e_l).  The tensor is
    stored as given -- use :func:`check_symmetries` to test whether it is an
    algebraic curvature tensor.
    """

    def __init__(self, inner: np.ndarray, tensor: np.ndarray):
        inner = np.asarray(inner, dtype=float)
        tensor = np.asarray(tensor, dtype=float)
        if inner.ndim != 2 or inner.shape[0] != inner.shape[1]:
            raise ModelError(f"inner product must be square, got {inner.shape}")
        m = inner.shape[0]
        if tensor.shape != (m, m, m, m):
            raise ModelError(
                f"tensor shape {tensor.shape} does not match dimension {m}"
            )
        scale = max(1.0, float(np.abs(inner).max()))
        if np.abs(inner - inner.T).max() > 1e-12 * scale:
            raise ModelError("inner product matrix is not symmetric")
        eigs = np.linalg.eigvalsh(inner)
        if np.abs(eigs).min() <= 1e-13 * max(1.0, np.abs(eigs).max()):
            raise ModelError("inner product matrix is degenerate")
        self.inner = inner
        self.tensor = tensor
        self.dim = m

    @property
    def signature(self) -> Signature:
        eigs = np.linalg.eigvalsh(self.inner)
        return Signature(int(np.sum(eigs < 0)), int(np.sum(eigs > 0)))

    def max_norm(self) -> float:
        return float(np.abs(self.tensor).max())

    def __repr__(self) -> str:
        return f"ZeroModel(dim={self.dim}, signature={self.signature})"


# ---------------------------------------------------------------------------
# Symmetry checks


@dataclass(frozen=True)
class SymmetryReport:
    passed: bool
    worst: float
    pair_symmetry: float  # max |A_ijkl - A_klij|
    antisymmetry: float  # max |A_ijkl + A_jikl|
    bianchi: float  # max cyclic-sum violation
    tolerance: float

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "worst": self.worst,
            "pair_symmetry": self.pair_symmetry,
            "antisymmetry": self.antisymmetry,
            "bianchi": self.bianchi,
            "tolerance": self.tolerance,
        }


def _effective_tol(model: ZeroModel, tol: float) -> float:
    # absolute tolerance, scaled up when the tensor max-norm exceeds 1
    return tol * max(1.0, model.max_norm())


def check_symmetries(model: ZeroModel, tol: float = 1e-10) -> SymmetryReport:
    """Test the algebraic curvature tensor identities.

    Checked: pair-interchange symmetry A(x,y,z,w) = A(z,w,x,y), first-slot
    antisymmetry A(x,y,z,w) = -A(y,x,z,w), and the first Bianchi identity
    A(x,y,z,w) + A(y,z,x,w) + A(z,x,y,w) = 0.
    """
    a = model.tensor
    pair = float(np.abs(a - np.einsum("ijkl->klij", a)).max())
    anti = float(np.abs(a + np.einsum("ijkl->jikl", a)).max())
    bianchi = float(
        np.abs(a + np.einsum("ijkl->jkil", a) + np.einsum("ijkl->kijl", a)).max()
    )
    worst = max(pair, anti, bianchi)
    eff = _effective_tol(model, tol)
    return SymmetryReport(worst <= eff, worst, pair, anti, bianchi, eff)


# ---------------------------------------------------------------------------
# Curvature operators


@dataclass(frozen=True)
class SkewOperator:
    """Curvature operator of a pair of tangent vectors.

    The matrix acts on coordinates of tangent vectors; it is skew-adjoint
    with respect to the model's inner product:  <Av, w> = -<v, Aw>.
    """

    matrix: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


def curvature_operator(model: ZeroModel, x, y) -> SkewOperator:
    """Operator A(x, y) defined by  <A(x,y) z, w> = A(x, y, z, w)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    pairing = np.einsum("ijkl,i,j->kl", model.tensor, x, y)  # [z, w]
    matrix = np.linalg.solve(model.inner, pairing.T)
    return SkewOperator(matrix, x, y)


def basis_operators(model: ZeroModel):
    """All operators A(e_i, e_j) for basis pairs i < j.

    Returns ``(ops, pairs)`` with ``ops`` of shape ``(N, m, m)``.  By
    bilinearity these span every curvature operator, so commutativity and
    nilpotency need only be tested on them.
    """
    m = model.dim
    inv = np.linalg.inv(model.inner)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    ops = np.empty((len(pairs), m, m))
    for idx, (i, j) in enumerate(pairs):
        ops[idx] = inv @ model.tensor[i, j].T
    return ops, pairs


@dataclass(frozen=True)
class CommutatorReport:
    passed: bool
    worst_norm: float
    worst_pair: tuple  # ((i, j), (k, l)) basis pairs of the worst commutator
    tolerance: float

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "worst_commutator_norm": self.worst_norm,
            "worst_pair": [list(self.worst_pair[0]), list(self.worst_pair[1])],
            "tolerance": self.tolerance,
        }


def is_skew_tsankov(model: ZeroModel, tol: float = 1e-10) -> CommutatorReport:
    """Do all curvature operators commute?

    Checks [A(e_i,e_j), A(e_k,e_l)] over basis pairs, reporting the largest
    commutator Frobenius norm.  The tolerance is absolute, scaled by the
    tensor max-norm when that exceeds 1.
    """
    ops, pairs = basis_operators(model)
    n = len(ops)
    worst = 0.0
    worst_pair = (pairs[0], pairs[0]) if pairs else ((0, 1), (0, 1))
    for a in range(n):
        left = ops[a]
        # batched commutators of op[a] with all later ops
        prod1 = np.einsum("ij,bjk->bik", left, ops[a + 1 :])
        prod2 = np.einsum("bij,jk->bik", ops[a + 1 :], left)
        norms = np.linalg.norm(prod1 - prod2, axis=(1, 2))
        if norms.size:
            b = int(np.argmax(norms))
            if norms[b] > worst:
                worst = float(norms[b])
                worst_pair = (pairs[a], pairs[a + 1 + b])
    eff = _effective_tol(model, tol)
    return CommutatorReport(worst <= eff, worst, worst_pair, eff)


@dataclass(frozen=True)
class NilpotencyResult:
    order: Optional[int]  # None when not nilpotent within the bound
    bound: int
    max_product_norms: tuple  # max norm over products of 1, 2, ... operators
    tolerance: float

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "bound": self.bound,
            "max_product_norms": list(self.max_product_norms),
            "tolerance": self.tolerance,
        }


def nilpotency_order(
    model: ZeroModel, max_order: int = 6, tol: float = 1e-10
) -> NilpotencyResult:
    """Smallest n such that every product of n basis operators vanishes.

    Products of length n are built from the basis operators (which span all
    curvature operators, so vanishing of these products is equivalent to
    vanishing of arbitrary ones).  Returns ``order=None`` if no such n is
    found up to ``max_order`` -- e.g. for any non-flat Riemannian model.
    """
    ops, _ = basis_operators(model)
    eff = _effective_tol(model, tol)
    norms = []
    current = ops  # products of length k, shape (K, m, m)
    for length in range(1, max_order + 1):
        level_max = float(np.abs(current).max()) if current.size else 0.0
        norms.append(level_max)
        if level_max <= eff:
            return NilpotencyResult(length, max_order, tuple(norms), eff)
        # extend products by one more basis operator on the left
        current = np.einsum("aij,bjk->abik", ops, current).reshape(
            -1, model.dim, model.dim
        )
    return NilpotencyResult(None, max_order, tuple(norms), eff)


# ---------------------------------------------------------------------------
# Block construction helpers


def block_tensor(
    dim: int, u: np.ndarray, v: np.ndarray, a: float, inner: Optional[np.ndarray] = None
) -> np.ndarray:
    """Curvature tensor of a single two-plane block.

    The plane spanned by the inner-orthonormal pair ``(u, v)`` carries the
    only curvature; the defining component is A(u, v, v, u) = a.
    """
    if inner is None:
        inner = np.eye(dim)
    cu = inner @ u
    cv = inner @ v
    theta = np.outer(cu, cv) - np.outer(cv, cu)
    return -a * np.einsum("ij,kl->ijkl", theta, theta)


def block_model(
    dim: int,
    planes: Sequence[tuple[np.ndarray, np.ndarray, float]],
    inner: Optional[np.ndarray] = None,
) -> ZeroModel:
    """Assemble a model whose curvature is a sum of two-plane blocks."""
    if inner is None:
        inner = np.eye(dim)
    tensor = np.zeros((dim, dim, dim, dim))
    for u, v, a in planes:
        tensor += block_tensor(dim, np.asarray(u, float), np.asarray(v, float), a, inner)
    return ZeroModel(inner, tensor)


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish random orthogonal matrix via QR with sign correction."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def conjugate_tensor(tensor: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Pull a tensor back along a change of basis: new basis vectors are the
    columns of ``basis``."""
    t = np.einsum("ijkl,ia->ajkl", tensor, basis)
    t = np.einsum("ajkl,jb->abkl", t, basis)
    t = np.einsum("abkl,kc->abcl", t, basis)
    return np.einsum("abcl,ld->abcd", t, basis)


# ---------------------------------------------------------------------------
# Decomposition


@dataclass(frozen=True)
class BlockDecomposition:
    """Orthogonal splitting into curvature two-planes plus flat complement.

    ``planes[i]`` is an orthonormal pair spanning the i-th curvature plane,
    ``eigencurvatures[i]`` its curvature component A(e1, e2, e2, e1);
    ``kernel_basis`` (shape ``(m, m - 2k)``) spans the common kernel of all
    curvature operators.
    """

    planes: tuple
    eigencurvatures: tuple
    kernel_basis: np.ndarray
    inner: np.ndarray = field(repr=False)

    @property
    def block_count(self) -> int:
        return len(self.planes)

    def reconstruct(self) -> np.ndarray:
        dim = self.inner.shape[0]
        tensor = np.zeros((dim,) * 4)
        for (u, v), a in zip(self.planes, self.eigencurvatures):
            tensor += block_tensor(dim, u, v, a, self.inner)
        return tensor

    def to_json(self) -> dict:
        return {
            "block_count": self.block_count,
            "eigencurvatures": [float(a) for a in self.eigencurvatures],
            "planes": [[list(map(float, u)), list(map(float, v))] for u, v in self.planes],
            "kernel_basis": [list(map(float, col)) for col in self.kernel_basis.T],
        }


class DecompositionError(ModelError):
    pass


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    """Group sorted eigenvalues whose gaps stay below ``tol``."""
    order = np.argsort(values)
    groups: list[list[int]] = []
    for idx in order:
        if groups and abs(values[idx] - values[groups[-1][-1]]) <= tol:
            groups[-1].append(int(idx))
        else:
            groups.append([int(idx)])
    return groups


def _split_planes(
    frame: np.ndarray, ops: np.ndarray, rng: np.random.Generator, depth: int
) -> list[np.ndarray]:
    """Recursively split the span of ``frame`` (orthonormal columns) into
    invariant two-planes using squares of random operator combinations."""
    width = frame.shape[1]
    if width == 2:
        return [frame]
    if depth > 8 or width % 2 == 1:
        raise DecompositionError("could not isolate invariant two-planes")
    coeffs = rng.standard_normal(len(ops))
    t_full = np.einsum("a,aij->ij", coeffs, ops)
    t_sub = frame.T @ t_full @ frame
    s_sub = t_sub @ t_sub  # symmetric, negative semi-definite on curvature planes
    eigvals, eigvecs = np.linalg.eigh(s_sub)
    scale = max(np.abs(eigvals).max(), 1e-30)
    groups = _cluster(eigvals, 1e-7 * scale)
    if len(groups) == 1:
        # retry with a fresh combination
        return _split_planes(frame, ops, rng, depth + 1)
    planes = []
    for group in groups:
        sub = frame @ eigvecs[:, group]
        planes.extend(_split_planes(sub, ops, rng, depth + 1))
    return planes


def decompose(
    model: ZeroModel,
    tol: float = 1e-10,
    rng: Optional[np.random.Generator] = None,
    max_retries: int = 8,
) -> BlockDecomposition:
    """Recover the orthogonal two-plane block structure of a commuting
    positive-definite model.

    Strategy: draw a random combination T of basis operators; S = T^2 is
    symmetric negative semi-definite and its negative eigenspaces are (for
    generic coefficients) exactly the curvature two-planes, while its kernel
    is the flat complement.  Near-degenerate eigenvalues are refined with
    further random combinations.  The candidate splitting is then verified:
    every basis operator must act on every plane as a scalar multiple of the
    plane's rotation generator and vanish on the complement.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    eigs = np.linalg.eigvalsh(model.inner)
    if eigs.min() <= 0:
        raise DecompositionError(
            "decomposition requires a positive-definite inner product; "
            f"signature is {model.signature}"
        )
    sym = check_symmetries(model, tol)
    if not sym.passed:
        raise DecompositionError(
            f"tensor is not an algebraic curvature tensor (worst violation {sym.worst:.3e})"
        )
    comm = is_skew_tsankov(model, tol)
    if not comm.passed:
        raise DecompositionError(
            "curvature operators do not commute "
            f"(worst commutator norm {comm.worst_norm:.3e})"
        )

    m = model.dim
    eff = _effective_tol(model, tol)

    # work in an orthonormal basis: columns of `onb` are the new basis vectors
    chol = np.linalg.cholesky(model.inner)
    onb = np.linalg.inv(chol).T
    tensor_on = conjugate_tensor(model.tensor, onb)

    if np.abs(tensor_on).max() <= eff:
        return BlockDecomposition((), (), np.array(onb), model.inner)

    ops = np.empty((m * (m - 1) // 2, m, m))
    idx = 0
    for i in range(m):
        for j in range(i + 1, m):
            ops[idx] = tensor_on[i, j].T
            idx += 1

    last_error = None
    for _ in range(max_retries):
        try:
            coeffs = rng.standard_normal(len(ops))
            t = np.einsum("a,aij->ij", coeffs, ops)
            s = t @ t
            eigvals, eigvecs = np.linalg.eigh(s)
            scale = max(np.abs(eigvals).max(), 1e-30)
            zero_mask = np.abs(eigvals) <= 1e-9 * scale
            kernel = eigvecs[:, zero_mask]
            nonzero = eigvecs[:, ~zero_mask]
            groups = _cluster(eigvals[~zero_mask], 1e-7 * scale)
            planes_on: list[np.ndarray] = []
            for group in groups:
                frame = nonzero[:, group]
                planes_on.extend(_split_planes(frame, ops, rng, 0))
            _verify_split(ops, planes_on, kernel, eff)
            curvatures = []
            for frame in planes_on:
                u, v = frame[:, 0], frame[:, 1]
                a = float(np.einsum("ijkl,i,j,k,l", tensor_on, u, v, v, u))
                if abs(a) <= eff:
                    raise DecompositionError("degenerate plane with zero curvature")
                curvatures.append(a)
            planes = tuple(
                (onb @ frame[:, 0], onb @ frame[:, 1]) for frame in planes_on
            )
            kernel_basis = onb @ kernel
            result = BlockDecomposition(
                planes, tuple(curvatures), kernel_basis, model.inner
            )
            residual = float(np.abs(result.reconstruct() - model.tensor).max())
            if residual > 10 * eff:
                raise DecompositionError(
                    f"reconstruction residual {residual:.3e} exceeds tolerance"
                )
            return result
        except DecompositionError as err:
            last_error = err
            continue
    raise DecompositionError(
        f"two-plane splitting failed after {max_retries} attempts: {last_error}"
    )


def _verify_split(
    ops: np.ndarray, planes: list[np.ndarray], kernel: np.ndarray, tol: float
) -> None:
    """Every operator must rotate each plane and kill the complement."""
    op_scale = max(1.0, float(np.abs(ops).max()))
    if kernel.size:
        worst = float(np.abs(np.einsum("aij,jk->aik", ops, kernel)).max())
        if worst > tol * op_scale:
            raise DecompositionError(
                f"operators do not vanish on the flat complement ({worst:.3e})"
            )
    for frame in planes:
        u, v = frame[:, 0], frame[:, 1]
        pu = np.einsum("aij,j->ai", ops, u)  # all operators applied to u
        pv = np.einsum("aij,j->ai", ops, v)
        eps = -pu @ v  # A u = -eps v  (rotation generator convention)
        resid_u = pu + eps[:, None] * v[None, :]
        resid_v = pv - eps[:, None] * u[None, :]
        worst = max(float(np.abs(resid_u).max()), float(np.abs(resid_v).max()))
        if worst > tol * op_scale:
            raise DecompositionError(
                f"an operator does not act as a plane rotation ({worst:.3e})"
            )


def epsilon_on_plane(
    model: ZeroModel, decomposition: BlockDecomposition, x, y, plane_index: int
) -> float:
    """Rotation coefficient of A(x, y) on the given curvature plane.

    With the plane frame (e1, e2), the operator restricted to the plane is
    eps * J where J e1 = -e2, J e2 = e1; in particular
    eps(e1, e2) equals the plane's eigencurvature.
    """
    op = curvature_operator(model, x, y)
    u, v = decomposition.planes[plane_index]
    return float(-(model.inner @ v) @ op.apply(u))


# ---------------------------------------------------------------------------
# JSON serialization

_ORBIT_SIGNS = (
    ((0, 1, 2, 3), 1.0),
    ((1, 0, 2, 3), -1.0),
    ((0, 1, 3, 2), -1.0),
    ((1, 0, 3, 2), 1.0),
    ((2, 3, 0, 1), 1.0),
    ((3, 2, 0, 1), -1.0),
    ((2, 3, 1, 0), -1.0),
    ((3, 2, 1, 0), 1.0),
)


def model_to_json(model: ZeroModel) -> dict:
    """Serialize as dimension, row-major inner product, and the non-zero
    tensor entries in canonical position (i < j, k < l, (i,j) <= (k,l))."""
    entries = []
    m = model.dim
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(m):
                for l in range(k + 1, m):
                    if (i, j) > (k, l):
                        continue
                    value = model.tensor[i, j, k, l]
                    if value != 0.0:
                        entries.append([i, j, k, l, float(value)])
    return {
        "dim": m,
        "inner": [float(v) for v in model.inner.reshape(-1)],
        "entries": entries,
    }


def model_from_json(doc: dict) -> ZeroModel:
    """Load a model, completing each listed entry across its symmetry orbit.

    Conflicting assignments to the same slot are an error; unlisted slots
    are zero.  Indices are 0-based.
    """
    try:
        m = int(doc["dim"])
        inner = np.asarray(doc["inner"], dtype=float).reshape(m, m)
        raw_entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as err:
        raise ModelError(f"malformed model document: {err}") from err
    tensor = np.zeros((m, m, m, m))
    filled = np.zeros((m, m, m, m), dtype=bool)
    for entry in raw_entries:
        if len(entry) != 5:
            raise ModelError(f"entry {entry!r} must be [i, j, k, l, value]")
        i, j, k, l = (int(v) for v in entry[:4])
        value = float(entry[4])
        for indices in ((i, j, k, l),):
            if not all(0 <= v < m for v in indices):
                raise ModelError(f"entry {entry!r} has indices outside dimension {m}")
        base = (i, j, k, l)
        for perm, sign in _ORBIT_SIGNS:
            slot = tuple(base[p] for p in perm)
            signed = sign * value
            if filled[slot] and abs(tensor[slot] - signed) > 1e-12 * max(1.0, abs(value)):
                raise ModelError(
                    f"conflicting values for tensor slot {slot}: "
                    f"{tensor[slot]!r} vs {signed!r}"
                )
            tensor[slot] = signed
            filled[slot] = True
    return ZeroModel(inner, tensor)


def save_model(model: ZeroModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_json(model), handle, indent=2)
        handle.write("\n")


def load_model(path: str) -> ZeroModel:
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_json(json.load(handle))
