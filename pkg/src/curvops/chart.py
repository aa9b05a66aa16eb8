"""Coordinate charts and the metric -> curvature pipeline.

Conventions (used consistently across the package):

* ``gamma_first[i, j, k]``  = Gamma_{ijk} = (d_j g_{ik} + d_i g_{jk} - d_k g_{ij}) / 2
* ``gamma_second[k, i, j]`` = Gamma^k_{ij} = g^{kl} Gamma_{ijl}
* curvature operator      R(x, y) = nabla_x nabla_y - nabla_y nabla_x - nabla_[x,y]
* ``riemann[i, j, k, l]``   = g( R(d_i, d_j) d_k , d_l )
* ``ricci[j, k]``           = g^{il} riemann[i, j, k, l]
* ``scalar``                = g^{jk} ricci[j, k]

Derivatives of the metric come from exact second-order jets of the component
expressions, so Christoffel symbols carry no finite-difference error and the
curvature tensor only loses what float arithmetic must lose.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .expr import Expression, parse
from .model import ZeroModel, Signature, basis_operators

__all__ = [
    "Chart",
    "ChartDomainError",
    "ChartError",
    "CurvatureData",
    "LogScalarHessian",
    "build_chart",
    "christoffel_at",
    "curvature_at",
    "curvature_range_rank",
    "hessian_log_scalar",
    "metric_at",
    "model_at",
]

# a metric whose smallest |eigenvalue| falls below this fraction of the
# largest is treated as degenerate at that point
DEGENERACY_RATIO = 1e-13


class ChartError(ValueError):
    pass


class ChartDomainError(ChartError):
    """A probed point violates a guard, degenerates the metric, or flips
    the declared signature."""


@dataclass(frozen=True)
class Chart:
    """Symmetric metric component expressions over named coordinates.

    ``components`` is the full n x n grid; construction mirrors the upper
    triangle so symmetry holds by construction.  ``guards`` are expressions
    that must evaluate strictly positive for a point to belong to the chart.
    """

    dim: int
    signature: Signature
    components: tuple
    guards: tuple
    coords: tuple

    @property
    def aliases(self) -> dict:
        return {name: i for i, name in enumerate(self.coords)}

    def guard_values(self, point, strict: bool = True) -> np.ndarray:
        """Stacked guard expression values, shape ``(..., len(guards))``."""
        point = np.asarray(point, dtype=float)
        if not self.guards:
            return np.ones(point.shape[:-1] + (0,))
        return np.stack(
            [g.value(point, strict=strict) for g in self.guards], axis=-1
        )

    def contains(self, point) -> np.ndarray:
        """Boolean mask: every guard strictly positive and finite."""
        values = self.guard_values(point, strict=False)
        with np.errstate(invalid="ignore"):
            ok = np.all(values > 0.0, axis=-1)
        return ok & np.all(np.isfinite(values), axis=-1)


def build_chart(
    signature: Union[Signature, tuple],
    components: Sequence[Sequence[Union[str, Expression]]],
    guards: Sequence[Union[str, Expression]] = (),
    coords: Optional[Sequence[str]] = None,
) -> Chart:
    """Assemble a chart from component sources (upper triangle is read and
    mirrored; the lower triangle input is ignored)."""
    if not isinstance(signature, Signature):
        signature = Signature(*signature)
    dim = signature.dim
    if len(components) != dim or any(len(row) != dim for row in components):
        raise ChartError(
            f"component grid must be {dim}x{dim} for signature {signature}"
        )
    if coords is None:
        coords = tuple(f"x{i + 1}" for i in range(dim))
    else:
        coords = tuple(coords)
        if len(coords) != dim:
            raise ChartError(f"{len(coords)} coordinate names for dimension {dim}")
    aliases = {name: i for i, name in enumerate(coords)}

    def as_expr(item) -> Expression:
        if isinstance(item, Expression):
            if item.dim != dim:
                raise ChartError(
                    f"component expression dimension {item.dim} != chart dimension {dim}"
                )
            return item
        return parse(str(item), dim, aliases)

    grid = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i, dim):
            entry = as_expr(components[i][j])
            grid[i][j] = entry
            grid[j][i] = entry
    guard_exprs = tuple(as_expr(g) for g in guards)
    return Chart(
        dim=dim,
        signature=signature,
        components=tuple(tuple(row) for row in grid),
        guards=guard_exprs,
        coords=coords,
    )


# ---------------------------------------------------------------------------
# Metric evaluation


def _metric_jets(chart: Chart, point: np.ndarray, order: int, strict: bool = True):
    """Evaluate the metric and its coordinate derivatives.

    Returns ``(g, dg, d2g)`` with shapes ``(..., n, n)``,
    ``(..., n, n, n)`` (leading axis = derivative direction), and
    ``(..., n, n, n, n)`` (two leading derivative axes); higher entries are
    ``None`` below the requested order.
    """
    n = chart.dim
    point = np.asarray(point, dtype=float)
    batch = point.shape[:-1]
    g = np.empty(batch + (n, n))
    dg = np.empty(batch + (n, n, n)) if order >= 1 else None
    d2g = np.empty(batch + (n, n, n, n)) if order >= 2 else None
    for i in range(n):
        for j in range(i, n):
            entry = chart.components[i][j]
            if order == 0:
                v = entry.value(point, strict=strict)
            elif order == 1:
                v, grad = entry.jet1(point, strict=strict)
                dg[..., :, i, j] = grad
                dg[..., :, j, i] = grad
            else:
                jet = entry.jet2(point, strict=strict)
                v = jet.value
                dg[..., :, i, j] = jet.grad
                dg[..., :, j, i] = jet.grad
                d2g[..., :, :, i, j] = jet.hess
                d2g[..., :, :, j, i] = jet.hess
            g[..., i, j] = v
            g[..., j, i] = v
    return g, dg, d2g


def _point_str(point: np.ndarray) -> str:
    return np.array2string(np.asarray(point), precision=6, separator=", ")


def _validate_point(chart: Chart, point: np.ndarray, g: np.ndarray) -> None:
    guard_vals = chart.guard_values(point, strict=False)
    if np.any(~np.isfinite(guard_vals)) or np.any(guard_vals <= 0.0):
        raise ChartDomainError(
            f"point {_point_str(point)} violates a domain guard of the chart"
        )
    if np.any(~np.isfinite(g)):
        raise ChartDomainError(
            f"metric is not finite at point {_point_str(point)}"
        )
    eigs = np.linalg.eigvalsh(g)
    largest = np.abs(eigs).max(axis=-1)
    smallest = np.abs(eigs).min(axis=-1)
    if np.any(smallest <= DEGENERACY_RATIO * largest):
        raise ChartDomainError(
            f"metric is degenerate at point {_point_str(point)}"
        )
    negatives = np.sum(eigs < 0, axis=-1)
    if np.any(negatives != chart.signature.p):
        raise ChartDomainError(
            f"metric signature at point {_point_str(point)} does not match "
            f"declared {chart.signature}"
        )


def metric_at(chart: Chart, point, check: bool = True):
    """Metric matrix and its inverse at ``point`` (batched over leading axes).

    With ``check`` enabled the point must satisfy all guards and the metric
    must be non-degenerate with the declared signature.
    """
    point = np.asarray(point, dtype=float)
    g, _, _ = _metric_jets(chart, point, 0, strict=check)
    if check:
        _validate_point(chart, point, g)
    ginv = np.linalg.inv(g)
    return g, ginv


# ---------------------------------------------------------------------------
# Christoffel symbols and curvature


def _gamma_first(dg: np.ndarray) -> np.ndarray:
    return 0.5 * (
        np.einsum("...jik->...ijk", dg)
        + np.einsum("...ijk->...ijk", dg)
        - np.einsum("...kij->...ijk", dg)
    )


def christoffel_at(chart: Chart, point, check: bool = True):
    """Christoffel symbols of the first and second kind.

    Returns ``(gamma_first, gamma_second)`` with ``gamma_first[..., i, j, k]``
    = Gamma_{ijk} and ``gamma_second[..., k, i, j]`` = Gamma^k_{ij}.
    """
    point = np.asarray(point, dtype=float)
    g, dg, _ = _metric_jets(chart, point, 1, strict=check)
    if check:
        _validate_point(chart, point, g)
    ginv = np.linalg.inv(g)
    gamma1 = _gamma_first(dg)
    gamma2 = np.einsum("...kl,...ijl->...kij", ginv, gamma1)
    return gamma1, gamma2


@dataclass(frozen=True)
class CurvatureData:
    """Everything the engine derives from the metric at one point (or a
    batch of points, in which case all arrays carry leading batch axes)."""

    point: np.ndarray
    metric: np.ndarray
    metric_inverse: np.ndarray
    gamma_first: np.ndarray
    gamma_second: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray

    def to_json(self) -> dict:
        def listify(a):
            return np.asarray(a).tolist()

        return {
            "point": listify(self.point),
            "metric": listify(self.metric),
            "metric_inverse": listify(self.metric_inverse),
            "gamma_first": listify(self.gamma_first),
            "gamma_second": listify(self.gamma_second),
            "riemann": listify(self.riemann),
            "ricci": listify(self.ricci),
            "scalar": listify(self.scalar),
        }


def curvature_at(chart: Chart, point, check: bool = True) -> CurvatureData:
    """Full curvature data at ``point``; exact metric derivatives via jets."""
    point = np.asarray(point, dtype=float)
    g, dg, d2g = _metric_jets(chart, point, 2, strict=check)
    if check:
        _validate_point(chart, point, g)
    ginv = np.linalg.inv(g)
    gamma1 = _gamma_first(dg)
    gamma2 = np.einsum("...kl,...ijl->...kij", ginv, gamma1)

    dginv = -np.einsum("...ka,...mab,...bl->...mkl", ginv, dg, ginv)
    dgamma1 = 0.5 * (
        np.einsum("...mjil->...mijl", d2g)
        + np.einsum("...mijl->...mijl", d2g)
        - np.einsum("...mlij->...mijl", d2g)
    )
    dgamma2 = np.einsum("...mkl,...ijl->...mkij", dginv, gamma1) + np.einsum(
        "...kl,...mijl->...mkij", ginv, dgamma1
    )

    rmix = (
        np.einsum("...iljk->...lijk", dgamma2)
        - np.einsum("...jlik->...lijk", dgamma2)
        + np.einsum("...lim,...mjk->...lijk", gamma2, gamma2)
        - np.einsum("...ljm,...mik->...lijk", gamma2, gamma2)
    )
    riemann = np.einsum("...mijk,...ml->...ijkl", rmix, g)
    ricci = np.einsum("...il,...ijkl->...jk", ginv, riemann)
    scalar = np.einsum("...jk,...jk->...", ginv, ricci)
    return CurvatureData(
        point=point,
        metric=g,
        metric_inverse=ginv,
        gamma_first=gamma1,
        gamma_second=gamma2,
        riemann=riemann,
        ricci=ricci,
        scalar=scalar,
    )


def model_at(chart: Chart, point, check: bool = True) -> ZeroModel:
    """Freeze the chart at one point into an algebraic model (inner product
    = metric, tensor = Riemann curvature)."""
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise ChartError("model_at expects a single point")
    data = curvature_at(chart, point, check=check)
    return ZeroModel(data.metric, data.riemann)


def curvature_range_rank(chart: Chart, point, tol: float = 1e-9) -> int:
    """Dimension of the joint range of all curvature operators at a point.

    Stacks the basis operators A(d_i, d_j) and counts singular values above
    ``tol`` times the largest.  Zero for flat points.
    """
    model = model_at(chart, point)
    ops, _ = basis_operators(model)
    if not len(ops):
        return 0
    stacked = np.concatenate(list(ops), axis=1)
    svals = np.linalg.svd(stacked, compute_uv=False)
    if svals.size == 0 or svals[0] <= 0.0:
        return 0
    return int(np.sum(svals > tol * svals[0]))


# ---------------------------------------------------------------------------
# Hessian of log |scalar curvature|


@dataclass(frozen=True)
class LogScalarHessian:
    """Covariant Hessian of log|tau| restricted to a coordinate subspace."""

    matrix: np.ndarray
    determinant: float
    gradient: np.ndarray  # full-dimension coordinate gradient of log|tau|
    subspace: tuple
    scalar_value: float


def _scalar_jet_from_field(field: Expression, point: np.ndarray):
    jet = field.jet2(point)
    return jet.value, jet.grad, jet.hess


def _scalar_jet_fd(chart: Chart, point: np.ndarray, step: float):
    """Gradient/Hessian of the engine scalar curvature by central finite
    differences (one batched curvature evaluation for the whole stencil)."""
    n = chart.dim
    offsets = [np.zeros(n)]
    for i in range(n):
        for sign in (+1.0, -1.0):
            e = np.zeros(n)
            e[i] = sign * step
            offsets.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            for si in (+1.0, -1.0):
                for sj in (+1.0, -1.0):
                    e = np.zeros(n)
                    e[i] = si * step
                    e[j] = sj * step
                    offsets.append(e)
    stencil = point[None, :] + np.stack(offsets)
    values = curvature_at(chart, stencil).scalar
    v0 = values[0]
    grad = np.empty(n)
    hess = np.empty((n, n))
    for i in range(n):
        plus, minus = values[1 + 2 * i], values[2 + 2 * i]
        grad[i] = (plus - minus) / (2 * step)
        hess[i, i] = (plus - 2 * v0 + minus) / step**2
    base = 1 + 2 * n
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            pp, pm, mp, mm = values[base + 4 * idx : base + 4 * idx + 4]
            hess[i, j] = hess[j, i] = (pp - pm - mp + mm) / (4 * step**2)
            idx += 1
    return v0, grad, hess


def hessian_log_scalar(
    chart: Chart,
    point,
    subspace: Sequence[int],
    scalar_field: Optional[Expression] = None,
    fd_step: float = 1e-4,
) -> LogScalarHessian:
    """Covariant Hessian of log|tau| restricted to coordinate directions.

    ``H_ij = d_i d_j log|tau| - Gamma^k_ij d_k log|tau|`` for i, j in the
    subspace (0-based coordinate indices), plus its determinant.

    When ``scalar_field`` (a closed form for tau) is supplied, derivatives
    come from exact jets; otherwise tau derivatives fall back to central
    finite differences of the engine scalar curvature (step ``fd_step``,
    accuracy roughly 1e-7 relative -- fine for exploration, too coarse for
    tight invariant checks).
    """
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise ChartError("hessian_log_scalar expects a single point")
    subspace = tuple(int(i) for i in subspace)
    if not subspace or len(set(subspace)) != len(subspace):
        raise ChartError(f"subspace {subspace} must be non-empty without repeats")
    if any(not (0 <= i < chart.dim) for i in subspace):
        raise ChartError(f"subspace {subspace} outside dimension {chart.dim}")

    if scalar_field is not None:
        tau, dtau, d2tau = _scalar_jet_from_field(scalar_field, point)
    else:
        tau, dtau, d2tau = _scalar_jet_fd(chart, point, fd_step)
    tau = float(tau)
    if tau == 0.0 or not np.isfinite(tau):
        raise ChartDomainError(
            f"scalar curvature is {tau} at {_point_str(point)}; "
            "log|tau| is undefined"
        )

    # log|tau| derivatives: l' = tau'/tau, l'' = tau''/tau - outer(l', l')
    grad_log = dtau / tau
    hess_log = d2tau / tau - np.outer(grad_log, grad_log)

    _, gamma2 = christoffel_at(chart, point)
    covariant = hess_log - np.einsum("kij,k->ij", gamma2, grad_log)
    restricted = covariant[np.ix_(subspace, subspace)]
    return LogScalarHessian(
        matrix=restricted,
        determinant=float(np.linalg.det(restricted)),
        gradient=grad_log,
        subspace=subspace,
        scalar_value=tau,
    )
