"""Built-in chart families with closed-form reference data.

Each family builds a :class:`~curvops.chart.Chart` and carries closed-form
tables (Christoffel symbols, curvature components, scalar curvature) that
the generic engine is tested against.  Coordinate orders are part of the
contract:

* ``warped3d``   -- (x1, x2, t), t > 0: product of a line with a surface,
  metric diag(t^2 e^{2a}, t^2 e^{2a}, 1) for a warping function a(x1, x2).
* ``mbeta``      -- (x1, x2, x3, x4), x3 > 0, x4 > 0:
  metric diag(x3^2, (x3 + b x4)^2, 1, 1) for a parameter b > 0.
* ``dunn``       -- (x1 .. xp, y1 .. yp): g(dx_i, dx_j) = psi_ij(x),
  g(dx_i, dy_i) = 1; neutral signature (p, p).
* ``fiedler``    -- (x, u1 .. u_nu, y): g(dx, dx) = -2 f(u),
  g(dx, dy) = 1, g(du_a, du_b) = Xi_ab for a constant symmetric
  invertible Xi.
* ``lorentz_mf`` -- (x, xt, y): g(dx, dx) = -2 f(y), g(dx, dxt) = 1,
  g(dy, dy) = 1; signature (1, 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .chart import Chart, CurvatureData, build_chart
from .expr import Expression, parse
from .model import Signature

__all__ = [
    "FAMILIES",
    "PRESETS",
    "CatalogError",
    "CustomSpec",
    "DunnSpec",
    "FiedlerSpec",
    "LorentzMFSpec",
    "MBetaSpec",
    "Warped3DSpec",
    "build",
    "describe_families",
    "oracle_curvature",
    "scalar_curvature_closed_form",
    "spec_from_config",
]


class CatalogError(ValueError):
    pass


# Warping functions for the 3-dimensional Lorentzian family.  n1m/n2m/n3m
# are geodesically incomplete with Ricci blow-up along a sampled direction;
# n1p/n2p/n3p are complete; s_plus/s_minus are the f(y) = +-y^2/2 pair whose
# exponential maps differ in surjectivity.
PRESETS = {
    "s_plus": "0.5*y^2",
    "s_minus": "-0.5*y^2",
    "n1m": "-exp(-y)",
    "n2m": "-exp(-y)+y",
    "n3m": "-exp(-y)-exp(-2*y)",
    "n1p": "exp(y)",
    "n2p": "exp(y)+y",
    "n3p": "exp(y)+exp(2*y)",
}


def _fill_orbit(tensor: np.ndarray, i: int, j: int, k: int, l: int, value) -> None:
    """Write one curvature component together with its symmetry orbit."""
    tensor[i, j, k, l] = value
    tensor[j, i, k, l] = -value
    tensor[i, j, l, k] = -value
    tensor[j, i, l, k] = value
    tensor[k, l, i, j] = value
    tensor[l, k, i, j] = -value
    tensor[k, l, j, i] = -value
    tensor[l, k, j, i] = value


def _oracle_data(point, g, ginv, gamma1, gamma2, riemann) -> CurvatureData:
    ricci = np.einsum("il,ijkl->jk", ginv, riemann)
    scalar = np.einsum("jk,jk->", ginv, ricci)
    return CurvatureData(
        point=np.asarray(point, dtype=float),
        metric=g,
        metric_inverse=ginv,
        gamma_first=gamma1,
        gamma_second=gamma2,
        riemann=riemann,
        ricci=ricci,
        scalar=scalar,
    )


def _require_vars(expr: Expression, allowed: set, what: str) -> None:
    extra = set(expr.variables()) - allowed
    if extra:
        raise CatalogError(
            f"{what} may only depend on coordinates {sorted(allowed)}, "
            f"but uses {sorted(extra)}"
        )


# ---------------------------------------------------------------------------
# warped3d


@dataclass(frozen=True)
class Warped3DSpec:
    """Warped product of a half-line (coordinate t) over a conformally flat
    surface: metric diag(t^2 e^{2a}, t^2 e^{2a}, 1) with a = alpha(x1, x2)."""

    alpha: str

    family = "warped3d"

    def aliases(self) -> dict:
        return {"t": 2, "x3": 2}

    def alpha_expr(self, dim: int = 3) -> Expression:
        expr = parse(self.alpha, dim)
        _require_vars(expr, {0, 1}, "the warping function")
        return expr

    def build(self) -> Chart:
        self.alpha_expr()
        warp = f"t*t*exp(2*({self.alpha}))"
        chart = build_chart(
            Signature(0, 3),
            [[warp, "0", "0"], ["0", warp, "0"], ["0", "0", "1"]],
            guards=["t"],
            coords=("x1", "x2", "t"),
        )
        return chart

    def surface_chart(self) -> Chart:
        """The 2-dimensional base surface with metric e^{2a}(dx1^2 + dx2^2)."""
        conf = f"exp(2*({self.alpha}))"
        return build_chart(
            Signature(0, 2),
            [[conf, "0"], ["0", conf]],
            coords=("x1", "x2"),
        )

    def oracle_curvature(self, point) -> CurvatureData:
        point = np.asarray(point, dtype=float)
        x1, x2, t = point
        jet = self.alpha_expr().jet2(point)
        a1, a2 = jet.grad[0], jet.grad[1]
        lap = jet.hess[0, 0] + jet.hess[1, 1]
        conf = np.exp(2.0 * jet.value)  # e^{2a}
        warp = t * t * conf

        g = np.diag([warp, warp, 1.0])
        ginv = np.diag([1.0 / warp, 1.0 / warp, 1.0])

        gamma1 = np.zeros((3, 3, 3))
        gamma1[0, 0, 0] = a1 * warp
        gamma1[0, 0, 1] = -a2 * warp
        gamma1[0, 0, 2] = -t * conf
        gamma1[0, 1, 0] = gamma1[1, 0, 0] = a2 * warp
        gamma1[0, 1, 1] = gamma1[1, 0, 1] = a1 * warp
        gamma1[0, 2, 0] = gamma1[2, 0, 0] = t * conf
        gamma1[1, 1, 0] = -a1 * warp
        gamma1[1, 1, 1] = a2 * warp
        gamma1[1, 1, 2] = -t * conf
        gamma1[1, 2, 1] = gamma1[2, 1, 1] = t * conf

        gamma2 = np.zeros((3, 3, 3))  # [k, i, j]
        gamma2[0, 0, 0] = a1
        gamma2[1, 0, 0] = -a2
        gamma2[2, 0, 0] = -t * conf
        gamma2[0, 0, 1] = gamma2[0, 1, 0] = a2
        gamma2[1, 0, 1] = gamma2[1, 1, 0] = a1
        gamma2[0, 0, 2] = gamma2[0, 2, 0] = 1.0 / t
        gamma2[0, 1, 1] = -a1
        gamma2[1, 1, 1] = a2
        gamma2[2, 1, 1] = -t * conf
        gamma2[1, 1, 2] = gamma2[1, 2, 1] = 1.0 / t

        riemann = np.zeros((3, 3, 3, 3))
        _fill_orbit(riemann, 0, 1, 1, 0, -warp * (lap + conf))
        return _oracle_data(point, g, ginv, gamma1, gamma2, riemann)

    def scalar_closed_form(self, point) -> float:
        point = np.asarray(point, dtype=float)
        t = point[2]
        return float((self.surface_scalar(point[:2]) - 2.0) / t**2)

    def surface_scalar(self, point2) -> float:
        """Scalar curvature of the base surface: -2 e^{-2a} (a_11 + a_22)."""
        jet = self.alpha_expr(dim=2).jet2(np.asarray(point2, dtype=float))
        lap = jet.hess[0, 0] + jet.hess[1, 1]
        return float(-2.0 * np.exp(-2.0 * jet.value) * lap)

    def scalar_expression(self) -> Optional[Expression]:
        return None

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        x = rng.uniform(-1.5, 1.5, size=2)
        t = rng.uniform(0.3, 3.0)
        return np.array([x[0], x[1], t])

    def to_config(self) -> dict:
        return {"family": self.family, "alpha": self.alpha}

    def describe(self) -> str:
        return (
            "warped3d: coordinates (x1, x2, t), t > 0, signature (0,3); "
            "metric diag(t^2 e^{2a}, t^2 e^{2a}, 1) for a = alpha(x1, x2)"
        )


# ---------------------------------------------------------------------------
# mbeta


@dataclass(frozen=True)
class MBetaSpec:
    """Riemannian 4-manifold diag(x3^2, (x3 + beta*x4)^2, 1, 1) on the
    quadrant x3 > 0, x4 > 0; scalar curvature -2 / (x3 (x3 + beta x4))."""

    beta: float

    family = "mbeta"

    def __post_init__(self):
        if not (self.beta > 0):
            raise CatalogError(f"beta must be positive, got {self.beta}")

    def aliases(self) -> dict:
        return {}

    def build(self) -> Chart:
        b = repr(float(self.beta))
        return build_chart(
            Signature(0, 4),
            [
                ["x3*x3", "0", "0", "0"],
                ["0", f"(x3+{b}*x4)^2", "0", "0"],
                ["0", "0", "1", "0"],
                ["0", "0", "0", "1"],
            ],
            guards=["x3", "x4"],
            coords=("x1", "x2", "x3", "x4"),
        )

    def oracle_curvature(self, point) -> CurvatureData:
        point = np.asarray(point, dtype=float)
        b = float(self.beta)
        x3, x4 = point[2], point[3]
        u = x3 + b * x4

        g = np.diag([x3 * x3, u * u, 1.0, 1.0])
        ginv = np.diag([1.0 / (x3 * x3), 1.0 / (u * u), 1.0, 1.0])

        gamma1 = np.zeros((4, 4, 4))
        gamma1[0, 0, 2] = -x3
        gamma1[0, 2, 0] = gamma1[2, 0, 0] = x3
        gamma1[1, 1, 2] = -u
        gamma1[1, 2, 1] = gamma1[2, 1, 1] = u
        gamma1[1, 1, 3] = -b * u
        gamma1[1, 3, 1] = gamma1[3, 1, 1] = b * u

        gamma2 = np.zeros((4, 4, 4))
        gamma2[2, 0, 0] = -x3
        gamma2[0, 0, 2] = gamma2[0, 2, 0] = 1.0 / x3
        gamma2[2, 1, 1] = -u
        gamma2[3, 1, 1] = -b * u
        gamma2[1, 1, 2] = gamma2[1, 2, 1] = 1.0 / u
        gamma2[1, 1, 3] = gamma2[1, 3, 1] = b / u

        riemann = np.zeros((4, 4, 4, 4))
        _fill_orbit(riemann, 0, 1, 1, 0, -x3 * u)
        return _oracle_data(point, g, ginv, gamma1, gamma2, riemann)

    def scalar_closed_form(self, point) -> float:
        point = np.asarray(point, dtype=float)
        b = float(self.beta)
        return float(-2.0 / (point[2] * (point[2] + b * point[3])))

    def scalar_expression(self) -> Expression:
        b = repr(float(self.beta))
        return parse(f"-2/(x3*(x3+{b}*x4))", 4)

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        x12 = rng.uniform(-2.0, 2.0, size=2)
        x34 = rng.uniform(0.2, 3.0, size=2)
        return np.concatenate([x12, x34])

    def to_config(self) -> dict:
        return {"family": self.family, "beta": float(self.beta)}

    def describe(self) -> str:
        return (
            "mbeta: coordinates (x1, x2, x3, x4), x3 > 0, x4 > 0, signature "
            "(0,4); metric diag(x3^2, (x3 + beta*x4)^2, 1, 1), parameter beta > 0"
        )


# ---------------------------------------------------------------------------
# dunn


@dataclass(frozen=True)
class DunnSpec:
    """Neutral-signature manifold of dimension 2p: g(dx_i, dx_j) = psi_ij(x)
    and g(dx_i, dy_i) = 1.  Curvature operators are nilpotent of order 2."""

    p: int
    psi: tuple  # p x p grid of expression sources; upper triangle is read

    family = "dunn"

    def __post_init__(self):
        if self.p < 1:
            raise CatalogError(f"p must be at least 1, got {self.p}")
        if len(self.psi) != self.p or any(len(row) != self.p for row in self.psi):
            raise CatalogError(f"psi must be a {self.p}x{self.p} grid of sources")
        for i in range(self.p):
            for j in range(i, self.p):
                self.psi_expr(i, j)  # parses and checks x-only dependence

    @property
    def dim(self) -> int:
        return 2 * self.p

    def aliases(self) -> dict:
        return {f"y{i + 1}": self.p + i for i in range(self.p)}

    def psi_expr(self, i: int, j: int) -> Expression:
        if i > j:
            i, j = j, i
        expr = parse(str(self.psi[i][j]), self.dim, self.aliases())
        _require_vars(expr, set(range(self.p)), "psi components")
        return expr

    def build(self) -> Chart:
        n = self.dim
        p = self.p
        components = [["0"] * n for _ in range(n)]
        for i in range(p):
            for j in range(i, p):
                components[i][j] = str(self.psi[i][j])
                self.psi_expr(i, j)  # validates x-only dependence
            components[i][p + i] = "1"
        coords = tuple(f"x{i + 1}" for i in range(p)) + tuple(
            f"y{i + 1}" for i in range(p)
        )
        return build_chart(Signature(p, p), components, coords=coords)

    def _psi_jets(self, point: np.ndarray):
        p = self.p
        value = np.zeros((p, p))
        grad = np.zeros((p, p, self.dim))
        hess = np.zeros((p, p, self.dim, self.dim))
        for i in range(p):
            for j in range(i, p):
                jet = self.psi_expr(i, j).jet2(point)
                value[i, j] = value[j, i] = jet.value
                grad[i, j] = grad[j, i] = jet.grad
                hess[i, j] = hess[j, i] = jet.hess
        return value, grad, hess

    def oracle_curvature(self, point) -> CurvatureData:
        point = np.asarray(point, dtype=float)
        p, n = self.p, self.dim
        psi, dpsi, d2psi = self._psi_jets(point)

        g = np.zeros((n, n))
        g[:p, :p] = psi
        g[:p, p:] = np.eye(p)
        g[p:, :p] = np.eye(p)
        ginv = np.zeros((n, n))
        ginv[:p, p:] = np.eye(p)
        ginv[p:, :p] = np.eye(p)
        ginv[p:, p:] = -psi

        gamma1 = np.zeros((n, n, n))
        gamma2 = np.zeros((n, n, n))
        for i in range(p):
            for j in range(p):
                for k in range(p):
                    value = 0.5 * (
                        dpsi[i, k][j] + dpsi[j, k][i] - dpsi[i, j][k]
                    )
                    gamma1[i, j, k] = value
                    gamma2[p + k, i, j] = value

        riemann = np.zeros((n, n, n, n))
        for i in range(p):
            for j in range(p):
                for k in range(p):
                    for l in range(p):
                        riemann[i, j, k, l] = -0.5 * (
                            d2psi[i, l][j, k]
                            + d2psi[j, k][i, l]
                            - d2psi[i, k][j, l]
                            - d2psi[j, l][i, k]
                        )
        return _oracle_data(point, g, ginv, gamma1, gamma2, riemann)

    def scalar_closed_form(self, point) -> float:
        return 0.0

    def scalar_expression(self) -> Optional[Expression]:
        return None

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-2.0, 2.0, size=self.dim)

    def to_config(self) -> dict:
        return {
            "family": self.family,
            "p": self.p,
            "psi": [list(row) for row in self.psi],
        }

    def describe(self) -> str:
        return (
            "dunn: coordinates (x1..xp, y1..yp), signature (p,p); "
            "g(dx_i, dx_j) = psi_ij(x), g(dx_i, dy_i) = 1"
        )


# ---------------------------------------------------------------------------
# fiedler


@dataclass(frozen=True)
class FiedlerSpec:
    """Pseudo-Riemannian manifold of dimension nu + 2 over coordinates
    (x, u1 .. u_nu, y): g(dx, dx) = -2 f(u), g(dx, dy) = 1,
    g(du_a, du_b) = Xi_ab.  Curvature operators are nilpotent of order 3."""

    nu: int
    xi: tuple  # nu x nu symmetric invertible constant matrix (rows of floats)
    f: str

    family = "fiedler"

    def __post_init__(self):
        if self.nu < 1:
            raise CatalogError(f"nu must be at least 1, got {self.nu}")
        xi = self.xi_matrix()
        if xi.shape != (self.nu, self.nu):
            raise CatalogError(f"xi must be {self.nu}x{self.nu}")
        if np.abs(xi - xi.T).max() > 0:
            raise CatalogError("xi must be symmetric")
        if abs(np.linalg.det(xi)) < 1e-12:
            raise CatalogError("xi must be invertible")
        self.f_expr()  # parses and checks dependence on the u block only

    @property
    def dim(self) -> int:
        return self.nu + 2

    def xi_matrix(self) -> np.ndarray:
        return np.asarray([[float(v) for v in row] for row in self.xi])

    def aliases(self) -> dict:
        names = {"x": 0, "y": self.nu + 1}
        for a in range(self.nu):
            names[f"u{a + 1}"] = a + 1
        return names

    def f_expr(self) -> Expression:
        expr = parse(self.f, self.dim, self.aliases())
        _require_vars(expr, set(range(1, self.nu + 1)), "f")
        return expr

    def signature(self) -> Signature:
        eigs = np.linalg.eigvalsh(self.xi_matrix())
        r = int(np.sum(eigs < 0))
        s = int(np.sum(eigs > 0))
        return Signature(r + 1, s + 1)

    def build(self) -> Chart:
        self.f_expr()
        n = self.dim
        components = [["0"] * n for _ in range(n)]
        components[0][0] = f"-2*({self.f})"
        components[0][n - 1] = "1"
        xi = self.xi_matrix()
        for a in range(self.nu):
            for b in range(a, self.nu):
                components[1 + a][1 + b] = repr(float(xi[a, b]))
        coords = ("x",) + tuple(f"u{a + 1}" for a in range(self.nu)) + ("y",)
        return build_chart(self.signature(), components, coords=coords)

    def oracle_curvature(self, point) -> CurvatureData:
        point = np.asarray(point, dtype=float)
        n, nu = self.dim, self.nu
        xi = self.xi_matrix()
        xi_inv = np.linalg.inv(xi)
        jet = self.f_expr().jet2(point)
        fval = jet.value
        fgrad = jet.grad[1 : 1 + nu]  # derivatives along u
        fhess = jet.hess[1 : 1 + nu, 1 : 1 + nu]

        g = np.zeros((n, n))
        g[0, 0] = -2.0 * fval
        g[0, n - 1] = g[n - 1, 0] = 1.0
        g[1 : 1 + nu, 1 : 1 + nu] = xi
        ginv = np.zeros((n, n))
        ginv[0, n - 1] = ginv[n - 1, 0] = 1.0
        ginv[n - 1, n - 1] = 2.0 * fval
        ginv[1 : 1 + nu, 1 : 1 + nu] = xi_inv

        gamma1 = np.zeros((n, n, n))
        gamma2 = np.zeros((n, n, n))
        for a in range(nu):
            gamma1[0, 0, 1 + a] = fgrad[a]
            gamma1[0, 1 + a, 0] = gamma1[1 + a, 0, 0] = -fgrad[a]
            gamma2[n - 1, 0, 1 + a] = gamma2[n - 1, 1 + a, 0] = -fgrad[a]
        raised = xi_inv @ fgrad
        for b in range(nu):
            gamma2[1 + b, 0, 0] = raised[b]

        riemann = np.zeros((n, n, n, n))
        for a in range(nu):
            for b in range(nu):
                # overlapping orbits agree because fhess is symmetric
                _fill_orbit(riemann, 0, 1 + a, 1 + b, 0, fhess[a, b])
        return _oracle_data(point, g, ginv, gamma1, gamma2, riemann)

    def scalar_closed_form(self, point) -> float:
        return 0.0

    def scalar_expression(self) -> Optional[Expression]:
        return None

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-2.0, 2.0, size=self.dim)

    def to_config(self) -> dict:
        return {
            "family": self.family,
            "nu": self.nu,
            "xi": [[float(v) for v in row] for row in self.xi],
            "f": self.f,
        }

    def describe(self) -> str:
        return (
            "fiedler: coordinates (x, u1..u_nu, y), signature (r+1, s+1); "
            "g(dx,dx) = -2 f(u), g(dx,dy) = 1, g(du_a,du_b) = Xi_ab"
        )


# ---------------------------------------------------------------------------
# lorentz_mf


@dataclass(frozen=True)
class LorentzMFSpec:
    """Lorentzian 3-manifold over (x, xt, y): g(dx, dx) = -2 f(y),
    g(dx, dxt) = 1, g(dy, dy) = 1.  ``preset`` names select the bundled
    warping functions (see PRESETS)."""

    f: str
    preset: Optional[str] = None

    family = "lorentz_mf"

    @classmethod
    def from_preset(cls, name: str) -> "LorentzMFSpec":
        if name not in PRESETS:
            raise CatalogError(
                f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
            )
        return cls(f=PRESETS[name], preset=name)

    def aliases(self) -> dict:
        return {"x": 0, "xt": 1, "y": 2}

    def f_expr(self) -> Expression:
        expr = parse(self.f, 3, self.aliases())
        _require_vars(expr, {2}, "f")
        return expr

    def build(self) -> Chart:
        self.f_expr()
        return build_chart(
            Signature(1, 2),
            [[f"-2*({self.f})", "1", "0"], ["1", "0", "0"], ["0", "0", "1"]],
            coords=("x", "xt", "y"),
        )

    def oracle_curvature(self, point) -> CurvatureData:
        point = np.asarray(point, dtype=float)
        jet = self.f_expr().jet2(point)
        fval = jet.value
        fp = jet.grad[2]
        fpp = jet.hess[2, 2]

        g = np.array([[-2.0 * fval, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        ginv = np.array([[0.0, 1.0, 0.0], [1.0, 2.0 * fval, 0.0], [0.0, 0.0, 1.0]])

        gamma1 = np.zeros((3, 3, 3))
        gamma1[0, 0, 2] = fp
        gamma1[0, 2, 0] = gamma1[2, 0, 0] = -fp
        gamma2 = np.zeros((3, 3, 3))
        gamma2[2, 0, 0] = fp
        gamma2[1, 0, 2] = gamma2[1, 2, 0] = -fp

        riemann = np.zeros((3, 3, 3, 3))
        _fill_orbit(riemann, 0, 2, 2, 0, fpp)
        return _oracle_data(point, g, ginv, gamma1, gamma2, riemann)

    def scalar_closed_form(self, point) -> float:
        return 0.0

    def scalar_expression(self) -> Optional[Expression]:
        return None

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-2.0, 2.0, size=3)

    def to_config(self) -> dict:
        config = {"family": self.family, "f": self.f}
        if self.preset:
            config["preset"] = self.preset
        return config

    def describe(self) -> str:
        return (
            "lorentz_mf: coordinates (x, xt, y), signature (1,2); metric "
            "[[-2 f(y), 1, 0], [1, 0, 0], [0, 0, 1]]; presets: "
            + ", ".join(sorted(PRESETS))
        )


# ---------------------------------------------------------------------------
# custom charts (raw components; no oracle)


@dataclass(frozen=True)
class CustomSpec:
    """Raw chart defined by explicit component sources."""

    signature: tuple
    components: tuple
    guards: tuple = ()
    coords: Optional[tuple] = None

    family = "custom"

    def build(self) -> Chart:
        return build_chart(
            Signature(*self.signature),
            [list(row) for row in self.components],
            guards=list(self.guards),
            coords=self.coords,
        )

    def oracle_curvature(self, point):
        raise CatalogError("custom charts have no closed-form reference data")

    def scalar_closed_form(self, point):
        raise CatalogError("custom charts have no closed-form reference data")

    def scalar_expression(self) -> Optional[Expression]:
        return None

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        raise CatalogError("custom charts have no bundled sample box")

    def to_config(self) -> dict:
        config = {
            "family": self.family,
            "signature": list(self.signature),
            "components": [list(row) for row in self.components],
        }
        if self.guards:
            config["guards"] = list(self.guards)
        if self.coords:
            config["coords"] = list(self.coords)
        return config

    def describe(self) -> str:
        return "custom: raw metric components supplied by the user"


FAMILIES = {
    "warped3d": Warped3DSpec,
    "mbeta": MBetaSpec,
    "dunn": DunnSpec,
    "fiedler": FiedlerSpec,
    "lorentz_mf": LorentzMFSpec,
    "custom": CustomSpec,
}


def build(spec) -> Chart:
    """Build the chart of a family spec."""
    return spec.build()


def oracle_curvature(spec, point) -> CurvatureData:
    """Closed-form curvature data (reference tables, not the engine)."""
    return spec.oracle_curvature(point)


def scalar_curvature_closed_form(spec, point) -> float:
    """Closed-form scalar curvature of a family at a point."""
    return spec.scalar_closed_form(point)


def describe_families() -> list:
    """One description line per family (CLI `catalog list`)."""
    lines = []
    for name in ("warped3d", "mbeta", "dunn", "fiedler", "lorentz_mf", "custom"):
        cls = FAMILIES[name]
        if name == "warped3d":
            sample = cls(alpha="0")
        elif name == "mbeta":
            sample = cls(beta=1.0)
        elif name == "dunn":
            sample = cls(p=2, psi=(("0", "0"), ("0", "0")))
        elif name == "fiedler":
            sample = cls(nu=2, xi=((1.0, 0.0), (0.0, 1.0)), f="0")
        elif name == "lorentz_mf":
            sample = cls(f="0")
        else:
            sample = cls(signature=(0, 1), components=(("1",),))
        lines.append(sample.describe())
    return lines


def spec_from_config(config: dict):
    """Build a family spec from a configuration mapping (strict keys)."""
    if "family" not in config:
        raise CatalogError("chart configuration needs a 'family' key")
    family = config["family"]
    if family not in FAMILIES:
        raise CatalogError(
            f"unknown family {family!r}; available: {', '.join(sorted(FAMILIES))}"
        )
    body = {k: v for k, v in config.items() if k != "family"}

    def expect_keys(required: set, optional: set = frozenset()):
        keys = set(body)
        missing = required - keys
        unknown = keys - required - optional
        if missing:
            raise CatalogError(f"{family}: missing configuration keys {sorted(missing)}")
        if unknown:
            raise CatalogError(f"{family}: unknown configuration keys {sorted(unknown)}")

    if family == "warped3d":
        expect_keys({"alpha"})
        return Warped3DSpec(alpha=str(body["alpha"]))
    if family == "mbeta":
        expect_keys({"beta"})
        return MBetaSpec(beta=float(body["beta"]))
    if family == "dunn":
        expect_keys({"p", "psi"})
        psi = tuple(tuple(str(v) for v in row) for row in body["psi"])
        return DunnSpec(p=int(body["p"]), psi=psi)
    if family == "fiedler":
        expect_keys({"nu", "xi", "f"})
        xi = tuple(tuple(float(v) for v in row) for row in body["xi"])
        return FiedlerSpec(nu=int(body["nu"]), xi=xi, f=str(body["f"]))
    if family == "lorentz_mf":
        expect_keys(set(), {"f", "preset"})
        if "preset" in body:
            if "f" in body:
                raise CatalogError("lorentz_mf: give either 'preset' or 'f', not both")
            return LorentzMFSpec.from_preset(str(body["preset"]))
        if "f" not in body:
            raise CatalogError("lorentz_mf: needs 'preset' or 'f'")
        return LorentzMFSpec(f=str(body["f"]))
    expect_keys({"signature", "components"}, {"guards", "coords"})
    return CustomSpec(
        signature=tuple(int(v) for v in body["signature"]),
        components=tuple(tuple(str(v) for v in row) for row in body["components"]),
        guards=tuple(str(v) for v in body.get("guards", ())),
        coords=tuple(str(v) for v in body["coords"]) if "coords" in body else None,
    )
