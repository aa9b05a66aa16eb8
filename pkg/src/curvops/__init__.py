"""Numerical pseudo-Riemannian curvature toolkit.

Core pieces:

* :mod:`curvops.expr` -- infix expressions for metric components with exact
  first/second derivatives via forward-mode jets.
* :mod:`curvops.model` -- pointwise curvature algebra: symmetry checks,
  skew-symmetric curvature operators, commutativity and nilpotency tests,
  and the two-plane block decomposition for commuting Riemannian models.
* :mod:`curvops.chart` -- coordinate charts: metric, Christoffel symbols,
  Riemann/Ricci/scalar curvature, curvature range rank, log-scalar Hessians.
* :mod:`curvops.catalog` -- built-in chart families with closed-form
  reference tables used to validate the generic engine.
* :mod:`curvops.geodesics` -- adaptive geodesic integration with event
  detection, completeness/blow-up probes, and exponential-map sampling.
* :mod:`curvops.cli` -- command-line front end.
"""

__version__ = "0.1.0"

from .expr import Expression, Jet2, parse  # noqa: F401
from .model import (  # noqa: F401
    BlockDecomposition,
    Signature,
    SkewOperator,
    ZeroModel,
    check_symmetries,
    curvature_operator,
    decompose,
    is_skew_tsankov,
    nilpotency_order,
)
from .chart import (  # noqa: F401
    Chart,
    CurvatureData,
    christoffel_at,
    curvature_at,
    curvature_range_rank,
    hessian_log_scalar,
    metric_at,
    model_at,
)
from .catalog import FAMILIES, build, oracle_curvature, scalar_curvature_closed_form  # noqa: F401
from .geodesics import (  # noqa: F401
    GeodesicTrajectory,
    IntegrationOptions,
    blowup_probe,
    completeness_probe,
    exp_coverage,
    exp_map,
    geodesic_rhs,
    integrate,
)
