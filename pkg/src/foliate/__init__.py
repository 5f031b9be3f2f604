"""Exact symbolic calculus for foliations and equivariant cohomology on tori."""

from .bundle import (
    Bundle,
    Connection,
    basic_connection_solve,
    check_basic_connection,
    check_connection,
    curvature,
    metric_from_connection,
    reduce_connection,
    transgression_form,
)
from .cartan import (
    EquivariantBundleData,
    EquivForm,
    chern_character,
    chern_weil,
    equivariant_chern_character,
    equivariant_curvature,
    equivariant_d,
    horizontal_projection,
    moment,
)
from .coeffs import I, QI, Poly
from .exterior import (
    AffineMap,
    Form,
    Mat,
    VectorField,
    bracket,
    exterior_derivative,
    interior_product,
    lie_derivative,
    pullback_affine,
    wedge,
)
from .foliation import (
    Foliation,
    TransverseMetric,
    basic_cohomology_dims,
    bott_derivative,
    check_involutive,
    check_transverse_metric,
    closure_rank,
    is_basic_form,
)
from .groupoid import (
    HaarData,
    KroneckerGroupoid,
    closure_description,
    haar_average_connection,
    return_map_orbit,
)
from .parsing import parse_scenario, serialize
from .scalar import Scalar, fiber_mean, is_zero, partial_derivative

__version__ = "0.1.0"
