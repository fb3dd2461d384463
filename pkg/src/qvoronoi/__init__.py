"""Voronoi diagrams of pure quantum states and one-qubit Holevo capacity.

Submodules: ``qdm`` (matrix algebra and divergence), ``bloch``
(parameterizations and sampling), ``section`` (closed forms on the d >= 3
section), ``voronoi`` (cells, comparison, boundaries), ``seb`` (enclosing
ball), ``capacity`` (qubit channels), ``verify`` (acceptance checks).
"""

__version__ = "0.1.0"

from .bloch import (
    GeneralizedBloch,
    bloch_to_density,
    density_to_xi,
    is_pure,
    sample_sphere,
    shrink_to_radius,
    xi_to_density,
)
from .capacity import CapacityEstimate, QubitChannel, apply_channel, holevo_capacity_estimate
from .kernels import BACKEND
from .qdm import (
    DensityMatrix,
    Tolerances,
    coordinate_distance_sq,
    divergence,
    hermitian_eig,
    matrix_log,
    validate_density,
)
from .seb import SEBConfig, SEBResult, brute_force_center, smallest_enclosing_ball
from .voronoi import (
    CoordinateEuclidean,
    DivergenceLimit,
    Geodesic,
    HilbertSchmidt,
    assign_cells,
    compare_diagrams,
    extract_boundary,
)
