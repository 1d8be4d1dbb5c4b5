"""Low Neumann and Steklov eigenvalues of planar simply-connected domains.

Spectral Galerkin solvers on conformal pullbacks to the unit disk, P1 finite
elements on polygons, and the measure machinery (Hersch renormalisation,
hyperbolic-cap folding, moments of inertia) behind the isoperimetric bounds.
"""

from .bessel import MU1_DISK, ZETA
from .geometry import ConformalMap, DiscreteMeasure, DiskQuadrature, polymap
from .hersch import PSI_BESSEL, PSI_ID, renormalize
from .folding import fold, rearranged
from .inertia import find_multiple_cap, inertia_form
from .moebius import DiskAutomorphism, HyperbolicCap, d
from .spectral import neumann_spectrum, steklov_spectrum
from .mesh import TriMesh, generate_mesh
from .fem import solve_neumann_fem, solve_steklov_fem

__version__ = "0.1.0"

__all__ = [
    "MU1_DISK", "ZETA", "ConformalMap", "DiscreteMeasure", "DiskQuadrature", "polymap",
    "PSI_BESSEL", "PSI_ID", "renormalize", "fold", "rearranged", "find_multiple_cap",
    "inertia_form", "DiskAutomorphism", "HyperbolicCap", "d", "neumann_spectrum",
    "steklov_spectrum", "TriMesh", "generate_mesh", "solve_neumann_fem", "solve_steklov_fem",
]
