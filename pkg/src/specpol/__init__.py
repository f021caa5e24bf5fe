"""specpol: numerical ranges, essential-range estimates, and spectral pollution."""

from .linalg import ComplexMatrix, EigenDecomposition, UnitVector, compress, general_eig, hermitian_eig, rayleigh
from .numrange import ConvexRegion, SupportFunction, attain, contains, hausdorff_clipped, hull, nr_boundary, region_from_support

__version__ = "0.1.0"

__all__ = [
    "ComplexMatrix",
    "EigenDecomposition",
    "UnitVector",
    "compress",
    "general_eig",
    "hermitian_eig",
    "rayleigh",
    "ConvexRegion",
    "SupportFunction",
    "attain",
    "contains",
    "hausdorff_clipped",
    "hull",
    "nr_boundary",
    "region_from_support",
    "__version__",
]
