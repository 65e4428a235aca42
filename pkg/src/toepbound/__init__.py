"""toepbound: power bounds and resolvent conditions for conjugated Toeplitz sections."""

from .symbols import (
    Family,
    FamilyParams,
    KernelVector,
    LaurentSymbol,
    TruncatedOperator,
    analytic_toeplitz_inverse,
    kernel_vector,
    toeplitz_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "Family",
    "FamilyParams",
    "KernelVector",
    "LaurentSymbol",
    "TruncatedOperator",
    "analytic_toeplitz_inverse",
    "kernel_vector",
    "toeplitz_matrix",
    "__version__",
]
