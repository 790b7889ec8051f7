"""Four routes to the constants c_alpha: Toeplitz eigenvalues, Green kernels,
boundary value problems and least-squares conditioning."""

from calpha.estimate import ConstantEstimate
from calpha.numcore import LogScalar

__all__ = ["ConstantEstimate", "LogScalar"]
__version__ = "0.1.0"
