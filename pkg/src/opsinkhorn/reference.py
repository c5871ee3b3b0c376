"""Built-in reference instance used by the ``--paper-rho0`` CLI flag.

A fixed 4 x 4 positive definite, trace-one Choi matrix over a 2 (x) 2 block
structure (values printed to four decimals), and the standard perturbation
direction used by the difference-quotient experiment.  Embedding the constant
keeps reference comparisons independent of any random number generator.
"""

from __future__ import annotations

import numpy as np

from .channels import ChoiMatrix

__all__ = ["REFERENCE_N", "REFERENCE_M", "reference_rho0", "reference_direction"]

REFERENCE_N = 2
REFERENCE_M = 2

_RHO0 = np.array(
    [
        [0.2703 + 0.0000j, 0.0136 + 0.1050j, 0.0567 - 0.0746j, 0.1015 - 0.0678j],
        [0.0136 - 0.1050j, 0.3054 + 0.0000j, 0.1197 - 0.0485j, -0.0880 - 0.0650j],
        [0.0567 + 0.0746j, 0.1197 + 0.0485j, 0.2162 + 0.0000j, 0.0938 - 0.0463j],
        [0.1015 + 0.0678j, -0.0880 + 0.0650j, 0.0938 + 0.0463j, 0.2081 + 0.0000j],
    ]
)


def reference_rho0() -> ChoiMatrix:
    """The built-in 4 x 4 input state as a 2 (x) 2 Choi matrix."""
    return ChoiMatrix(n=REFERENCE_N, m=REFERENCE_M, matrix=_RHO0.copy())


def reference_direction() -> np.ndarray:
    """diag(1, -1, -1, 1): Hermitian with both partial traces zero, so
    perturbations along it stay inside both marginal constraint sets."""
    return np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)
