"""
Block-tridiagonal Cholesky factorisation of the global scaled covariance Ψ̃.

Units lie on a line and only adjacent units share a drift correlation, so Ψ̃ is block
tridiagonal: per-unit diagonal blocks and rank-one blocks between neighbours.
"""

from typing import List, Optional, Sequence

import numpy as np

from degradation_lab.errors import CovarianceError
from degradation_lab.kernels.cholesky import cholesky_factor, whiten


class BlockTridiagonalFactor:
    """Lower block-bidiagonal Cholesky factor of a block-tridiagonal SPD matrix."""

    def __init__(
        self, diagonal: Sequence[np.ndarray], off_diagonal: Sequence[Optional[np.ndarray]]
    ):
        if len(off_diagonal) != max(len(diagonal) - 1, 0):
            raise ValueError("need one off-diagonal block between consecutive diagonal blocks")
        self.sizes = [block.shape[0] for block in diagonal]
        self.lower: List[Optional[np.ndarray]] = [None]
        self.diagonal: List[np.ndarray] = []
        offset = 0
        for k, block in enumerate(diagonal):
            schur = np.asarray(block, dtype=float)
            if k > 0 and off_diagonal[k - 1] is not None:
                coupling = whiten(self.diagonal[k - 1], off_diagonal[k - 1]).T
                schur = schur - coupling @ coupling.T
                self.lower.append(coupling)
            elif k > 0:
                self.lower.append(None)
            try:
                self.diagonal.append(cholesky_factor(schur))
            except CovarianceError as e:
                raise CovarianceError(e.minor + offset) from e
            offset += block.shape[0]

    @property
    def logdet(self) -> float:
        return float(sum(2.0 * np.sum(np.log(np.diag(f))) for f in self.diagonal))

    def whiten(self, v: np.ndarray) -> np.ndarray:
        """Returns L⁻¹v for the stacked vector (or matrix of columns) ``v``."""
        v = np.asarray(v, dtype=float)
        out = np.empty_like(v)
        start = 0
        previous = None
        for k, size in enumerate(self.sizes):
            part = v[start : start + size]
            coupling = self.lower[k]
            if coupling is not None and previous is not None:
                part = part - coupling @ previous
            previous = whiten(self.diagonal[k], part)
            out[start : start + size] = previous
            start += size
        return out
