"""
Rank-one decompositions of the per-unit covariance Σ̃★ = Ξ★Ξ★ᵀ + Q̃★:

    |Σ̃★| = |Q̃★|·B★,    Σ̃★⁻¹ = Q̃★⁻¹ − A★/B★,

with B★ = 1 + Ξ★ᵀQ̃★⁻¹Ξ★ and A★ = Q̃★⁻¹Ξ★Ξ★ᵀQ̃★⁻¹.
"""

from dataclasses import dataclass, field

import numpy as np

from degradation_lab.kernels.kernel import KernelMatrix, kernel_inverse, kernel_logdet


@dataclass(frozen=True)
class RankOneCovariance:
    xi_vector: np.ndarray
    kernel: KernelMatrix
    q_inverse: np.ndarray = field(init=False, repr=False)
    q_inverse_xi: np.ndarray = field(init=False, repr=False)
    B_star: float = field(init=False)

    def __post_init__(self):
        xi = np.asarray(self.xi_vector, dtype=float)
        if xi.shape != (self.kernel.size,):
            raise ValueError("loading vector length must match the kernel size")
        object.__setattr__(self, "xi_vector", xi)
        q_inv = kernel_inverse(self.kernel)
        v = q_inv @ xi
        b = 1.0 + float(xi @ v)
        # 1 plus a positive definite quadratic form
        assert b >= 1.0, f"B★ = {b} < 1"
        object.__setattr__(self, "q_inverse", q_inv)
        object.__setattr__(self, "q_inverse_xi", v)
        object.__setattr__(self, "B_star", b)

    @property
    def A_star(self) -> np.ndarray:
        return np.outer(self.q_inverse_xi, self.q_inverse_xi)

    def dense(self) -> np.ndarray:
        return np.outer(self.xi_vector, self.xi_vector) + self.kernel.dense()


def rank_one_logdet(rc: RankOneCovariance) -> float:
    return kernel_logdet(rc.kernel) + float(np.log(rc.B_star))


def rank_one_inverse(rc: RankOneCovariance) -> np.ndarray:
    return rc.q_inverse - rc.A_star / rc.B_star
