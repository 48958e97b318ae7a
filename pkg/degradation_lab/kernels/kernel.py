"""
Closed forms for the Λ-time Brownian kernel Q̃ = κ²Q with Q^{(l,k)} = min{Λ(t_l), Λ(t_k)}.

With increments d_k = t_k^α − t_{k−1}^α (t₀ = 0), |Q̃| = κ^{2n}∏d_k and Q̃⁻¹ is tridiagonal.
"""

from dataclasses import dataclass, field

import numpy as np

from degradation_lab.errors import KernelError


def _tridiagonal(diagonal: np.ndarray, off: np.ndarray) -> np.ndarray:
    n = diagonal.size
    out = np.zeros((n, n))
    out[np.arange(n), np.arange(n)] = diagonal
    if n > 1:
        out[np.arange(n - 1), np.arange(1, n)] = off
        out[np.arange(1, n), np.arange(n - 1)] = off
    return out


@dataclass(frozen=True)
class KernelMatrix:
    """The kernel of Brownian motion run in Λ-time on a strictly increasing positive grid."""

    times: np.ndarray
    alpha: float
    kappa: float
    increments: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or times.size == 0:
            raise KernelError("kernel needs a nonempty one-dimensional time grid")
        if self.alpha <= 0 or self.kappa <= 0:
            raise KernelError("alpha and kappa must be positive")
        if times[0] <= 0:
            raise KernelError("kernel times must be positive")
        lam = times**self.alpha
        increments = np.diff(lam, prepend=0.0)
        if np.any(increments <= 0):
            raise KernelError("Λ-time increments must be positive")
        object.__setattr__(self, "increments", increments)

    @property
    def size(self) -> int:
        return self.times.size

    @property
    def transformed(self) -> np.ndarray:
        """Λ(t) = t^α on the grid."""
        return self.times**self.alpha

    @property
    def increment_derivatives(self) -> np.ndarray:
        """d_k' = t_k^α ln t_k − t_{k−1}^α ln t_{k−1}, with the t₀ = 0 term equal to 0."""
        g = self.transformed * np.log(self.times)
        return np.diff(g, prepend=0.0)

    def dense(self) -> np.ndarray:
        lam = self.transformed
        return self.kappa**2 * np.minimum.outer(lam, lam)


def kernel_logdet(kernel: KernelMatrix) -> float:
    """ln|Q̃| = 2n·ln κ + Σ ln d_k."""
    return float(2 * kernel.size * np.log(kernel.kappa) + np.sum(np.log(kernel.increments)))


def kernel_logdet_alpha(kernel: KernelMatrix) -> float:
    """∂ln|Q̃|/∂α = Σ d_k'/d_k (the first term reduces to ln t₁)."""
    return float(np.sum(kernel.increment_derivatives / kernel.increments))


def kernel_inverse(kernel: KernelMatrix) -> np.ndarray:
    """Q̃⁻¹, exactly tridiagonal."""
    inv_d = 1.0 / kernel.increments
    diagonal = inv_d.copy()
    diagonal[:-1] += inv_d[1:]
    return _tridiagonal(diagonal, -inv_d[1:]) / kernel.kappa**2


def kernel_inverse_alpha(kernel: KernelMatrix) -> np.ndarray:
    """∂Q̃⁻¹/∂α, obtained entrywise from ∂(1/d_k)/∂α = −d_k'/d_k²."""
    dinv = -kernel.increment_derivatives / kernel.increments**2
    diagonal = dinv.copy()
    diagonal[:-1] += dinv[1:]
    return _tridiagonal(diagonal, -dinv[1:]) / kernel.kappa**2
