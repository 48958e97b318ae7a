"""
Define the parameter schemas of the degradation model.
"""

import math
from typing import Optional

from pydantic import BaseModel, root_validator, validator

RHO_MARGIN = 1e-3
STRUCTURAL_NAMES = ("alpha", "kappa", "gamma1", "gamma2", "rho")


class ModelParams(BaseModel):
    """The full parameter vector θ = (α, μₐ, τₐ², κ, γ₁, γ₂, ρ).

    When ``tau_a2`` is zero the model is the fixed-effects special case: κ = σ/τₐ is undefined,
    so the diffusion coefficient is carried by ``sigma_fixed`` instead.
    """

    alpha: float
    mu_a: float
    tau_a2: float
    kappa: float = 1.0
    gamma1: float = 0.0
    gamma2: float = 0.0
    rho: float = 0.0
    sigma_fixed: Optional[float] = None

    class Config:
        allow_mutation = False

    @validator("alpha", "kappa")
    def validate_positive(cls, v, field):
        if not v > 0 or not math.isfinite(v):
            raise ValueError(f"{field.name} must be positive and finite")
        return v

    @validator("tau_a2")
    def validate_tau_a2(cls, v):
        if not v >= 0 or not math.isfinite(v):
            raise ValueError("tau_a2 must be nonnegative and finite")
        return v

    @validator("rho")
    def validate_rho(cls, v):
        if not -1.0 < v < 1.0:
            raise ValueError("rho must lie in (-1, 1)")
        return v

    @validator("sigma_fixed")
    def validate_sigma_fixed(cls, v):
        if v is not None and (v < 0 or not math.isfinite(v)):
            raise ValueError("sigma_fixed must be nonnegative and finite")
        return v

    @root_validator(skip_on_failure=True)
    def validate_sigma(cls, values):
        if values["tau_a2"] > 0 and values.get("sigma_fixed") is not None:
            raise ValueError("sigma_fixed is only meaningful when tau_a2 == 0")
        return values

    @classmethod
    def from_sigma(cls, tau_a: float, sigma: float, **kwargs) -> "ModelParams":
        """Build parameters from the drift deviation τₐ and diffusion σ (κ = σ/τₐ)."""
        if tau_a == 0:
            return cls(tau_a2=0.0, sigma_fixed=sigma, **kwargs)
        return cls(tau_a2=tau_a**2, kappa=sigma / tau_a, **kwargs)

    @property
    def fixed_effects(self) -> bool:
        return self.tau_a2 == 0

    @property
    def sigma(self) -> float:
        """Diffusion coefficient σ = κ·τₐ (or ``sigma_fixed`` in the fixed-effects case)."""
        if self.fixed_effects:
            return self.sigma_fixed or 0.0
        return self.kappa * math.sqrt(self.tau_a2)

    @property
    def structural(self) -> "StructuralParams":
        return StructuralParams(
            alpha=self.alpha,
            kappa=self.kappa,
            gamma1=self.gamma1,
            gamma2=self.gamma2,
            rho=min(max(self.rho, -1 + RHO_MARGIN), 1 - RHO_MARGIN),
        )


class StructuralParams(BaseModel):
    """The structural parameters θ₁ = (α, κ, γ₁, γ₂, ρ) searched numerically."""

    alpha: float
    kappa: float
    gamma1: float
    gamma2: float
    rho: float

    class Config:
        allow_mutation = False

    @validator("alpha", "kappa")
    def validate_positive(cls, v, field):
        if not v > 0 or not math.isfinite(v):
            raise ValueError(f"{field.name} must be positive and finite")
        return v

    @validator("rho")
    def validate_rho(cls, v):
        if not -1 + RHO_MARGIN <= v <= 1 - RHO_MARGIN:
            raise ValueError(f"rho must lie in [{-1 + RHO_MARGIN}, {1 - RHO_MARGIN}]")
        return v

    def with_scale(self, mu_a: float, tau_a2: float) -> ModelParams:
        """Complete θ₁ with concentrated (μₐ, τₐ²)."""
        if tau_a2 == 0:
            return ModelParams(
                alpha=self.alpha,
                mu_a=mu_a,
                tau_a2=0.0,
                kappa=self.kappa,
                gamma1=self.gamma1,
                gamma2=self.gamma2,
                rho=self.rho,
                sigma_fixed=0.0,
            )
        return ModelParams(mu_a=mu_a, tau_a2=tau_a2, **self.dict())
