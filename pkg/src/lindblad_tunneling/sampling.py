"""Randomized admissible configurations for oracle sweeps and property tests."""

from __future__ import annotations

import math

import numpy as np

from .model import (
    DimensionlessConfig,
    ModelParams,
    dimensionless_to_dimensional,
    thermal_coefficients,
)
from .propagator import GaussianState

#: stay this far (relatively) inside open windows when sampling
EDGE = 0.02


def random_dimensionless_config(
    rng: np.random.Generator,
    kind: str = "sub_barrier",
    gamma: float | None = None,
    constraint_satisfying: bool = False,
) -> DimensionlessConfig:
    """Draw a scaled configuration inside the admissible eps window.

    kind="sub_barrier" draws v above the classical-crossing bound (packet
    cannot pass classically; with r <= 1 the mean energy is then negative),
    kind="classical_pass" draws v strictly below it.
    """
    if gamma is None:
        gamma = 0.0 if rng.random() < 0.5 else float(rng.uniform(0.05, 2.0))
    lo, hi = (gamma, math.hypot(1.0, gamma)) if gamma > 0 else (0.0, 1.0)
    span = hi - lo
    eps = float(rng.uniform(lo + EDGE * span, hi - EDGE * span))
    g = gamma + math.hypot(1.0, gamma)
    if kind == "sub_barrier":
        v = float(rng.uniform(-g * (1.0 - EDGE), 0.0))
    elif kind == "classical_pass":
        v = float(rng.uniform(-3.0 * g, -g * (1.0 + EDGE)))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if constraint_satisfying and gamma > 0:
        theta_min = eps / math.sqrt(eps**2 - gamma**2)
        theta = float(theta_min * rng.uniform(1.0 + EDGE, 3.0))
    else:
        theta = float(rng.uniform(1.0, 10.0))
    return DimensionlessConfig(
        z=float(rng.uniform(-9.0, -0.3)),
        v=v,
        eps=eps,
        r=float(rng.uniform(0.1, 1.0)),
        gamma=gamma,
        theta=theta,
    )


def random_barrier_model(
    rng: np.random.Generator,
    regime: str = "escaping",
    minimum_uncertainty: bool = True,
    with_cross_diffusion: bool = False,
) -> tuple[ModelParams, GaussianState]:
    """Draw a dimensional model plus initial state for oracle comparisons.

    regime="escaping" places lam strictly inside (mu, nu); "stuck" places it
    above nu.  Diffusion is Gibbs-form with theta chosen to satisfy the
    positivity bound; with_cross_diffusion adds a d_pq that keeps the bound
    satisfied (exercises the cross terms of the covariance flow).
    """
    m = float(rng.uniform(0.5, 2.0))
    omega = float(rng.uniform(0.5, 2.0))
    hbar = 1.0
    gamma = 0.0 if rng.random() < 0.4 else float(rng.uniform(0.05, 1.5))
    mu = gamma * omega
    nu = math.hypot(omega, mu)
    if regime == "escaping":
        lo, hi = gamma * omega, nu
        lam = float(rng.uniform(lo + EDGE * (hi - lo), hi - EDGE * (hi - lo)))
    elif regime == "stuck":
        lam = float(nu * rng.uniform(1.0 + EDGE, 2.0))
    else:
        raise ValueError(f"unknown regime {regime!r}")
    eps_sq = (lam / omega) ** 2
    theta_min = 1.0 if gamma == 0.0 else math.sqrt(eps_sq / (eps_sq - gamma**2))
    theta = float(theta_min * rng.uniform(1.0 + EDGE, 3.0))
    d_pp, d_qq, d_pq = thermal_coefficients(m, omega, lam, mu, hbar, theta)
    if with_cross_diffusion:
        headroom = d_pp * d_qq - (lam * hbar) ** 2 / 4.0
        d_pq = float(rng.uniform(-0.8, 0.8)) * math.sqrt(max(headroom, 0.0))
    params = ModelParams(
        m=m, omega=omega, lam=lam, mu=mu, hbar=hbar,
        d_qq=d_qq, d_pp=d_pp, d_pq=d_pq,
    )
    if minimum_uncertainty:
        sigma_qq = hbar / (2.0 * m * omega) / float(rng.uniform(0.3, 1.2)) ** 2
        state0 = GaussianState.minimum_uncertainty(
            sigma_q=float(rng.uniform(-6.0, -0.3)) * math.sqrt(sigma_qq),
            sigma_p=float(rng.uniform(-1.5, 1.5)) * m * omega * math.sqrt(sigma_qq),
            sigma_qq=sigma_qq,
            hbar=hbar,
        )
    else:
        sigma_qq = float(rng.uniform(0.2, 3.0))
        sigma_pp = float(rng.uniform(0.2, 3.0))
        rho_max = math.sqrt(max(1.0 - hbar**2 / (4.0 * sigma_qq * sigma_pp), 0.0))
        rho = float(rng.uniform(-0.7, 0.7)) * rho_max
        state0 = GaussianState(
            t=0.0,
            sigma_q=float(rng.uniform(-6.0, -0.3)),
            sigma_p=float(rng.uniform(-2.0, 2.0)),
            sigma_qq=sigma_qq,
            sigma_pp=sigma_pp,
            sigma_pq=rho * math.sqrt(sigma_qq * sigma_pp),
        )
    return params, state0


def config_to_model(
    cfg: DimensionlessConfig,
    m: float = 1.0,
    omega: float = 1.0,
    hbar: float = 1.0,
) -> tuple[ModelParams, GaussianState]:
    """Dimensional realization of a scaled config without window enforcement."""
    return dimensionless_to_dimensional(cfg, m=m, omega=omega, hbar=hbar, check_window=False)
