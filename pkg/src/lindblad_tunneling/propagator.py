"""Closed-form moment evolution for the damped inverted parabolic barrier.

First moments obey d/dt (sq, sp) = F (sq, sp) with drift matrix

    F = [[-(lam - mu), 1/m       ],
         [ m*omega^2,  -(lam + mu)]]

so the mean propagator is M(t) = exp(F t).  Writing F = -lam*I + B with
B = [[mu, 1/m], [m*omega^2, -mu]] and noting B^2 = nu^2 I for
nu = sqrt(omega^2 + mu^2),

    M(t) = e^{-lam t} [ cosh(nu t) I + sinh(nu t)/nu * B ].

The covariance matrix S = [[sqq, spq], [spq, spp]] obeys the Lyapunov flow
dS/dt = F S + S F^T + 2 D with D = [[d_qq, d_pq], [d_pq, d_pp]].  With S_inf
the solution of F S_inf + S_inf F^T + 2 D = 0 (the stationary variances,
attracting only when lam > nu), the exact solution is the sandwich

    S(t) = M(t) (S(0) - S_inf) M(t)^T + S_inf.

Expanding the entries gives the hyperbolic component forms; with
E2c = e^{-2 lam t} cosh(2 nu t), E2s = e^{-2 lam t} sinh(2 nu t),
E0 = e^{-2 lam t} and Dab = sab(0) - sab(inf):

  sqq(t) = { Dqq [(mu^2+nu^2) E2c + 2 mu nu E2s + omega^2 E0]
           + Dpp (E2c - E0)/m^2
           + Dpq (2/m) [mu E2c + nu E2s - mu E0] } / (2 nu^2) + sqq_inf

  spp(t) = { Dqq m^2 omega^4 (E2c - E0)
           + Dpp [(mu^2+nu^2) E2c - 2 mu nu E2s + omega^2 E0]
           + Dpq 2 m omega^2 [nu E2s - mu E2c + mu E0] } / (2 nu^2) + spp_inf

  spq(t) = { Dqq m omega^2 [nu E2s + mu E2c - mu E0]
           + Dpp [nu E2s - mu E2c + mu E0] / m
           + Dpq 2 [omega^2 E2c + mu^2 E0] } / (2 nu^2) + spq_inf

The code evaluates the sandwich directly from products of M entries, which
is the same thing term by term.  Hyperbolics are combined with the decay
factor as e^{-lam t} cosh(nu t) = e^{(nu-lam) t} (1 + e^{-2 nu t}) / 2 (and
the sinh analogue) so that long sweeps do not overflow where the physical
moments themselves are representable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousRegime, SingularParameters
from .model import ModelParams

#: relative tolerance below which lam^2 - omega^2 - mu^2 (and lam - nu) are
#: treated as singular; ODE integration covers those points
TOL_SING = 1e-9

#: relative zero test for the separatrix classification of delta
SEPARATRIX_TOL = 1e-12


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of a Gaussian phase-space state at time t."""

    t: float
    sigma_q: float
    sigma_p: float
    sigma_qq: float
    sigma_pp: float
    sigma_pq: float

    def __post_init__(self):
        if not (self.sigma_qq > 0 and self.sigma_pp > 0):
            raise ValueError(
                f"variances must be positive, got sigma_qq={self.sigma_qq}, "
                f"sigma_pp={self.sigma_pp}"
            )
        if self.det_sigma <= 0:
            raise ValueError(
                f"covariance determinant must be positive, got {self.det_sigma}"
            )

    @property
    def det_sigma(self) -> float:
        """sigma_qq*sigma_pp - sigma_pq^2 (squeezed-state purity scale)."""
        return self.sigma_qq * self.sigma_pp - self.sigma_pq**2

    @classmethod
    def minimum_uncertainty(
        cls, sigma_q: float, sigma_p: float, sigma_qq: float, hbar: float = 1.0
    ) -> "GaussianState":
        """Glauber packet: sigma_qq*sigma_pp = hbar^2/4, zero covariance."""
        return cls(
            t=0.0,
            sigma_q=sigma_q,
            sigma_p=sigma_p,
            sigma_qq=sigma_qq,
            sigma_pp=hbar**2 / (4.0 * sigma_qq),
            sigma_pq=0.0,
        )


class Regime(enum.Enum):
    """Asymptotic fate of the packet center relative to the barrier top."""

    CROSSING = "crossing"      # lam < nu, delta > 0: center escapes to +inf
    REFLECTED = "reflected"    # lam < nu, delta < 0: center returns to -inf
    SEPARATRIX = "separatrix"  # lam < nu, delta = 0: center rides to the top
    STUCK = "stuck"            # lam > nu: center relaxes onto the barrier


@dataclass(frozen=True)
class AsymptoticSummary:
    """Late-time constants of the barrier dynamics.

    delta/sqrt(Delta) is the limit of sigma_q(t)/sqrt(sigma_qq(t)) in the
    escaping regime; the stationary variances are attractors only when
    lam > nu.
    """

    nu: float
    delta: float
    Delta: float
    sigma_qq_inf: float
    sigma_pp_inf: float
    sigma_pq_inf: float
    regime: Regime


def _hyperbolic_factors(params: ModelParams, t):
    """Overflow-safe (e^{-lam t} cosh nu t, e^{-lam t} sinh nu t)."""
    nu = params.nu
    t = np.asarray(t, dtype=float)
    grow = np.exp((nu - params.lam) * t)
    damp = np.exp(-2.0 * nu * t)
    return 0.5 * grow * (1.0 + damp), 0.5 * grow * (1.0 - damp)


def mean_propagator(params: ModelParams, t):
    """Entries (m11, m12, m21, m22) of exp(F t); accepts scalar or array t."""
    nu = params.nu
    ecp, esp = _hyperbolic_factors(params, t)
    m11 = ecp + (params.mu / nu) * esp
    m12 = esp / (params.m * nu)
    m21 = params.m * params.omega**2 / nu * esp
    m22 = ecp - (params.mu / nu) * esp
    return m11, m12, m21, m22


def propagate_mean(params: ModelParams, state0: GaussianState, t):
    """Mean position and momentum at time(s) t >= 0.

    sigma_q(t) = e^{-lam t}[(cosh nu t + (mu/nu) sinh nu t) sigma_q(0)
                            + sinh(nu t)/(m nu) sigma_p(0)], and the
    symplectic-partner expression for sigma_p(t).
    """
    _check_times(t)
    m11, m12, m21, m22 = mean_propagator(params, t)
    sq = m11 * state0.sigma_q + m12 * state0.sigma_p
    sp = m21 * state0.sigma_q + m22 * state0.sigma_p
    if np.ndim(t) == 0:
        return float(sq), float(sp)
    return sq, sp


def stationary_covariance(params: ModelParams) -> tuple[float, float, float]:
    """Formal stationary variances (sigma_qq_inf, sigma_pp_inf, sigma_pq_inf).

    These solve F S + S F^T + 2 D = 0 in closed form.  They are genuine
    t -> inf limits only for lam > nu; for lam < nu they are the constant
    offsets of the hyperbolic solution.  Raises SingularParameters when
    lam^2 - omega^2 - mu^2 is within tolerance of zero (or when lam = 0
    with nonzero diffusion); diffusionless models return zeros for any lam.
    """
    m, w, lam, mu = params.m, params.omega, params.lam, params.mu
    d_qq, d_pp, d_pq = params.d_qq, params.d_pp, params.d_pq
    if d_qq == 0.0 and d_pp == 0.0 and d_pq == 0.0:
        return 0.0, 0.0, 0.0
    if lam == 0.0:
        raise SingularParameters(
            "no stationary covariance offset exists for lam = 0 with nonzero diffusion"
        )
    disc = lam**2 - w**2 - mu**2
    if abs(disc) < TOL_SING * w**2:
        raise SingularParameters(
            f"lam^2 - omega^2 - mu^2 = {disc:g} is within tolerance of zero; "
            "fall back to ODE integration of the moment equations"
        )
    sqq = (
        m**2 * (2.0 * lam * (lam + mu) - w**2) * d_qq
        + d_pp
        + 2.0 * m * (lam + mu) * d_pq
    ) / (2.0 * m**2 * lam * disc)
    spp = (
        (m * w) ** 2 * w**2 * d_qq
        + (2.0 * lam * (lam - mu) - w**2) * d_pp
        + 2.0 * m * w**2 * (lam - mu) * d_pq
    ) / (2.0 * lam * disc)
    spq = (
        (lam + mu) * (m * w) ** 2 * d_qq
        + (lam - mu) * d_pp
        + 2.0 * m * (lam**2 - mu**2) * d_pq
    ) / (2.0 * m * lam * disc)
    return sqq, spp, spq


def propagate_covariance(params: ModelParams, state0: GaussianState, t):
    """Covariances (sigma_qq, sigma_pp, sigma_pq) at time(s) t >= 0.

    Evaluates S(t) = M(t)(S(0) - S_inf)M(t)^T + S_inf; the offset
    construction makes the t = 0 identity exact.
    """
    _check_times(t)
    sqq_inf, spp_inf, spq_inf = stationary_covariance(params)
    dqq = state0.sigma_qq - sqq_inf
    dpp = state0.sigma_pp - spp_inf
    dpq = state0.sigma_pq - spq_inf
    m11, m12, m21, m22 = mean_propagator(params, t)
    sqq = m11 * (m11 * dqq + m12 * dpq) + m12 * (m11 * dpq + m12 * dpp) + sqq_inf
    spp = m21 * (m21 * dqq + m22 * dpq) + m22 * (m21 * dpq + m22 * dpp) + spp_inf
    spq = m11 * (m21 * dqq + m22 * dpq) + m12 * (m21 * dpq + m22 * dpp) + spq_inf
    if np.ndim(t) == 0:
        return float(sqq), float(spp), float(spq)
    return sqq, spp, spq


def propagate_state(params: ModelParams, state0: GaussianState, t: float) -> GaussianState:
    """Full Gaussian state at a single time t."""
    sq, sp = propagate_mean(params, state0, t)
    sqq, spp, spq = propagate_covariance(params, state0, t)
    return GaussianState(
        t=state0.t + float(t), sigma_q=sq, sigma_p=sp,
        sigma_qq=sqq, sigma_pp=spp, sigma_pq=spq,
    )


def asymptotics(params: ModelParams, state0: GaussianState) -> AsymptoticSummary:
    """Late-time constants delta, Delta and the regime classification.

    delta = m (mu + nu) sigma_q(0) + sigma_p(0); Delta is the matching
    combination of the covariance offsets,
    Delta = m^2 (mu+nu)^2 Dqq + Dpp + 2 m (mu+nu) Dpq.  For lam < nu,
    sigma_q(t)/sqrt(sigma_qq(t)) -> delta/sqrt(Delta); at lam > nu the
    center relaxes onto the barrier (stuck).  Raises AmbiguousRegime within
    tolerance of lam = nu and propagates SingularParameters from the
    stationary variances.
    """
    nu = params.nu
    if abs(params.lam - nu) < TOL_SING * params.omega:
        raise AmbiguousRegime(
            f"lam={params.lam:g} is within tolerance of nu={nu:g}; "
            "the escaping/stuck classification is undefined there"
        )
    sqq_inf, spp_inf, spq_inf = stationary_covariance(params)
    slope = params.m * (params.mu + nu)
    delta = slope * state0.sigma_q + state0.sigma_p
    Delta = (
        slope**2 * (state0.sigma_qq - sqq_inf)
        + (state0.sigma_pp - spp_inf)
        + 2.0 * slope * (state0.sigma_pq - spq_inf)
    )
    if params.lam > nu:
        regime = Regime.STUCK
    else:
        scale = abs(slope * state0.sigma_q) + abs(state0.sigma_p)
        if abs(delta) <= SEPARATRIX_TOL * scale:
            regime = Regime.SEPARATRIX
        elif delta > 0:
            regime = Regime.CROSSING
        else:
            regime = Regime.REFLECTED
    return AsymptoticSummary(
        nu=nu,
        delta=delta,
        Delta=Delta,
        sigma_qq_inf=sqq_inf,
        sigma_pp_inf=spp_inf,
        sigma_pq_inf=spq_inf,
        regime=regime,
    )


def _check_times(t) -> None:
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
