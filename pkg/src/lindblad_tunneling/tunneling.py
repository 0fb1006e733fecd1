"""Barrier penetrability: time-dependent, asymptotic, and scaled closed forms.

The probability mass beyond the barrier top q = 0 is

    P(t) = (1/2) (1 - erf(-sigma_q(t) / sqrt(2 sigma_qq(t))))

which is evaluated throughout as erfc of the argument
x = -sigma_q/sqrt(2 sigma_qq): the complementary form avoids the
cancellation in (1 - erf(x)) that would otherwise destroy the tiny
sub-barrier tails (P ~ 1e-3 .. 1e-9).  As t -> inf the argument tends to
-delta/sqrt(2 Delta) in the escaping regime (lam < nu) and to 0 in the
stuck regime (lam > nu), where P = 1/2 for any initial energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erfc

from . import propagator
from .errors import AmbiguousRegime, NegativeDelta
from .model import DimensionlessConfig, ModelParams
from .propagator import TOL_SING, GaussianState, Regime


@dataclass(frozen=True)
class PenetrabilityResult:
    """A penetration probability with its erf argument and regime.

    value = erfc(argument)/2, so value = 1/2 exactly when argument = 0.
    net_adjusted, when requested, is value - P(0): the initial tail beyond
    the top is ignored by default and subtracted only on demand.
    """

    value: float
    argument: float
    regime: Regime
    net_adjusted: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"probability out of range: {self.value}")


def penetrability_from_moments(sigma_q: float, sigma_qq: float) -> tuple[float, float]:
    """(P, argument) for given mean position and position variance."""
    if sigma_qq <= 0:
        raise ValueError(f"sigma_qq must be positive, got {sigma_qq}")
    argument = -sigma_q / math.sqrt(2.0 * sigma_qq)
    return 0.5 * float(erfc(argument)), argument


def tunneling_probability_at(
    params: ModelParams, state0: GaussianState, t: float, net: bool = False
) -> PenetrabilityResult:
    """P(t) from the closed-form moments, with the regime classification."""
    if t < 0:
        raise ValueError("t must be non-negative")
    summary = propagator.asymptotics(params, state0)
    sq, _ = propagator.propagate_mean(params, state0, t)
    sqq, _, _ = propagator.propagate_covariance(params, state0, t)
    value, argument = penetrability_from_moments(sq, sqq)
    return PenetrabilityResult(
        value=value,
        argument=argument,
        regime=summary.regime,
        net_adjusted=value - _initial_tail(state0) if net else None,
    )


def asymptotic_penetrability(
    params: ModelParams, state0: GaussianState, net: bool = False
) -> PenetrabilityResult:
    """Final penetrability P = lim P(t).

    P = erfc(-delta/sqrt(2 Delta))/2 in the escaping regime; exactly 1/2
    when stuck.  Raises NegativeDelta when Delta <= 0 (possible only for
    coefficient sets violating the diffusion positivity bound) rather than
    producing a complex argument.
    """
    summary = propagator.asymptotics(params, state0)
    if summary.regime is Regime.STUCK:
        value, argument = 0.5, 0.0
    else:
        if summary.Delta <= 0:
            raise NegativeDelta(
                f"asymptotic spread Delta={summary.Delta:g} is not positive; "
                "the coefficient set lies outside the physically admissible region"
            )
        argument = -summary.delta / math.sqrt(2.0 * summary.Delta)
        value = 0.5 * float(erfc(argument))
    return PenetrabilityResult(
        value=value,
        argument=argument,
        regime=summary.regime,
        net_adjusted=value - _initial_tail(state0) if net else None,
    )


def dimensionless_ratio(cfg: DimensionlessConfig) -> float:
    """The scaled asymptotic ratio delta/sqrt(Delta) for a thermal bath.

    For gamma = 0:

        z (1 + v) / sqrt(1 + r^4 - 2 eps/(eps - 1) r^2 theta)

    and for gamma != 0, with g = gamma + sqrt(1 + gamma^2):

        z (g + v) / sqrt(g^2 + r^4
            - 2 g ((eps^2-gamma^2) sqrt(1+gamma^2) + eps)
                  / (eps^2 - gamma^2 - 1) * r^2 theta)

    Raises AmbiguousRegime within tolerance of eps = sqrt(1 + gamma^2) and
    NegativeDelta when the radicand is not positive.
    """
    eps, r, th, gamma = cfg.eps, cfg.r, cfg.theta, cfg.gamma
    s = math.hypot(1.0, gamma)
    if abs(eps - s) < TOL_SING * max(1.0, s):
        raise AmbiguousRegime(
            f"eps={eps:g} is within tolerance of sqrt(1+gamma^2)={s:g}"
        )
    if gamma == 0.0:
        radicand = 1.0 + r**4 - 2.0 * eps / (eps - 1.0) * r**2 * th
        numer = cfg.z * (1.0 + cfg.v)
    else:
        g = gamma + s
        thermal = ((eps**2 - gamma**2) * s + eps) / (eps**2 - gamma**2 - 1.0)
        radicand = g**2 + r**4 - 2.0 * g * thermal * r**2 * th
        numer = cfg.z * (g + cfg.v)
    if radicand <= 0.0:
        raise NegativeDelta(
            f"scaled spread radicand {radicand:g} is not positive for "
            f"eps={eps}, r={r}, theta={th}, gamma={gamma}"
        )
    return numer / math.sqrt(radicand)


def penetrability_dimensionless(
    cfg: DimensionlessConfig, enforce_window: bool = True
) -> PenetrabilityResult:
    """Final penetrability directly from the scaled variables.

    With enforce_window=True (default) the admissible window for eps is
    checked and RegimeViolation raised outside it.  Without enforcement,
    eps > sqrt(1 + gamma^2) returns the stuck-regime value 1/2 and other
    off-window points are evaluated through the closed form as long as it
    stays real.
    """
    if enforce_window:
        cfg.check_window()
    s = math.hypot(1.0, cfg.gamma)
    if abs(cfg.eps - s) < TOL_SING * max(1.0, s):
        raise AmbiguousRegime(
            f"eps={cfg.eps:g} is within tolerance of sqrt(1+gamma^2)={s:g}"
        )
    if cfg.eps > s:
        return PenetrabilityResult(value=0.5, argument=0.0, regime=Regime.STUCK)
    ratio = dimensionless_ratio(cfg)
    argument = -ratio / math.sqrt(2.0)
    numer = cfg.z * (cfg.g + cfg.v)
    if numer == 0.0:
        regime = Regime.SEPARATRIX
    elif numer > 0.0:
        regime = Regime.CROSSING
    else:
        regime = Regime.REFLECTED
    return PenetrabilityResult(
        value=0.5 * float(erfc(argument)), argument=argument, regime=regime
    )


@dataclass(frozen=True)
class EnergyReport:
    """Initial mean energy and the classical pass/fail bookkeeping.

    sub_barrier is E < 0 (mean energy below the barrier top).
    classical_pass is the strict crossing condition delta > 0, i.e.
    sigma_p(0) > -m (mu + nu) sigma_q(0); in scaled variables z (g + v) > 0,
    which for packets left of the top (z < 0) reads v < -g.
    """

    E: float
    sub_barrier: bool
    classical_pass: bool


def initial_energy(
    cfg: DimensionlessConfig, omega: float = 1.0, hbar: float = 1.0
) -> EnergyReport:
    """Mean energy of the minimum-uncertainty packet in scaled variables.

    E = (hbar omega / 4 r^2) [r^4 - 1 + z^2 (v^2 - 1)]
        + (hbar mu / 2) z^2 v / r^2,   mu = gamma * omega.
    """
    z, v, r = cfg.z, cfg.v, cfg.r
    mu = cfg.gamma * omega
    E = hbar * omega / (4.0 * r**2) * (r**4 - 1.0 + z**2 * (v**2 - 1.0))
    E += 0.5 * hbar * mu * z**2 * v / r**2
    return EnergyReport(
        E=E, sub_barrier=E < 0.0, classical_pass=z * (cfg.g + v) > 0.0
    )


def initial_energy_from_state(params: ModelParams, state0: GaussianState) -> EnergyReport:
    """Mean energy <p^2/2m - m omega^2 q^2/2 + (mu/2)(qp+pq)> of the initial state."""
    m, w, mu = params.m, params.omega, params.mu
    E = (
        state0.sigma_pp / (2.0 * m)
        - 0.5 * m * w**2 * state0.sigma_qq
        + state0.sigma_p**2 / (2.0 * m)
        - 0.5 * m * w**2 * state0.sigma_q**2
        + mu * state0.sigma_p * state0.sigma_q
    )
    delta = m * (mu + params.nu) * state0.sigma_q + state0.sigma_p
    return EnergyReport(E=E, sub_barrier=E < 0.0, classical_pass=delta > 0.0)


def _initial_tail(state0: GaussianState) -> float:
    value, _ = penetrability_from_moments(state0.sigma_q, state0.sigma_qq)
    return value
