"""Direct numerical integration of the moment equations of motion.

For any quadratic potential U(q) = +/- (m omega^2 / 2) q^2 the expectation
values close on themselves (d<U'(q)>/dq is linear in q), so the five moments
obey the linear system

    d(sigma_q)/dt  = -(lam - mu) sigma_q + sigma_p / m
    d(sigma_p)/dt  = +/- m omega^2 sigma_q - (lam + mu) sigma_p
    d(sigma_qq)/dt = -2 (lam - mu) sigma_qq + 2 sigma_pq / m + 2 d_qq
    d(sigma_pp)/dt = -2 (lam + mu) sigma_pp +/- 2 m omega^2 sigma_pq + 2 d_pp
    d(sigma_pq)/dt = +/- m omega^2 sigma_qq + sigma_pp / m - 2 lam sigma_pq + 2 d_pq

with the upper sign for the inverted parabola (barrier) and the lower sign
for the ordinary oscillator well.  This integrator is the first-line
cross-check for the closed forms in :mod:`lindblad_tunneling.propagator`.

For the barrier with lam < nu the moments diverge like e^{2(nu-lam)t}; the
``scaled`` mode integrates the co-moving variables
x = e^{(lam-nu)t} (sigma_q, sigma_p) and y = e^{2(lam-nu)t} covariances, in
which the late-time ratio sigma_q/sqrt(sigma_qq) = x_q/sqrt(y_qq) can be
evaluated at arbitrarily large t without overflow.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import propagator
from .errors import NonFiniteState, StepSizeUnderflow
from .model import ModelParams
from .propagator import GaussianState


class Curvature(enum.Enum):
    """Sign of the quadratic potential; the value multiplies the m*omega^2 terms."""

    BARRIER = 1.0
    WELL = -1.0


@dataclass(frozen=True)
class QuadraticPotential:
    curvature: Curvature
    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")

    @classmethod
    def barrier(cls, omega: float) -> "QuadraticPotential":
        return cls(Curvature.BARRIER, omega)

    @classmethod
    def well(cls, omega: float) -> "QuadraticPotential":
        return cls(Curvature.WELL, omega)


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-stepping choices: adaptive RK45 (rtol/atol) or fixed-step RK4 (dt)."""

    method: str = "rk45"
    dt: float = 1e-3
    rtol: float = 1e-10
    atol: float = 1e-12

    def __post_init__(self):
        if self.method not in ("rk45", "rk4"):
            raise ValueError(f"method must be 'rk45' or 'rk4', got {self.method!r}")
        if self.dt <= 0 or self.rtol <= 0 or self.atol <= 0:
            raise ValueError("dt, rtol, atol must all be positive")


def _system_matrices(params: ModelParams, potential: QuadraticPotential):
    """Linear part A and constant forcing b of dy/dt = A y + b."""
    m, lam, mu = params.m, params.lam, params.mu
    k = potential.curvature.value * m * potential.omega**2
    A = np.array(
        [
            [-(lam - mu), 1.0 / m, 0.0, 0.0, 0.0],
            [k, -(lam + mu), 0.0, 0.0, 0.0],
            [0.0, 0.0, -2.0 * (lam - mu), 0.0, 2.0 / m],
            [0.0, 0.0, 0.0, -2.0 * (lam + mu), 2.0 * k],
            [0.0, 0.0, k, 1.0 / m, -2.0 * lam],
        ]
    )
    b = np.array([0.0, 0.0, 2.0 * params.d_qq, 2.0 * params.d_pp, 2.0 * params.d_pq])
    return A, b


def _state_vector(state: GaussianState) -> np.ndarray:
    return np.array(
        [state.sigma_q, state.sigma_p, state.sigma_qq, state.sigma_pp, state.sigma_pq]
    )


def _check_grid(t_grid: np.ndarray) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValueError("t_grid must be a non-empty 1-d array")
    if t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0")
    if t_grid.size > 1 and not np.all(np.diff(t_grid) > 0):
        raise ValueError("t_grid must be strictly increasing")
    return t_grid


def _rk4_path(f, y0: np.ndarray, t_grid: np.ndarray, dt: float) -> np.ndarray:
    ys = np.empty((t_grid.size, y0.size))
    ys[0] = y0
    y = y0.copy()
    for i in range(t_grid.size - 1):
        t0, t1 = t_grid[i], t_grid[i + 1]
        n = max(1, math.ceil((t1 - t0) / dt))
        h = (t1 - t0) / n
        t = t0
        for _ in range(n):
            k1 = f(t, y)
            k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = f(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        ys[i + 1] = y
    return ys


def integrate_moments(
    params: ModelParams,
    potential: QuadraticPotential | None,
    state0: GaussianState,
    t_grid,
    config: IntegratorConfig | None = None,
    scaled: bool = False,
) -> list[GaussianState]:
    """Integrate the five moment equations over t_grid (starting at 0).

    potential=None means the barrier at params.omega.  With scaled=True
    (barrier only) the returned states hold the co-moving variables
    e^{(lam-nu)t} sigma_q, e^{(lam-nu)t} sigma_p and e^{2(lam-nu)t}
    covariances; ratios like sigma_q/sqrt(sigma_qq) are unchanged by the
    scaling.  Raises NonFiniteState if the moments overflow (expected for
    the unscaled divergent regime at large t) and StepSizeUnderflow if the
    adaptive integrator stalls.
    """
    if potential is None:
        potential = QuadraticPotential.barrier(params.omega)
    config = config or IntegratorConfig()
    t_grid = _check_grid(t_grid)
    A, b = _system_matrices(params, potential)
    y0 = _state_vector(state0)

    if scaled:
        if potential.curvature is not Curvature.WELL:
            shift = params.lam - params.nu
        else:
            raise ValueError("scaled integration is defined for the barrier only")
        S = np.diag([1.0, 1.0, 2.0, 2.0, 2.0])
        A_sc = A + shift * S

        def f(t, y):
            return A_sc @ y + b * math.exp(2.0 * shift * t)

    else:

        def f(t, y):
            return A @ y + b

    if config.method == "rk4":
        ys = _rk4_path(f, y0, t_grid, config.dt)
    else:
        if t_grid.size == 1:
            ys = y0[None, :]
        else:
            sol = solve_ivp(
                f,
                (t_grid[0], t_grid[-1]),
                y0,
                method="RK45",
                t_eval=t_grid,
                rtol=config.rtol,
                atol=config.atol,
            )
            if not sol.success:
                if sol.status == -1:
                    raise StepSizeUnderflow(sol.message)
                raise NonFiniteState(sol.message)
            ys = sol.y.T

    if not np.all(np.isfinite(ys)):
        raise NonFiniteState(
            "moment integration overflowed; for lam < nu at large t use scaled=True"
        )
    return [
        GaussianState(
            t=float(t), sigma_q=y[0], sigma_p=y[1],
            sigma_qq=y[2], sigma_pp=y[3], sigma_pq=y[4],
        )
        for t, y in zip(t_grid, ys)
    ]


MOMENT_NAMES = ("sigma_q", "sigma_p", "sigma_qq", "sigma_pp", "sigma_pq")


@dataclass(frozen=True)
class ErrorReport:
    """Per-moment max deviation between the ODE path and the closed forms.

    Deviations are normalized by the largest magnitude the closed form
    reaches on the grid (per moment), so components that pass through zero
    do not produce spurious blow-ups.
    """

    max_rel_errors: dict[str, float] = field(default_factory=dict)

    @property
    def max_rel_error(self) -> float:
        return max(self.max_rel_errors.values())


def compare_with_analytic(
    params: ModelParams,
    state0: GaussianState,
    t_grid,
    config: IntegratorConfig | None = None,
) -> ErrorReport:
    """Integrate the barrier moment equations and diff against the closed forms."""
    t_grid = _check_grid(t_grid)
    states = integrate_moments(params, None, state0, t_grid, config=config)
    ode = np.array([_state_vector(s) for s in states])

    sq, sp = propagator.propagate_mean(params, state0, t_grid)
    sqq, spp, spq = propagator.propagate_covariance(params, state0, t_grid)
    exact = np.column_stack(np.broadcast_arrays(sq, sp, sqq, spp, spq))

    scales = np.maximum(np.max(np.abs(exact), axis=0), 1e-300)
    errs = np.max(np.abs(ode - exact), axis=0) / scales
    return ErrorReport(dict(zip(MOMENT_NAMES, errs.tolist())))


def spread_ratio_at(
    params: ModelParams,
    state0: GaussianState,
    t: float,
    config: IntegratorConfig | None = None,
) -> float:
    """sigma_q(t)/sqrt(sigma_qq(t)) via scaled co-moving integration.

    Safe for arbitrarily large t in the divergent regime; this is the
    quantity whose t -> inf limit is delta/sqrt(Delta).
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0.0:
        return state0.sigma_q / math.sqrt(state0.sigma_qq)
    states = integrate_moments(
        params, None, state0, np.array([0.0, t]), config=config, scaled=True
    )
    final = states[-1]
    return final.sigma_q / math.sqrt(final.sigma_qq)
