"""Physical parameters, thermal-bath coefficients, and dimensionless mappings.

The open-system model is fixed by the mass m, the barrier frequency omega,
the friction rate lambda, the Hamiltonian mixed-term coefficient mu, and
three diffusion coefficients (d_pp, d_qq, d_pq) induced by the environment.
A completely positive evolution requires

    d_pp * d_qq - d_pq**2 >= (lambda * hbar / 2)**2

which this module checks and reports but never silently assumes: the
zero-temperature Gibbs coefficients with mu != 0 violate it, and those
parameter regions are still physically interesting to scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import RegimeViolation

#: relative tolerance used for strict-inequality window checks
WINDOW_MARGIN = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the damped inverted-oscillator model.

    m, omega and hbar must be positive.  lam (friction), mu and the
    diffusion coefficients are accepted as non-negative numbers so that
    frictionless / diffusionless mathematical limits remain usable as
    oracles; strict physical validity is reported by
    :func:`check_positivity_constraint` and :meth:`is_strictly_physical`.
    """

    m: float
    omega: float
    lam: float
    mu: float = 0.0
    hbar: float = 1.0
    d_qq: float = 0.0
    d_pp: float = 0.0
    d_pq: float = 0.0

    def __post_init__(self):
        if not (self.m > 0 and self.omega > 0 and self.hbar > 0):
            raise ValueError(
                f"m, omega, hbar must be positive, got m={self.m}, "
                f"omega={self.omega}, hbar={self.hbar}"
            )
        if self.lam < 0:
            raise ValueError(f"lam must be non-negative, got {self.lam}")
        if self.mu < 0:
            raise ValueError(f"mu must be non-negative, got {self.mu}")
        if self.d_qq < 0 or self.d_pp < 0:
            raise ValueError(
                f"diagonal diffusion must be non-negative, got "
                f"d_qq={self.d_qq}, d_pp={self.d_pp}"
            )

    @property
    def nu(self) -> float:
        """Effective hyperbolic rate sqrt(omega^2 + mu^2) of the barrier dynamics."""
        return math.hypot(self.omega, self.mu)

    def is_strictly_physical(self) -> bool:
        """True when lam, d_qq, d_pp are strictly positive and the positivity bound holds."""
        return (
            self.lam > 0
            and self.d_qq > 0
            and self.d_pp > 0
            and check_positivity_constraint(self).passed
        )

    def with_thermal_coefficients(self, theta: float) -> "ModelParams":
        """Return a copy with Gibbs-form diffusion coefficients at coth factor theta."""
        d_pp, d_qq, d_pq = thermal_coefficients(
            self.m, self.omega, self.lam, self.mu, self.hbar, theta
        )
        return replace(self, d_qq=d_qq, d_pp=d_pp, d_pq=d_pq)


@dataclass(frozen=True)
class BathSpec:
    """Thermal bath stored through theta = coth(hbar*omega / (2*kT)).

    theta = 1 encodes zero temperature; storing theta avoids evaluating
    coth at T -> 0 and matches how penetrability surfaces are usually
    parameterized.
    """

    theta: float = 1.0

    def __post_init__(self):
        if self.theta < 1.0:
            raise ValueError(f"theta = coth(hbar*omega/2kT) must be >= 1, got {self.theta}")

    @classmethod
    def from_temperature(cls, kT: float, omega: float, hbar: float = 1.0) -> "BathSpec":
        """Build from the bath energy scale kT (kT = 0 gives theta = 1)."""
        if kT < 0:
            raise ValueError(f"kT must be non-negative, got {kT}")
        if kT == 0.0:
            return cls(theta=1.0)
        return cls(theta=1.0 / math.tanh(hbar * omega / (2.0 * kT)))

    def temperature(self, omega: float, hbar: float = 1.0) -> float:
        """Invert theta back to kT (returns 0 for theta = 1)."""
        if self.theta == 1.0:
            return 0.0
        return hbar * omega / (2.0 * math.atanh(1.0 / self.theta))


@dataclass(frozen=True)
class ConstraintReport:
    """Result of the diffusion-coefficient positivity check.

    margin = d_pp*d_qq - d_pq^2 - (lam*hbar/2)^2; non-negative margin passes.
    """

    passed: bool
    margin: float
    product: float
    bound: float


def thermal_coefficients(
    m: float, omega: float, lam: float, mu: float, hbar: float, theta: float
) -> tuple[float, float, float]:
    """Gibbs-state diffusion coefficients (d_pp, d_qq, d_pq) for a thermal bath.

        d_pp = (lam+mu)/2 * hbar*m*omega * theta
        d_qq = (lam-mu)/2 * hbar/(m*omega) * theta
        d_pq = 0

    Requires lam > mu >= 0 (otherwise d_qq would not be positive and the
    Gibbs form is undefined) and theta >= 1.
    """
    if m <= 0 or omega <= 0 or hbar <= 0:
        raise ValueError("m, omega, hbar must be positive")
    if mu < 0:
        raise ValueError(f"mu must be non-negative, got {mu}")
    if lam <= mu:
        raise ValueError(
            f"thermal coefficients require lam > mu, got lam={lam}, mu={mu}"
        )
    if theta < 1.0:
        raise ValueError(f"theta must be >= 1, got {theta}")
    d_pp = 0.5 * (lam + mu) * hbar * m * omega * theta
    d_qq = 0.5 * (lam - mu) * hbar / (m * omega) * theta
    return d_pp, d_qq, 0.0


def check_positivity_constraint(params: ModelParams) -> ConstraintReport:
    """Evaluate the complete-positivity bound; reports, never raises.

    For Gibbs coefficients the bound reduces to (lam^2 - mu^2) * theta^2 >= lam^2,
    so zero-temperature baths with mu != 0 always fail; strict/warn policy
    is left to the caller.
    """
    product = params.d_pp * params.d_qq - params.d_pq**2
    bound = (params.lam * params.hbar) ** 2 / 4.0
    margin = product - bound
    return ConstraintReport(passed=margin >= 0.0, margin=margin, product=product, bound=bound)


@dataclass(frozen=True)
class DimensionlessConfig:
    """Scaled variables fixing an initial packet and environment.

    z:     scaled initial position sigma_q(0)/sqrt(sigma_qq(0)), typically < 0
    v:     scaled initial momentum sigma_p(0)/(m*omega*sigma_q(0))
    eps:   scaled friction lambda/omega
    r:     scaled inverse packet width sqrt(hbar/(2 m omega)) / sqrt(sigma_qq(0))
    gamma: mu/omega
    theta: coth(hbar*omega/2kT), >= 1

    Escaping-regime windows (checked by :meth:`check_window`):
    0 < eps < 1 when gamma = 0, and gamma < eps < sqrt(1+gamma^2) otherwise.
    """

    z: float
    v: float
    eps: float
    r: float
    gamma: float = 0.0
    theta: float = 1.0

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.theta < 1.0:
            raise ValueError(f"theta must be >= 1, got {self.theta}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if self.eps <= 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    @property
    def g(self) -> float:
        """Scaled asymptotic slope gamma + sqrt(1 + gamma^2) = (mu + nu)/omega."""
        return self.gamma + math.hypot(1.0, self.gamma)

    def window(self) -> tuple[float, float]:
        """Admissible (lo, hi) for eps at this gamma."""
        return (self.gamma, math.hypot(1.0, self.gamma)) if self.gamma > 0 else (0.0, 1.0)

    def check_window(self) -> None:
        """Raise RegimeViolation unless eps sits strictly inside the window.

        Strict inequalities are enforced with a relative margin of 1e-9: the
        stationary-variance denominators vanish at the upper edge and the
        Gibbs coefficients degenerate at the lower one.
        """
        lo, hi = self.window()
        tol = WINDOW_MARGIN * max(1.0, hi)
        if not (lo + tol < self.eps < hi - tol):
            raise RegimeViolation(
                f"eps={self.eps} outside the admissible window "
                f"{lo} < eps < {hi:.9g} for gamma={self.gamma}"
            )

    def violates_window(self) -> bool:
        try:
            self.check_window()
        except RegimeViolation:
            return True
        return False


def gibbs_constraint_satisfied(cfg: DimensionlessConfig) -> bool:
    """Positivity bound specialized to Gibbs coefficients, in scaled variables.

    Equivalent to (lam^2 - mu^2) theta^2 >= lam^2; requires eps > gamma for
    the coefficients to exist at all (False otherwise).
    """
    if cfg.eps <= cfg.gamma:
        return False
    return (cfg.eps**2 - cfg.gamma**2) * cfg.theta**2 >= cfg.eps**2


def dimensionless_to_dimensional(
    cfg: DimensionlessConfig,
    m: float = 1.0,
    omega: float = 1.0,
    hbar: float = 1.0,
    check_window: bool = True,
):
    """Map scaled variables to (ModelParams, initial GaussianState).

    The initial packet is the minimum-uncertainty Gaussian fixed by r:
    sigma_qq(0) = hbar/(2 m omega r^2), sigma_pp(0) = hbar^2/(4 sigma_qq(0)),
    sigma_pq(0) = 0, with first moments sigma_q(0) = z*sqrt(sigma_qq(0)) and
    sigma_p(0) = v*m*omega*sigma_q(0).  Diffusion coefficients take the
    Gibbs form at cfg.theta.
    """
    from .propagator import GaussianState

    if check_window:
        cfg.check_window()
    lam = cfg.eps * omega
    mu = cfg.gamma * omega
    d_pp, d_qq, d_pq = thermal_coefficients(m, omega, lam, mu, hbar, cfg.theta)
    params = ModelParams(
        m=m, omega=omega, lam=lam, mu=mu, hbar=hbar, d_qq=d_qq, d_pp=d_pp, d_pq=d_pq
    )
    sigma_qq0 = hbar / (2.0 * m * omega) / cfg.r**2
    sigma_pp0 = hbar**2 / (4.0 * sigma_qq0)
    sigma_q0 = cfg.z * math.sqrt(sigma_qq0)
    sigma_p0 = cfg.v * m * omega * sigma_q0
    state0 = GaussianState(
        t=0.0,
        sigma_q=sigma_q0,
        sigma_p=sigma_p0,
        sigma_qq=sigma_qq0,
        sigma_pp=sigma_pp0,
        sigma_pq=0.0,
    )
    return params, state0


def dimensional_to_dimensionless(params: ModelParams, state0) -> DimensionlessConfig:
    """Invert :func:`dimensionless_to_dimensional`.

    Requires Gibbs-form diffusion coefficients (d_pq = 0 and a consistent
    theta from d_pp and d_qq).  When sigma_q(0) = 0 the scaled momentum v is
    undefined (sigma_p(0) is then 0 as well) and 0.0 is returned for it.
    """
    if state0.t != 0.0:
        raise ValueError("state0 must be an initial state (t = 0)")
    theta_p = 2.0 * params.d_pp / ((params.lam + params.mu) * params.hbar * params.m * params.omega)
    theta_q = 2.0 * params.d_qq * params.m * params.omega / ((params.lam - params.mu) * params.hbar)
    if abs(params.d_pq) > 1e-12 * math.sqrt(params.d_pp * params.d_qq) or not math.isclose(
        theta_p, theta_q, rel_tol=1e-9
    ):
        raise ValueError("diffusion coefficients are not of Gibbs form; theta is ambiguous")
    z = state0.sigma_q / math.sqrt(state0.sigma_qq)
    v = (
        state0.sigma_p / (params.m * params.omega * state0.sigma_q)
        if state0.sigma_q != 0.0
        else 0.0
    )
    r = math.sqrt(params.hbar / (2.0 * params.m * params.omega) / state0.sigma_qq)
    return DimensionlessConfig(
        z=z,
        v=v,
        eps=params.lam / params.omega,
        r=r,
        gamma=params.mu / params.omega,
        theta=theta_p,
    )
