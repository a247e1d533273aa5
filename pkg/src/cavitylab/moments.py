"""Fixed-step integration of the closed approximate moment equations.

State: atomic coherence <sigma> (complex), upper-level population <eta_a>,
and the two cavity second moments <a a^dag>, <a^dag a>. The lower-level
population is 1 - eta_a throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, NumericalError
from .model import ModelParams

__all__ = [
    "MomentState",
    "IntegratorConfig",
    "IntegrationResult",
    "GROUND_VACUUM",
    "moment_derivatives",
    "default_config",
    "integrate_to_steady_state",
]


@dataclass(frozen=True)
class MomentState:
    sigma_mean: complex
    eta_a: float
    aa_dag: float
    adag_a: float

    @property
    def eta_b(self) -> float:
        return 1.0 - self.eta_a

    def as_tuple(self) -> tuple[complex, float, float, float]:
        return (self.sigma_mean, self.eta_a, self.aa_dag, self.adag_a)

    def max_abs(self) -> float:
        return max(abs(v) for v in self.as_tuple())

    def is_finite(self) -> bool:
        s = complex(self.sigma_mean)
        return all(math.isfinite(v) for v in (s.real, s.imag, self.eta_a, self.aa_dag, self.adag_a))


# atom in the lower level, cavity in vacuum
GROUND_VACUUM = MomentState(sigma_mean=0j, eta_a=0.0, aa_dag=1.0, adag_a=0.0)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    tol: float
    max_time: float

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if not (self.tol > 0):
            raise DomainError(f"tol must be > 0, got {self.tol}")
        if not (self.max_time >= 10 * self.dt):
            raise DomainError("max_time must be at least 10 * dt")


def default_config(p: ModelParams, max_time: float | None = None) -> IntegratorConfig:
    """dt = 0.01 / max(kappa, gamma_c, epsilon), tol = 1e-10 * max(kappa, 1)."""
    dt = 0.01 / max(p.kappa, p.gamma_c, p.epsilon)
    tol = 1e-10 * max(p.kappa, 1.0)
    if max_time is None:
        # slowest relaxation rate of the linear system is at least gamma_c / 2
        slow = min(p.kappa, p.gamma_c / 2) if p.g > 0 else p.kappa
        max_time = 60.0 / slow
    return IntegratorConfig(dt=dt, tol=tol, max_time=max(max_time, 10 * dt))


def _rhs(s, eta, aa, ad, gc, drive, kappa, e2k):
    # drive = 2 g e / kappa, e2k = 4 e^2 / kappa
    re2 = 2.0 * s.real
    ds = -0.5 * gc * s + drive * (1.0 - 2.0 * eta)
    deta = -gc * eta + drive * re2
    shared = e2k - 2.0 * drive * re2
    daa = -kappa * aa + gc * (1.0 - eta) + shared + kappa
    dad = -kappa * ad + gc * eta + shared
    return ds, deta, daa, dad


def moment_derivatives(s: MomentState, p: ModelParams) -> MomentState:
    """Time derivative of each field, returned as a MomentState.

    The normally ordered moment obeys the same equation as the anti-normally
    ordered one with eta_b -> eta_a and without the reservoir term kappa.
    """
    drive = 2.0 * p.g * p.epsilon / p.kappa
    e2k = 4.0 * p.epsilon**2 / p.kappa
    ds, deta, daa, dad = _rhs(
        complex(s.sigma_mean), s.eta_a, s.aa_dag, s.adag_a, p.gamma_c, drive, p.kappa, e2k
    )
    return MomentState(ds, deta, daa, dad)


class IntegrationResult(NamedTuple):
    state: MomentState
    converged: bool
    elapsed: float


def integrate_to_steady_state(
    p: ModelParams,
    init: MomentState = GROUND_VACUUM,
    cfg: IntegratorConfig | None = None,
) -> IntegrationResult:
    """Classical RK4 with a fixed step until max|d/dt| < tol or max_time.

    ``elapsed`` is the simulated time at which the loop stopped.
    """
    if cfg is None:
        cfg = default_config(p)
    if not init.is_finite():
        raise NumericalError("initial state is not finite")
    gc, kappa = p.gamma_c, p.kappa
    drive = 2.0 * p.g * p.epsilon / kappa
    e2k = 4.0 * p.epsilon**2 / kappa
    h = cfg.dt
    half = 0.5 * h
    sixth = h / 6.0
    tol = cfg.tol
    n_steps = int(math.floor(cfg.max_time / h + 1e-9))

    s, eta, aa, ad = complex(init.sigma_mean), float(init.eta_a), float(init.aa_dag), float(init.adag_a)
    step = 0
    while True:
        k1 = _rhs(s, eta, aa, ad, gc, drive, kappa, e2k)
        if max(abs(k1[0]), abs(k1[1]), abs(k1[2]), abs(k1[3])) < tol:
            return IntegrationResult(MomentState(s, eta, aa, ad), True, step * h)
        if step >= n_steps:
            return IntegrationResult(MomentState(s, eta, aa, ad), False, step * h)
        k2 = _rhs(s + half * k1[0], eta + half * k1[1], aa + half * k1[2], ad + half * k1[3],
                  gc, drive, kappa, e2k)
        k3 = _rhs(s + half * k2[0], eta + half * k2[1], aa + half * k2[2], ad + half * k2[3],
                  gc, drive, kappa, e2k)
        k4 = _rhs(s + h * k3[0], eta + h * k3[1], aa + h * k3[2], ad + h * k3[3],
                  gc, drive, kappa, e2k)
        s += sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        eta += sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        aa += sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        ad += sixth * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
        step += 1
        if not (math.isfinite(s.real) and math.isfinite(s.imag) and math.isfinite(eta)
                and math.isfinite(aa) and math.isfinite(ad)):
            raise NumericalError(f"state became non-finite at t={step * h}")
