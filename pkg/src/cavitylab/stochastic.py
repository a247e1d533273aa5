"""Monte Carlo check of the cavity-noise cross correlation <a(t) F^dag(t)>.

The reservoir noise is sampled as discretized complex white noise with
E[F_k conj(F_j)] = (kappa / dt) delta_kj, and the c-number analogue of the
driven, damped cavity amplitude is stepped with Euler-Maruyama:

    a_{k+1} = a_k + dt (-kappa/2 a_k + epsilon) + dt F_k

The equal-time correlation depends on where inside the step the amplitude
is read. Reading it at the start of the step gives 0, at the end gives
kappa, and at the midpoint gives kappa/2 (half the delta function weight
falls inside the integration interval).

Trial ``i`` draws from its own generator seeded with
``splitmix64(seed + i)``, so results do not depend on batching.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .model import ModelParams

__all__ = [
    "NoisePath",
    "CorrelationEstimate",
    "splitmix64",
    "trial_rng",
    "sample_noise_path",
    "estimate_correlation",
    "estimate_mean_field",
]

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(splitmix64((seed + trial) & _MASK64))


@dataclass(frozen=True)
class NoisePath:
    dt: float
    samples: np.ndarray
    seed: int


def _draw(kappa: float, dt: float, steps: int, rng: np.random.Generator) -> np.ndarray:
    uv = rng.standard_normal((steps, 2))
    scale = np.sqrt(kappa / dt / 2.0)
    return scale * (uv[:, 0] + 1j * uv[:, 1])


def sample_noise_path(kappa: float, dt: float, steps: int, seed: int) -> NoisePath:
    """F_k = sqrt(kappa/dt) (u_k + i v_k) / sqrt(2) with u, v standard normal."""
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    samples = _draw(kappa, dt, steps, np.random.default_rng(splitmix64(seed & _MASK64)))
    return NoisePath(dt=dt, samples=samples, seed=seed)


class CorrelationEstimate(NamedTuple):
    estimate: float
    stderr: float
    ito: float
    ito_stderr: float
    endpoint: float
    endpoint_stderr: float


def _check_run(p: ModelParams, dt: float, steps: int, trials: int) -> None:
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if steps < 1 or trials < 1:
        raise DomainError("steps and trials must be >= 1")
    if steps * dt < 10.0 / p.kappa:
        raise DomainError(
            f"horizon steps*dt = {steps * dt} is shorter than 10/kappa = {10.0 / p.kappa}"
        )


def _noise_block(p: ModelParams, dt: float, steps: int, trials: int, seed: int) -> np.ndarray:
    return np.stack([_draw(p.kappa, dt, steps, trial_rng(seed, i)) for i in range(trials)], axis=1)


def _mean_and_stderr(per_trial: np.ndarray) -> tuple[float, float]:
    n = per_trial.size
    mean = float(per_trial.mean())
    if n < 2:
        return mean, float("nan")
    return mean, float(per_trial.std(ddof=1) / np.sqrt(n))


def estimate_correlation(
    p: ModelParams,
    dt: float = 1e-3,
    steps: int = 10_000,
    trials: int = 200,
    seed: int = 0,
    noiseless: bool = False,
) -> CorrelationEstimate:
    """Estimate Re E[a(t) conj(F(t))]; the midpoint reading targets kappa/2.

    The atom-cavity coupling is not represented on the c-number path; the
    noise is assumed uncorrelated with the atomic operators, so the value
    does not depend on g. Each trial averages over all steps; the standard
    error is taken across trials. ``noiseless`` forces F = 0 as a control.
    """
    _check_run(p, dt, steps, trials)
    if noiseless:
        noise = np.zeros((steps, trials), dtype=complex)
    else:
        noise = _noise_block(p, dt, steps, trials, seed)
    decay = -0.5 * p.kappa
    a = np.zeros(trials, dtype=complex)
    acc_mid = np.zeros(trials)
    acc_ito = np.zeros(trials)
    acc_end = np.zeros(trials)
    for k in range(steps):
        f = noise[k]
        drift = decay * a + p.epsilon
        f_conj = f.conj()
        acc_ito += (a * f_conj).real
        a_mid = a + 0.5 * dt * (drift + f)
        acc_mid += (a_mid * f_conj).real
        a = a + dt * drift + dt * f
        acc_end += (a * f_conj).real
    mid = _mean_and_stderr(acc_mid / steps)
    ito = _mean_and_stderr(acc_ito / steps)
    end = _mean_and_stderr(acc_end / steps)
    return CorrelationEstimate(mid[0], mid[1], ito[0], ito[1], end[0], end[1])


def estimate_mean_field(
    p: ModelParams,
    dt: float = 1e-3,
    steps: int | None = None,
    trials: int = 200,
    seed: int = 0,
) -> complex:
    """Long-time mean amplitude of the free driven mode; expected 2 epsilon / kappa.

    Averages over the second half of the horizon and over trials. The default
    horizon is 40 / kappa so the initial transient is below e^-10.
    """
    if p.g != 0.0:
        raise DomainError("the c-number noise path cannot represent the atomic operator; need g = 0")
    if steps is None:
        steps = int(np.ceil(40.0 / p.kappa / dt))
    _check_run(p, dt, steps, trials)
    noise = _noise_block(p, dt, steps, trials, seed)
    decay = -0.5 * p.kappa
    a = np.zeros(trials, dtype=complex)
    start = steps // 2
    total = np.zeros(trials, dtype=complex)
    for k in range(steps):
        a = a + dt * (decay * a + p.epsilon) + dt * noise[k]
        if k >= start:
            total += a
    return complex((total / (steps - start)).mean())
