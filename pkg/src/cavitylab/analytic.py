"""Closed-form steady states of the adiabatically eliminated moment equations.

Atomic populations and coherence, cavity second moments, the
expectation-level commutator diagnostic, and the bookkeeping for a
superposed mode ``c = a + i b`` built from two commuting modes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError
from .model import ModelParams

__all__ = [
    "AtomicSteadyState",
    "CavitySteadyState",
    "ModeStats",
    "SuperpositionPhotons",
    "atomic_steady_state",
    "cavity_steady_state",
    "commutator_formula",
    "superposition_commutator",
    "superposition_mean_photons",
]


class AtomicSteadyState:
    """Steady atomic populations ``eta_a`` (upper), ``eta_b`` (lower) and ``sigma``.

    At g = 0 the atom is decoupled, its steady state is not fixed by the
    closed forms, and reading any of the three values raises DomainError.
    """

    __slots__ = ("_eta_a", "_sigma", "decoupled")

    def __init__(self, eta_a: float | None, sigma: float | None, decoupled: bool = False):
        if decoupled != (eta_a is None):
            raise ValueError("eta_a must be None exactly when decoupled")
        self._eta_a = eta_a
        self._sigma = sigma
        self.decoupled = decoupled

    @classmethod
    def decoupled_atom(cls) -> "AtomicSteadyState":
        return cls(None, None, decoupled=True)

    def _check(self) -> None:
        if self.decoupled:
            raise DomainError("atomic steady state is undefined for a decoupled atom (g = 0)")

    @property
    def eta_a(self) -> float:
        self._check()
        return self._eta_a  # type: ignore[return-value]

    @property
    def eta_b(self) -> float:
        self._check()
        return 1.0 - self._eta_a  # type: ignore[operator]

    @property
    def sigma(self) -> float:
        self._check()
        return self._sigma  # type: ignore[return-value]

    def __repr__(self) -> str:
        if self.decoupled:
            return "AtomicSteadyState(decoupled=True)"
        return f"AtomicSteadyState(eta_a={self._eta_a!r}, eta_b={1.0 - self._eta_a!r}, sigma={self._sigma!r})"


@dataclass(frozen=True)
class CavitySteadyState:
    aa_dag: float
    adag_a: float
    nbar: float
    commutator_expectation: float


@dataclass(frozen=True)
class ModeStats:
    mean_amplitude: complex
    mean_photons: float
    commutator: float = 1.0

    def __post_init__(self) -> None:
        if self.mean_photons < 0:
            raise DomainError(f"mean_photons must be >= 0, got {self.mean_photons}")


class SuperpositionPhotons(NamedTuple):
    value: float
    additive: bool
    cross_term: float


def _denominator(p: ModelParams) -> float:
    return 8.0 * p.epsilon**2 + p.kappa * p.gamma_c


def atomic_steady_state(p: ModelParams) -> AtomicSteadyState:
    """Upper-level probability 4e^2/D, coherence 4ge/D with D = 8e^2 + kappa*gamma_c."""
    if p.g == 0.0:
        return AtomicSteadyState.decoupled_atom()
    denom = _denominator(p)
    eta_a = 4.0 * p.epsilon**2 / denom
    sigma = 4.0 * p.g * p.epsilon / denom
    return AtomicSteadyState(eta_a, sigma)


def commutator_formula(p: ModelParams) -> float:
    """gamma_c^2 / (8 e^2 + kappa gamma_c) + 1, equal to 1 when g = 0."""
    if p.g == 0.0:
        return 1.0
    return p.gamma_c**2 / _denominator(p) + 1.0


def cavity_steady_state(p: ModelParams) -> CavitySteadyState:
    drive = 4.0 * p.epsilon**2 / p.kappa**2
    if p.g == 0.0:
        # every atomic contribution carries a factor gamma_c
        aa_dag = drive + 1.0
        adag_a = drive
        nbar = drive
    else:
        atom = atomic_steady_state(p)
        denom = _denominator(p)
        ratio = p.gamma_c / p.kappa
        depletion = ratio * 8.0 * p.epsilon**2 / denom
        aa_dag = ratio * atom.eta_b + drive - depletion + 1.0
        adag_a = ratio * atom.eta_a + drive - depletion
        nbar = drive - ratio * 4.0 * p.epsilon**2 / denom
    return CavitySteadyState(
        aa_dag=aa_dag,
        adag_a=adag_a,
        nbar=nbar,
        commutator_expectation=commutator_formula(p),
    )


def superposition_commutator(stats_a: ModeStats, stats_b: ModeStats) -> float:
    """Commutator of ``a + i b`` for commuting modes: the sum of the two."""
    return stats_a.commutator + stats_b.commutator


def superposition_mean_photons(
    stats_a: ModeStats,
    stats_b: ModeStats,
    correlated: bool = False,
    atol: float = 1e-12,
) -> SuperpositionPhotons:
    """Mean photon number of ``c = a + i b`` for uncorrelated modes.

    The cross term i(<a^dag><b> - <b^dag><a>) equals -2 Im(conj(<a>) <b>); the
    result is additive when it vanishes (both means zero, both real, or
    equal). Correlated modes need <a^dag b>, which is not available here.
    """
    if correlated:
        raise DomainError("cross correlation <a^dag b> is unknown for correlated modes")
    alpha = complex(stats_a.mean_amplitude)
    beta = complex(stats_b.mean_amplitude)
    cross = 1j * (alpha.conjugate() * beta - beta.conjugate() * alpha)
    cross_term = cross.real
    value = stats_a.mean_photons + stats_b.mean_photons + cross_term
    return SuperpositionPhotons(value, abs(cross_term) <= atol, cross_term)
