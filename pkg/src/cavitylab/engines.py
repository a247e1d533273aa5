"""Uniform steady-state reports from the three engines."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .analytic import atomic_steady_state, cavity_steady_state
from .lindblad import build_operators, expectations, solve_oracle
from .model import ModelParams, TruncationSpec
from .moments import integrate_to_steady_state

ENGINES = ("analytic", "moments", "oracle")

__all__ = ["ENGINES", "SteadyStateReport", "run_engine"]


@dataclass(frozen=True)
class SteadyStateReport:
    """One engine's steady-state expectations.

    Atomic fields are ``None`` when the atom is decoupled (g = 0).
    ``edge_population`` is only set by the oracle and ``converged`` only by
    the moment integrator.
    """

    engine: str
    eta_a: float | None
    eta_b: float | None
    sigma: complex | None
    aa_dag: float
    adag_a: float
    nbar: float
    commutator_expectation: float
    edge_population: float | None = None
    converged: bool | None = None

    @property
    def decoupled(self) -> bool:
        return self.eta_a is None

    def to_dict(self) -> dict[str, Any]:
        atomic: dict[str, Any]
        if self.decoupled:
            atomic = {"eta_a": "decoupled", "eta_b": "decoupled", "sigma_re": "decoupled", "sigma_im": "decoupled"}
        else:
            sigma = complex(self.sigma)  # type: ignore[arg-type]
            atomic = {"eta_a": self.eta_a, "eta_b": self.eta_b, "sigma_re": sigma.real, "sigma_im": sigma.imag}
        out = {"engine": self.engine, **atomic}
        out.update(
            aa_dag=self.aa_dag,
            adag_a=self.adag_a,
            nbar=self.nbar,
            commutator_expectation=self.commutator_expectation,
        )
        if self.edge_population is not None:
            out["edge_population"] = self.edge_population
        if self.converged is not None:
            out["converged"] = self.converged
        return out


def _analytic(p: ModelParams) -> SteadyStateReport:
    atom = atomic_steady_state(p)
    cav = cavity_steady_state(p)
    if atom.decoupled:
        eta_a = eta_b = sigma = None
    else:
        eta_a, eta_b, sigma = atom.eta_a, atom.eta_b, complex(atom.sigma)
    return SteadyStateReport(
        "analytic", eta_a, eta_b, sigma, cav.aa_dag, cav.adag_a, cav.nbar, cav.commutator_expectation
    )


def _moments(p: ModelParams) -> SteadyStateReport:
    result = integrate_to_steady_state(p)
    s = result.state
    coupled = p.g > 0.0
    return SteadyStateReport(
        "moments",
        s.eta_a if coupled else None,
        s.eta_b if coupled else None,
        complex(s.sigma_mean) if coupled else None,
        s.aa_dag,
        s.adag_a,
        s.adag_a,
        s.aa_dag - s.adag_a,
        converged=result.converged,
    )


def _oracle(p: ModelParams, spec: TruncationSpec) -> SteadyStateReport:
    rho = solve_oracle(p, spec)
    r = expectations(rho, build_operators(spec))
    coupled = p.g > 0.0
    return SteadyStateReport(
        "oracle",
        r.eta_a if coupled else None,
        r.eta_b if coupled else None,
        r.sigma if coupled else None,
        r.aa_dag,
        r.adag_a,
        r.nbar,
        r.commutator_expectation,
        edge_population=r.edge_population,
    )


def run_engine(name: str, p: ModelParams, spec: TruncationSpec | None = None) -> SteadyStateReport:
    if name == "analytic":
        return _analytic(p)
    if name == "moments":
        return _moments(p)
    if name == "oracle":
        return _oracle(p, spec or TruncationSpec())
    raise ValueError(f"unknown engine {name!r}; expected one of {ENGINES}")
