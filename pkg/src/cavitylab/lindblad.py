"""Exact steady-state oracle on a truncated atom (x) Fock space.

The composite space is ordered atom-first: index ``atom * (n_max + 1) + n``
with atomic basis {upper |a>, lower |b>}. Density matrices are vectorized
row-major, so ``vec(A @ rho @ B) = kron(A, B.T) @ vec(rho)``.

Memory: the dense Liouvillian has (2 (n_max + 1))**4 complex entries, about
100 MB at n_max = 24 and 4.5 GB at n_max = 64.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import NumericalError, SingularSystemError, TruncationError
from .model import ModelParams, TruncationSpec

__all__ = [
    "OperatorSet",
    "DensityMatrix",
    "OracleReport",
    "MomentResidual",
    "GuardResult",
    "SuperpositionCheck",
    "destroy",
    "build_operators",
    "hamiltonian",
    "build_liouvillian",
    "apply_generator",
    "steady_state",
    "solve_oracle",
    "expectations",
    "truncation_guard",
    "verify_moment_equations",
    "two_mode_superposition_check",
    "coherent_ket",
    "random_density_matrix",
    "ATOM_UPPER",
    "ATOM_LOWER",
]

ATOM_UPPER = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
ATOM_LOWER = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)

RCOND_FLOOR = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


def destroy(n_max: int) -> np.ndarray:
    """Truncated annihilation operator on Fock levels 0..n_max."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def dag(op: np.ndarray) -> np.ndarray:
    return op.conj().T


@dataclass(frozen=True)
class OperatorSet:
    spec: TruncationSpec
    a: np.ndarray
    a_dag: np.ndarray
    sigma: np.ndarray
    sigma_dag: np.ndarray
    eta_a: np.ndarray
    eta_b: np.ndarray
    identity: np.ndarray

    @property
    def dim(self) -> int:
        return self.identity.shape[0]


def build_operators(spec: TruncationSpec) -> OperatorSet:
    cav_eye = np.eye(spec.cavity_dim, dtype=complex)
    atom_eye = np.eye(2, dtype=complex)
    lower_from_upper = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |b><a|
    a = np.kron(atom_eye, destroy(spec.n_max))
    sigma = np.kron(lower_from_upper, cav_eye)
    return OperatorSet(
        spec=spec,
        a=a,
        a_dag=dag(a),
        sigma=sigma,
        sigma_dag=dag(sigma),
        eta_a=np.kron(ATOM_UPPER, cav_eye),
        eta_b=np.kron(ATOM_LOWER, cav_eye),
        identity=np.eye(spec.dim, dtype=complex),
    )


def hamiltonian(p: ModelParams, ops: OperatorSet) -> np.ndarray:
    """H = i e (a^dag - a) + i g (sigma^dag a - a^dag sigma)."""
    drive = 1j * p.epsilon * (ops.a_dag - ops.a)
    coupling = 1j * p.g * (ops.sigma_dag @ ops.a - ops.a_dag @ ops.sigma)
    return drive + coupling


def _liouvillian(h: np.ndarray, jump: np.ndarray, rate: float) -> np.ndarray:
    n = h.shape[0]
    eye = np.eye(n, dtype=complex)
    number = dag(jump) @ jump
    unitary = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    dissipator = (
        np.kron(jump, jump.conj())
        - 0.5 * np.kron(number, eye)
        - 0.5 * np.kron(eye, number.T)
    )
    return unitary + rate * dissipator


def build_liouvillian(p: ModelParams, spec: TruncationSpec) -> np.ndarray:
    """Matrix of rho -> -i[H, rho] + kappa (a rho a^dag - {a^dag a, rho}/2)."""
    ops = build_operators(spec)
    return _liouvillian(hamiltonian(p, ops), ops.a, p.kappa)


def apply_generator(rho: np.ndarray, p: ModelParams, ops: OperatorSet) -> np.ndarray:
    """Same map as :func:`build_liouvillian`, applied without forming the matrix."""
    h = hamiltonian(p, ops)
    a, a_dag = ops.a, ops.a_dag
    number = a_dag @ a
    comm = h @ rho - rho @ h
    return -1j * comm + p.kappa * (a @ rho @ a_dag - 0.5 * (number @ rho + rho @ number))


class DensityMatrix:
    """Validated density matrix: Hermitian, unit trace, numerically positive."""

    __slots__ = ("entries",)

    def __init__(self, entries: np.ndarray, check: bool = True):
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 2:
            raise ValueError(f"density matrix must be square with dim >= 2, got {entries.shape}")
        self.entries = entries
        if check:
            self.validate()

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())

    def validate(self) -> None:
        rho = self.entries
        if not np.all(np.isfinite(rho)):
            raise NumericalError("density matrix has non-finite entries")
        herm = np.abs(rho - dag(rho)).max()
        if herm > HERMITIAN_TOL:
            raise NumericalError(f"density matrix not Hermitian (deviation {herm:.3e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > TRACE_TOL:
            raise NumericalError(f"density matrix trace {tr} != 1")
        lam = self.min_eigenvalue()
        if lam < -POSITIVITY_TOL:
            raise NumericalError(f"density matrix has negative eigenvalue {lam:.3e}")

    def expect(self, op: np.ndarray) -> complex:
        # tr(rho op) without forming the product
        return complex(np.einsum("ij,ji->", self.entries, op))


def steady_state(liouvillian: np.ndarray) -> DensityMatrix:
    """Unique stationary state of a Liouvillian via trace-row replacement.

    The first row of L is replaced by the trace functional and the system
    L' vec(rho) = e_0 is solved densely. A reciprocal condition number
    below ``RCOND_FLOOR`` means the stationary manifold is degenerate and
    :class:`SingularSystemError` is raised instead of picking a state.
    """
    n2 = liouvillian.shape[0]
    dim = math.isqrt(n2)
    if dim * dim != n2 or liouvillian.shape != (n2, n2):
        raise ValueError(f"not a superoperator matrix: shape {liouvillian.shape}")
    system = np.array(liouvillian, dtype=complex, copy=True)
    system[0, :] = np.eye(dim, dtype=complex).reshape(-1)
    rhs = np.zeros(n2, dtype=complex)
    rhs[0] = 1.0

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(system, check_finite=True)
    rcond, info = sla.lapack.zgecon(lu, np.linalg.norm(system, 1))
    if info != 0 or not rcond >= RCOND_FLOOR:
        raise SingularSystemError(
            f"steady-state system is rank deficient (rcond={rcond:.3e}); "
            "the stationary manifold is degenerate"
        )
    rho = sla.lu_solve((lu, piv), rhs).reshape(dim, dim)
    rho = 0.5 * (rho + dag(rho))
    rho /= np.trace(rho).real
    return DensityMatrix(rho)


def solve_oracle(
    p: ModelParams, spec: TruncationSpec, atom_state: np.ndarray | None = None
) -> DensityMatrix:
    """Stationary state for ``p``; handles the decoupled atom at g = 0.

    For g > 0 the full Liouvillian has a unique steady state. For g = 0 the
    atom is frozen, so the cavity-only problem is solved and tensored with
    ``atom_state`` (default: lower level). ``atom_state`` is ignored for g > 0.
    """
    if p.g > 0.0:
        return steady_state(build_liouvillian(p, spec))
    if atom_state is None:
        atom_state = ATOM_LOWER
    atom = DensityMatrix(atom_state).entries
    a = destroy(spec.n_max)
    h = 1j * p.epsilon * (dag(a) - a)
    cavity = steady_state(_liouvillian(h, a, p.kappa)).entries
    return DensityMatrix(np.kron(atom, cavity))


class GuardResult(NamedTuple):
    ok: bool
    edge_population: float


def truncation_guard(rho: DensityMatrix | np.ndarray, spec: TruncationSpec) -> GuardResult:
    """Population on Fock level n_max summed over atomic sectors."""
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    diag = np.real(np.diag(entries))
    top = spec.n_max
    stride = spec.cavity_dim
    edge = float(sum(diag[k * stride + top] for k in range(diag.size // stride)))
    edge = max(edge, 0.0)
    return GuardResult(edge < spec.edge_tolerance, edge)


@dataclass(frozen=True)
class OracleReport:
    eta_a: float
    eta_b: float
    sigma: complex
    aa_dag: float
    adag_a: float
    nbar: float
    commutator_expectation: float
    edge_population: float


def expectations(rho: DensityMatrix, ops: OperatorSet) -> OracleReport:
    """tr(rho O) for every observable; raises TruncationError past the guard."""
    guard = truncation_guard(rho, ops.spec)
    if not guard.ok:
        raise TruncationError(
            f"edge population {guard.edge_population:.3e} exceeds "
            f"tolerance {ops.spec.edge_tolerance:.3e} at n_max={ops.spec.n_max}"
        )
    a, a_dag = ops.a, ops.a_dag
    aa_dag = rho.expect(a @ a_dag).real
    adag_a = rho.expect(a_dag @ a).real
    return OracleReport(
        eta_a=rho.expect(ops.eta_a).real,
        eta_b=rho.expect(ops.eta_b).real,
        sigma=rho.expect(ops.sigma),
        aa_dag=aa_dag,
        adag_a=adag_a,
        nbar=adag_a,
        commutator_expectation=rho.expect(a @ a_dag - a_dag @ a).real,
        edge_population=guard.edge_population,
    )


class MomentResidual(NamedTuple):
    dsigma_generator: complex
    dsigma_formula: complex
    deta_generator: float
    deta_formula: float
    residual: float


def verify_moment_equations(
    rho: DensityMatrix | np.ndarray, p: ModelParams, ops: OperatorSet
) -> MomentResidual:
    """Compare exact atomic moment rates with their closed operator forms.

    d<sigma>/dt = g <(eta_b - eta_a) a> and d<eta_a>/dt = g <sigma^dag a + a^dag sigma>;
    the cavity dissipator does not act on atomic observables.
    """
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    drho = apply_generator(entries, p, ops)

    def tr(op: np.ndarray, mat: np.ndarray) -> complex:
        return complex(np.einsum("ij,ji->", mat, op))

    ds_gen = tr(ops.sigma, drho)
    ds_formula = p.g * tr((ops.eta_b - ops.eta_a) @ ops.a, entries)
    de_gen = tr(ops.eta_a, drho)
    de_formula = p.g * tr(ops.sigma_dag @ ops.a + ops.a_dag @ ops.sigma, entries)
    residual = max(abs(ds_gen - ds_formula), abs(de_gen - de_formula))
    return MomentResidual(ds_gen, ds_formula, de_gen.real, de_formula.real, float(residual))


def coherent_ket(alpha: complex, n_max: int) -> np.ndarray:
    """Coherent state truncated to levels 0..n_max and renormalized."""
    n = np.arange(n_max + 1)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    mag = np.exp(-0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * log_fact) if alpha != 0 else (n == 0).astype(float)
    ket = mag * np.exp(1j * np.angle(alpha) * n)
    return ket / np.linalg.norm(ket)


def random_density_matrix(
    spec: TruncationSpec, rng: np.random.Generator, occupied: int | None = None
) -> DensityMatrix:
    """Random full-rank-on-support state using only Fock levels below ``occupied``."""
    occupied = spec.n_max // 2 if occupied is None else occupied
    mask = np.zeros(spec.dim, dtype=bool)
    for atom in range(2):
        mask[atom * spec.cavity_dim : atom * spec.cavity_dim + occupied] = True
    k = int(mask.sum())
    z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    small = z @ dag(z)
    small /= np.trace(small).real
    rho = np.zeros((spec.dim, spec.dim), dtype=complex)
    rho[np.ix_(mask, mask)] = small
    rho = 0.5 * (rho + dag(rho))
    return DensityMatrix(rho)


@dataclass(frozen=True)
class CrossTermCase:
    label: str
    alpha: complex
    beta: complex
    cross_term: float
    factorized_cross_term: float
    additive: bool


@dataclass(frozen=True)
class SuperpositionCheck:
    n_max: int
    exact_identity: bool
    float_deviation: float
    cases: tuple[CrossTermCase, ...]

    @property
    def ok(self) -> bool:
        expected = {"zero_mean": True, "equal_real": True}
        return self.exact_identity and all(
            c.additive == expected[c.label] for c in self.cases if c.label in expected
        )


DEFAULT_CROSS_CASES: tuple[tuple[str, complex, complex], ...] = (
    ("zero_mean", 0j, 0j),
    ("equal_real", 0.3 + 0j, 0.3 + 0j),
    ("one_and_i", 1.0 + 0j, 1j),
)


def _exact_commutator_identity(n_max: int) -> bool:
    import sympy as sp

    d = n_max + 1
    lad = sp.zeros(d, d)
    for k in range(1, d):
        lad[k - 1, k] = sp.sqrt(k)
    eye = sp.eye(d)
    a = sp.kronecker_product(lad, eye)
    b = sp.kronecker_product(eye, lad)
    c = a + sp.I * b

    def comm(x):
        return x * x.H - x.H * x

    deviation = (comm(c) - comm(a) - comm(b)).applyfunc(sp.expand)
    return bool(deviation.is_zero_matrix)


def two_mode_superposition_check(
    spec: TruncationSpec,
    cases: tuple[tuple[str, complex, complex], ...] = DEFAULT_CROSS_CASES,
    atol: float = 1e-12,
) -> SuperpositionCheck:
    """Check [c, c^dag] = [a, a^dag] + [b, b^dag] for c = a + i b on two modes.

    The identity is verified in exact arithmetic (sympy) and its floating
    point deviation is reported alongside. The cross term i(<a^dag b> - <b^dag a>)
    is evaluated on product coherent states for each ``(label, alpha, beta)``.
    """
    n = spec.n_max
    d = n + 1
    lad = destroy(n)
    eye = np.eye(d, dtype=complex)
    a = np.kron(lad, eye)
    b = np.kron(eye, lad)
    c = a + 1j * b

    def comm(x: np.ndarray) -> np.ndarray:
        return x @ dag(x) - dag(x) @ x

    float_dev = float(np.abs(comm(c) - comm(a) - comm(b)).max())

    results = []
    for label, alpha, beta in cases:
        psi = np.kron(coherent_ket(alpha, n), coherent_ket(beta, n))
        rho = np.outer(psi, psi.conj())

        def ev(op: np.ndarray) -> complex:
            return complex(np.einsum("ij,ji->", rho, op))

        cross = (1j * (ev(dag(a) @ b) - ev(dag(b) @ a))).real
        mean_a, mean_b = ev(a), ev(b)
        factorized = (1j * (mean_a.conjugate() * mean_b - mean_b.conjugate() * mean_a)).real
        results.append(
            CrossTermCase(label, alpha, beta, cross, factorized, abs(cross) <= atol)
        )
    return SuperpositionCheck(
        n_max=n,
        exact_identity=_exact_commutator_identity(n),
        float_deviation=float_dev,
        cases=tuple(results),
    )
