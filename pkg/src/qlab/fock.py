"""Truncated Fock-space ladder operators and identity checks.

Standard and deformed annihilation/creation matrices in the number basis,
residual checks for the deformed commutation and reordering relations, the
linearoid reconstruction a = A / f(F^{-1}(N)), alternative Hamiltonians,
and quadrature uncertainty products.

Identities that hold in infinite dimension necessarily fail at the
truncation edge, so every check excludes the last basis state (the
FockMatrix ``truncated`` marker records this contract).  All residuals are
measured relative to the local operator scale, max(1, |entries involved|):
q-numbers grow like e^{lam*n}, so an eps-level relative error is the honest
floating-point statement of "the identity holds".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import deformation as dfm
from .errors import ParameterError


@dataclass(frozen=True)
class FockMatrix:
    """Dense operator in the truncated number basis.

    ``truncated`` marks that identities involving products of two ladder
    operators are only exact on the first dim-1 basis states.
    """

    dim: int
    entries: np.ndarray
    truncated: bool = True

    def to_json(self) -> str:
        pairs = [[z.real, z.imag] for z in self.entries.ravel()]  # row-major
        return json.dumps({"dim": self.dim, "entries": pairs})


@dataclass(frozen=True)
class FockState:
    dim: int
    amplitudes: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.dim,):
            raise ParameterError("amplitude vector length must equal dim")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "norm", float(np.linalg.norm(amps)))

    @classmethod
    def basis(cls, dim: int, n: int) -> "FockState":
        if not 0 <= n < dim:
            raise ParameterError(f"basis index {n} outside 0..{dim - 1}")
        amps = np.zeros(dim, dtype=complex)
        amps[n] = 1.0
        return cls(dim, amps)


def _check_dim(dim: int, minimum: int = 2) -> None:
    if dim < minimum:
        raise ParameterError(f"dimension must be >= {minimum}, got {dim}")


def annihilation(dim: int) -> FockMatrix:
    """Standard ladder matrix: entry (n, n+1) = sqrt(n+1)."""
    _check_dim(dim)
    m = np.zeros((dim, dim), dtype=complex)
    n = np.arange(dim - 1)
    m[n, n + 1] = np.sqrt(n + 1.0)
    return FockMatrix(dim, m)


def deformed_annihilation(dim: int, spec: dfm.DeformationSpec) -> FockMatrix:
    """Deformed ladder matrix A = a f(n): entry (n, n+1) = sqrt(F(n+1))."""
    _check_dim(dim)
    if spec.kind == "identity":
        return annihilation(dim)
    m = np.zeros((dim, dim), dtype=complex)
    for n in range(dim - 1):
        val = dfm.big_f(n + 1, spec)
        if not math.isfinite(val):
            raise ParameterError(
                f"F({n + 1}) overflows double range; reduce dim or |lam|")
        m[n, n + 1] = math.sqrt(val)
    return FockMatrix(dim, m)


def dagger(m: FockMatrix) -> FockMatrix:
    return FockMatrix(m.dim, m.entries.conj().T.copy(), m.truncated)


def _scaled_max_residual(delta: np.ndarray, *terms: np.ndarray) -> float:
    scale = np.ones_like(delta, dtype=float)
    for t in terms:
        scale = np.maximum(scale, np.abs(t))
    return float(np.max(np.abs(delta) / scale))


def check_commutator(dim: int, spec: dfm.DeformationSpec) -> float:
    """Residual of A A† - A† A = diag(phi(n)) on the first dim-1 states.

    Returns the max entry of the difference, relative to the local operator
    scale.  The excluded last diagonal entry is O(F(dim)) by construction —
    the structural truncation failure, not a defect.
    """
    _check_dim(dim, 3)
    a = deformed_annihilation(dim, spec).entries
    ad = a.conj().T
    p1 = a @ ad
    p2 = ad @ a
    target = np.diag([dfm.phi_of_z(n, spec) for n in range(dim)]).astype(complex)
    k = dim - 1
    return _scaled_max_residual((p1 - p2 - target)[:k, :k],
                                p1[:k, :k], p2[:k, :k], target[:k, :k])


def check_reordering(dim: int, lam: float) -> float:
    """Residual of A A† - e^lam A† A = diag(e^{-lam n}) on the first dim-1 states."""
    _check_dim(dim, 3)
    a = deformed_annihilation(dim, dfm.q_deform(lam)).entries
    ad = a.conj().T
    q = math.exp(lam)
    p1 = a @ ad
    p2 = q * (ad @ a)
    target = np.diag(np.exp(-lam * np.arange(dim))).astype(complex)
    k = dim - 1
    return _scaled_max_residual((p1 - p2 - target)[:k, :k],
                                p1[:k, :k], p2[:k, :k], target[:k, :k])


def linearoid_roundtrip(dim: int, spec: dfm.DeformationSpec) -> float:
    """Reconstruct a from A via A / f(F^{-1}(N)), N = A†A.

    Returns the max absolute deviation from annihilation(dim) over the first
    dim-1 states (entries are O(sqrt(dim)), so absolute is meaningful here).
    """
    _check_dim(dim)
    a_mat = deformed_annihilation(dim, spec).entries
    n_op = a_mat.conj().T @ a_mat
    inv_f = np.array([1.0 / dfm.f_of_n(dfm.big_f_inverse(max(n_op[j, j].real, 0.0), spec), spec)
                      for j in range(dim)])
    recon = a_mat @ np.diag(inv_f)
    k = dim - 1
    return float(np.max(np.abs(recon - annihilation(dim).entries)[:k, :k]))


def hamiltonian(dim: int, spec: dfm.DeformationSpec | None = None) -> FockMatrix:
    """diag(n + 1/2) in standard form, or F^{-1}(A†A) + 1/2 when a spec is given.

    Both agree on non-edge states — the same dynamics expressed in deformed
    variables.  The deformed form is evaluated entrywise on the diagonal of
    A†A (which is diagonal in this basis); no general matrix functions.
    """
    _check_dim(dim)
    if spec is None:
        return FockMatrix(dim, np.diag(np.arange(dim) + 0.5).astype(complex))
    a_mat = deformed_annihilation(dim, spec).entries
    n_op = a_mat.conj().T @ a_mat
    diag = [dfm.big_f_inverse(max(n_op[j, j].real, 0.0), spec) + 0.5 for j in range(dim)]
    return FockMatrix(dim, np.diag(diag).astype(complex))


def heisenberg_residual(dim: int, spec: dfm.DeformationSpec) -> float:
    """Residual of [A, n + 1/2] = A on the first dim-1 states.

    Vanishes for every deformation — the linearoid preserves the linear
    Heisenberg equation of motion.  Scale-relative, like the other checks.
    """
    _check_dim(dim, 3)
    a = deformed_annihilation(dim, spec).entries
    h = hamiltonian(dim).entries
    p1 = a @ h
    p2 = h @ a
    k = dim - 1
    return _scaled_max_residual((p1 - p2 - a)[:k, :k],
                                p1[:k, :k], p2[:k, :k], a[:k, :k])


def evolution_residual(dim: int, spec: dfm.DeformationSpec, t: float) -> float:
    """Max deviation of e^{iHt} A e^{-iHt} from e^{-it} A (H = diag(n+1/2)).

    The rotating-frame statement of the same deformation-independent
    dynamics; diagonal H, so the conjugation is exact phase multiplication.
    """
    _check_dim(dim)
    a = deformed_annihilation(dim, spec).entries
    phases = np.exp(1j * (np.arange(dim) + 0.5) * t)
    rotated = phases[:, None] * a * phases.conj()[None, :]
    return float(np.max(np.abs(rotated - np.exp(-1j * t) * a)))


def spectrum_check(dim: int, spec: dfm.DeformationSpec) -> float:
    """Max scale-relative deviation of eig(A†A) from {F(n), n = 0..dim-1}."""
    _check_dim(dim)
    a = deformed_annihilation(dim, spec).entries
    eigs = np.linalg.eigvalsh(a.conj().T @ a)
    target = np.array(sorted(dfm.big_f(n, spec) for n in range(dim)))
    return float(np.max(np.abs(eigs - target) / np.maximum(1.0, target)))


@dataclass(frozen=True)
class QuadratureResult:
    delta_q: float
    delta_p: float
    product: float


def quadrature_uncertainty(state: FockState, spec: dfm.DeformationSpec) -> QuadratureResult:
    """Standard deviations of Q = (A+A†)/sqrt(2), P = (A-A†)/(i sqrt(2)).

    The state must be normalized with negligible support on the top two
    levels (< 1e-8), otherwise truncation corrupts the product.  With
    hbar = 1 the undeformed minimum-uncertainty value is 1/2.
    """
    if abs(state.norm - 1.0) > 1e-12:
        raise ParameterError("quadrature_uncertainty needs a normalized state")
    if np.max(np.abs(state.amplitudes[-2:])) >= 1e-8:
        raise ParameterError("state has support at the truncation edge; "
                             "increase dim (amplitudes of top two levels must be < 1e-8)")
    a = deformed_annihilation(state.dim, spec).entries
    q_op = (a + a.conj().T) / math.sqrt(2.0)
    p_op = (a - a.conj().T) / (1j * math.sqrt(2.0))
    v = state.amplitudes

    def _var(op):
        mean = np.vdot(v, op @ v).real
        mean_sq = np.vdot(v, op @ (op @ v)).real
        return mean_sq - mean * mean

    dq = math.sqrt(max(_var(q_op), 0.0))
    dp = math.sqrt(max(_var(p_op), 0.0))
    return QuadratureResult(dq, dp, dq * dp)
