"""Dense complex matrix algebra and the uncertainty-relation functionals.

Operators and states are plain ``numpy`` arrays of dtype ``complex128`` wrapped
in two small validated value types, :class:`HermitianOperator` and
:class:`DensityMatrix`.  Every functional here works on any dimension and uses
ħ = 1 implicitly; callers that carry ħ fold it into the matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InputError, NumericalError

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
REALITY_TOL = 1e-10
SATURATION_TOL = 1e-9
PURITY_TOL = 1e-9
ANTIHERMITIAN_TOL = 1e-12


# --------------------------------------------------------------------------
# plain matrix algebra
# --------------------------------------------------------------------------

def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square, finite, complex128 array (copied)."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("matrix has non-finite entries")
    return arr


def _check_same_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def multiply(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_dim(a, b)
    return a @ b


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_dim(a, b)
    return a + b


def scale(c: complex, m) -> np.ndarray:
    return complex(c) * as_matrix(m)


def trace(m) -> complex:
    return complex(np.trace(as_matrix(m)))


def frobenius_norm(m) -> float:
    return float(np.linalg.norm(as_matrix(m), "fro"))


def commutator(a, b) -> np.ndarray:
    """``AB - BA``.

    When both arguments are hermitian the result must be anti-hermitian; this
    is checked to ``ANTIHERMITIAN_TOL`` relative to the operand norms.
    """
    a, b = _matrix_of(a), _matrix_of(b)
    _check_same_dim(a, b)
    c = a @ b - b @ a
    if _is_hermitian(a) and _is_hermitian(b):
        scale_ = max(1.0, np.linalg.norm(a) * np.linalg.norm(b))
        if np.max(np.abs(c + c.conj().T)) > ANTIHERMITIAN_TOL * scale_:
            raise NumericalError("commutator of hermitian matrices is not anti-hermitian")
    return c


def _is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def _matrix_of(x) -> np.ndarray:
    if isinstance(x, (HermitianOperator, DensityMatrix)):
        return x.matrix
    return as_matrix(x)


# --------------------------------------------------------------------------
# validated value types
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A hermitian observable.

    Construction symmetrizes the input as ``(M + M†)/2`` after checking that
    the max-norm asymmetry is within ``tol``; the size of the applied
    correction is kept in ``correction``.
    """

    matrix: np.ndarray
    correction: float = 0.0

    def __init__(self, matrix, tol: float = HERMITICITY_TOL):
        m = as_matrix(matrix)
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > tol:
            raise InputError(f"matrix is not hermitian (max |M - M†| = {asym:.3e} > {tol:.1e})")
        sym = (m + m.conj().T) / 2
        sym.setflags(write=False)
        object.__setattr__(self, "matrix", sym)
        object.__setattr__(self, "correction", asym / 2)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(add(self.matrix, other.matrix))

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(add(self.matrix, -other.matrix))

    def __mul__(self, c: float) -> "HermitianOperator":
        if np.iscomplexobj(c) and np.imag(c) != 0:
            raise InputError("hermitian operators only scale by real numbers")
        return HermitianOperator(float(np.real(c)) * self.matrix)

    __rmul__ = __mul__

    def shifted(self, c: float) -> "HermitianOperator":
        """``A + c·I``."""
        return HermitianOperator(self.matrix + float(c) * np.eye(self.dim))

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A statistical operator: hermitian, unit trace, positive semidefinite.

    The matrix is stored exactly as given (no symmetrization), so that
    serialization round-trips bit for bit.  The hermitian eigenvalues computed
    during validation are kept in ``eigenvalues`` (ascending).
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)

    def __init__(
        self,
        matrix,
        hermiticity_tol: float = HERMITICITY_TOL,
        trace_tol: float = TRACE_TOL,
        psd_tol: float = PSD_TOL,
    ):
        m = as_matrix(matrix)
        asym = float(np.max(np.abs(m - m.conj().T)))
        if asym > hermiticity_tol:
            raise InputError(f"density matrix is not hermitian (max |ρ - ρ†| = {asym:.3e})")
        tr = np.trace(m)
        if abs(tr - 1) > trace_tol:
            raise InputError(f"density matrix trace is {tr.real:.15g}, expected 1")
        evals = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if evals[0] < -psd_tol:
            raise InputError(f"density matrix has negative eigenvalue {evals[0]:.3e}")
        m.setflags(write=False)
        evals.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eigenvalues", evals)

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        """The pure state ``|ψ⟩⟨ψ|`` for a (normalized internally) vector."""
        v = np.asarray(psi, dtype=np.complex128).ravel()
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InputError("zero vector is not a state")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_mixture(cls, vectors, weights=None) -> "DensityMatrix":
        """``Σ w_k |ψ_k⟩⟨ψ_k|`` built literally from the outer products.

        Vectors are individually normalized but not orthogonalized, so
        non-orthogonal components are allowed.  Weights default to uniform.
        """
        vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
        if not vecs:
            raise InputError("empty mixture")
        if weights is None:
            weights = np.full(len(vecs), 1.0 / len(vecs))
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(vecs),) or np.any(weights < 0):
            raise InputError("mixture weights must be non-negative, one per vector")
        rho = np.zeros((vecs[0].size, vecs[0].size), dtype=np.complex128)
        for w, v in zip(weights, vecs):
            if v.size != rho.shape[0]:
                raise DimensionError("mixture components have different dimensions")
            v = v / np.linalg.norm(v)
            rho += w * np.outer(v, v.conj())
        return cls(rho)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=np.complex128) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(np.sum(self.eigenvalues > PSD_TOL))

    def purity(self) -> float:
        return purity(self)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim}, purity={purity(self):.6g})"


@dataclass(frozen=True)
class UncertaintyReport:
    """Audit of ``δA·δB ≥ ½|⟨i[A,B]⟩|`` for one (A, B, ρ) triple."""

    mean_a: float
    mean_b: float
    spread_a: float
    spread_b: float
    product: float
    bound: float
    gap: float
    purity: float
    saturated: bool
    nontrivial: bool

    @property
    def variance_a(self) -> float:
        return self.spread_a**2

    @property
    def variance_b(self) -> float:
        return self.spread_b**2


# --------------------------------------------------------------------------
# functionals
# --------------------------------------------------------------------------

def _real_trace(m: np.ndarray, what: str, tol: float = REALITY_TOL) -> float:
    t = np.trace(m)
    # relative to the operator scale so that large-norm observables are not penalized
    scale_ = max(1.0, float(np.linalg.norm(m)))
    if abs(t.imag) > tol * scale_:
        raise NumericalError(f"{what} has imaginary part {t.imag:.3e}")
    return float(t.real)


def expectation(obs: HermitianOperator, state: DensityMatrix) -> float:
    """``Re tr(Aρ)``, after checking that the imaginary part is negligible."""
    _check_same_dim(obs.matrix, state.matrix)
    return _real_trace(obs.matrix @ state.matrix, "tr(Aρ)")


def variance(obs: HermitianOperator, state: DensityMatrix) -> float:
    """``⟨A²⟩ - ⟨A⟩²`` clamped to zero only for round-off-sized negatives."""
    _check_same_dim(obs.matrix, state.matrix)
    a = obs.matrix
    a_rho = a @ state.matrix
    mean = _real_trace(a_rho, "tr(Aρ)")
    mean_sq = _real_trace(a @ a_rho, "tr(A²ρ)")
    raw = mean_sq - mean**2
    if raw < 0:
        if raw < -PSD_TOL * max(1.0, mean_sq):
            raise NumericalError(f"negative variance {raw:.3e}")
        return 0.0
    return raw


def spread(obs: HermitianOperator, state: DensityMatrix) -> float:
    """Standard deviation ``δA = sqrt(⟨A²⟩ - ⟨A⟩²)``."""
    return float(np.sqrt(variance(obs, state)))


def commutator_expectation(a: HermitianOperator, b: HermitianOperator, state: DensityMatrix) -> float:
    """``⟨i[A,B]⟩``, real for hermitian A and B."""
    _check_same_dim(a.matrix, b.matrix, state.matrix)
    c = 1j * commutator(a.matrix, b.matrix)
    return _real_trace(c @ state.matrix, "tr(ρ·i[A,B])")


def commutator_bound(a: HermitianOperator, b: HermitianOperator, state: DensityMatrix) -> float:
    """Right-hand side ``½|⟨i[A,B]⟩|`` of the uncertainty relation."""
    return 0.5 * abs(commutator_expectation(a, b, state))


def purity(state: DensityMatrix) -> float:
    """``tr ρ²``, computed as the squared Frobenius norm of ρ."""
    return float(np.sum(np.abs(state.matrix) ** 2))


def is_pure(state: DensityMatrix, tol: float = PURITY_TOL) -> bool:
    return 1.0 - purity(state) <= tol


def uncertainty_report(
    a: HermitianOperator,
    b: HermitianOperator,
    state: DensityMatrix,
    saturation_tol: float = SATURATION_TOL,
) -> UncertaintyReport:
    """Evaluate both sides of the uncertainty relation.

    ``saturated`` is set when ``|gap| <= saturation_tol``; ``nontrivial`` when
    the product itself exceeds ``saturation_tol``, i.e. when equality is not
    merely ``0 = 0``.
    """
    if not saturation_tol > 0:
        raise InputError("saturation_tol must be positive")
    _check_same_dim(a.matrix, b.matrix, state.matrix)
    spread_a = spread(a, state)
    spread_b = spread(b, state)
    product = spread_a * spread_b
    bound = commutator_bound(a, b, state)
    gap = product - bound
    return UncertaintyReport(
        mean_a=expectation(a, state),
        mean_b=expectation(b, state),
        spread_a=spread_a,
        spread_b=spread_b,
        product=product,
        bound=bound,
        gap=gap,
        purity=purity(state),
        saturated=abs(gap) <= saturation_tol,
        nontrivial=product > saturation_tol,
    )
