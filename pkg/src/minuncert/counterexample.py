"""Mixed states that saturate the uncertainty relation.

If ``M = A + iλB`` (λ real, nonzero) has an eigenvalue ``z`` whose eigenspace
is at least two-dimensional, every state supported on that eigenspace has the
same means ``⟨A⟩ = Re z`` and ``λ⟨B⟩ = Im z`` and satisfies
``(ΔA + iλΔB)ρ = 0``, which forces equality in ``δA·δB ≥ ½|⟨i[A,B]⟩|``.
A degenerate eigenspace can only exist together with a nonzero commutator when
``M`` is not normal.  This module searches for such eigenspaces numerically.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, InputError, NumericalError
from .operator_core import (
    SATURATION_TOL,
    DensityMatrix,
    HermitianOperator,
    UncertaintyReport,
    as_matrix,
    uncertainty_report,
)

log = logging.getLogger(__name__)

KERNEL_TOL = 1e-10
CLUSTER_TOL = 1e-8
EIGENKET_TOL = 1e-12
NORMALITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SaturatingFamily:
    """A degenerate eigenspace of ``A + iλB`` and the uniform mixture over it.

    Any other mixture supported on ``kernel_basis`` saturates the relation as
    well; ``canonical_state`` is just the basis-independent choice ``P/k``.
    """

    lam: float
    eigenvalue: complex
    kernel_basis: np.ndarray  # columns are orthonormal kernel vectors
    canonical_state: DensityMatrix
    report: UncertaintyReport

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]

    @property
    def nontrivial(self) -> bool:
        return self.report.nontrivial

    def projector(self) -> np.ndarray:
        return self.kernel_basis @ self.kernel_basis.conj().T


@dataclass(frozen=True)
class EigenketCheck:
    residual_eig: float
    is_eigenket: bool
    eigenvalue: complex


def three_level_example() -> tuple[HermitianOperator, HermitianOperator, DensityMatrix]:
    """The 3×3 observables and the rank-2 mixed state of the original counterexample."""
    a = HermitianOperator([[0, 1, 0], [1, 2, 0], [0, 0, 0]])
    b = HermitianOperator([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]])
    rho = DensityMatrix(np.diag([0.5, 0.0, 0.5]))
    return a, b, rho


def non_normal_operator(a: HermitianOperator, b: HermitianOperator, lam: float = 1.0) -> np.ndarray:
    """``A + iλB``."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return a.matrix + 1j * float(lam) * b.matrix


def is_normal(m, tol: float = NORMALITY_TOL) -> bool:
    """True iff ``‖MM† - M†M‖_F <= tol·max(1, ‖M‖_F²)``."""
    m = as_matrix(m)
    mh = m.conj().T
    defect = np.linalg.norm(m @ mh - mh @ m)
    return bool(defect <= tol * max(1.0, np.linalg.norm(m) ** 2))


def eigenket_check(m, v, tol: float = EIGENKET_TOL) -> EigenketCheck:
    """Residual ``‖Mv - (v†Mv)v‖`` of a unit vector against its Rayleigh quotient."""
    m = as_matrix(m)
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.size != m.shape[0]:
        raise DimensionError(f"vector of length {v.size} for a {m.shape[0]}-dimensional matrix")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise InputError("zero vector has no eigenket status")
    v = v / norm
    mv = m @ v
    rq = complex(np.vdot(v, mv))
    residual = float(np.linalg.norm(mv - rq * v))
    return EigenketCheck(residual_eig=residual, is_eigenket=residual <= tol, eigenvalue=rq)


def _cluster(values: np.ndarray, radius: float) -> list[complex]:
    """Single-linkage clusters of complex numbers; returns the cluster means.

    Ordering is deterministic: by real part, then imaginary part, of the mean.
    """
    remaining = list(range(len(values)))
    clusters = []
    while remaining:
        seed = remaining.pop(0)
        members = [seed]
        grew = True
        while grew:
            grew = False
            for idx in list(remaining):
                if np.min(np.abs(values[members] - values[idx])) <= radius:
                    members.append(idx)
                    remaining.remove(idx)
                    grew = True
        clusters.append(complex(np.mean(values[members])))
    return sorted(clusters, key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def numerical_kernel(m: np.ndarray, kernel_tol: float = KERNEL_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (as columns) of the right singular vectors with
    ``σ <= kernel_tol·max(σ_max, scale)``.

    ``scale`` lets the caller anchor the threshold to a reference norm, so a
    shifted matrix ``M - zI`` that cancels to round-off is seen as all kernel.
    """
    _, s, vh = np.linalg.svd(m)
    ref = max(s[0] if s.size else 0.0, scale)
    mask = s <= kernel_tol * (ref if ref > 0 else 1.0)
    return vh[mask].conj().T


def _same_subspace(p: np.ndarray, q: np.ndarray, tol: float) -> bool:
    return p.shape == q.shape and np.linalg.norm(p - q) <= tol


def find_saturating_mixed_states(
    a: HermitianOperator,
    b: HermitianOperator,
    lam: float = 1.0,
    kernel_tol: float = KERNEL_TOL,
    cluster_tol: float = CLUSTER_TOL,
    saturation_tol: float = SATURATION_TOL,
    probe_eigenvalues: Iterable[complex] = (),
) -> list[SaturatingFamily]:
    """Mixed states over degenerate eigenspaces of ``A + iλB``.

    Parameters
    ----------
    a, b : HermitianOperator
        The observable pair.
    lam : float
        Real, nonzero weight of ``B``.
    kernel_tol : float
        Relative singular-value threshold defining the numerical kernel of
        ``M - zI``.
    cluster_tol : float
        Eigenvalues closer than ``cluster_tol·(1 + ‖M‖_F)`` are merged.
    saturation_tol : float
        Every returned family must have ``gap <= saturation_tol``; candidate
        families that fail are dropped with a warning.
    probe_eigenvalues : iterable of complex
        Extra candidate eigenvalues tested alongside the computed spectrum.
        Strongly non-normal matrices (e.g. truncations of ladder-operator
        polynomials) can have eigenvalues that a dense eigensolver cannot
        resolve, while the kernel of ``M - zI`` is still well conditioned.

    Returns
    -------
    list of SaturatingFamily
        One entry per distinct eigenspace of dimension at least two.  The
        list may be empty.
    """
    lam = float(lam)
    if lam == 0 or not np.isfinite(lam):
        raise InputError("lambda must be a finite nonzero real number")
    m = non_normal_operator(a, b, lam)
    try:
        evals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolve failed: {exc}") from exc
    if not np.all(np.isfinite(evals)):
        raise NumericalError("eigensolve returned non-finite eigenvalues")

    radius = cluster_tol * (1.0 + np.linalg.norm(m))
    candidates = _cluster(evals, radius)
    for z in probe_eigenvalues:
        z = complex(z)
        if all(abs(z - c) > radius for c in candidates):
            candidates.append(z)

    eye = np.eye(m.shape[0])
    scale = float(np.linalg.norm(m, 2))
    families: list[SaturatingFamily] = []
    for z in candidates:
        basis = numerical_kernel(m - z * eye, kernel_tol, scale)
        k = basis.shape[1]
        if k < 2:
            continue
        proj = basis @ basis.conj().T
        if any(_same_subspace(proj, f.projector(), np.sqrt(cluster_tol)) for f in families):
            continue
        state = DensityMatrix(proj / k)
        report = uncertainty_report(a, b, state, saturation_tol)
        if report.gap > saturation_tol:
            log.warning(
                "dropping eigenspace at z=%s (lambda=%s, dim %d): gap %.3e exceeds %.1e",
                z, lam, k, report.gap, saturation_tol,
            )
            continue
        families.append(SaturatingFamily(lam, z, basis, state, report))
    return families


def scan_lambda(
    a: HermitianOperator,
    b: HermitianOperator,
    lambdas: Sequence[float],
    kernel_tol: float = KERNEL_TOL,
    cluster_tol: float = CLUSTER_TOL,
    saturation_tol: float = SATURATION_TOL,
    probe_eigenvalues: Iterable[complex] = (),
) -> list[SaturatingFamily]:
    """Run :func:`find_saturating_mixed_states` over a grid of λ values.

    Families with the same λ and eigenvalue (within ``cluster_tol``) are
    reported once.
    """
    lambdas = [float(x) for x in lambdas]
    if any(x == 0 for x in lambdas):
        raise InputError("lambda grid must not contain 0")
    probes = list(probe_eigenvalues)
    out: list[SaturatingFamily] = []
    for lam in lambdas:
        for fam in find_saturating_mixed_states(
            a, b, lam, kernel_tol, cluster_tol, saturation_tol, probes
        ):
            dup = any(
                abs(f.lam - fam.lam) <= cluster_tol and abs(f.eigenvalue - fam.eigenvalue) <= cluster_tol
                for f in out
            )
            if not dup:
                out.append(fam)
    return out
