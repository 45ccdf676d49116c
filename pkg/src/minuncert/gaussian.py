"""Displaced ground-state Gaussians and the quadratic observables ``XP + PX``
and ``(ħκX)² - P²``.

Two independent routes are provided:

* a truncated Fock space whose ladder operator ``c`` is matched to the
  Gaussian width, so that ``|±a⟩`` are exactly coherent states with
  amplitude ``β = ±a·sqrt(κ/2)``;
* closed-form moments obtained by normal ordering words in ``c, c†`` and
  evaluating them on a coherent state.

With ``X = (c + c†)/sqrt(2κ)`` and ``P = -iħ·sqrt(κ/2)·(c - c†)`` one has
``[X, P] = iħ`` and ``ħκX + iP = ħ·sqrt(2κ)·c``.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import poisson

from .errors import InputError, TruncationError
from .operator_core import DensityMatrix, HermitianOperator

log = logging.getLogger(__name__)

TAIL_TOL = 1e-10


@dataclass(frozen=True)
class GaussianParams:
    a: float = 1.0
    kappa: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.a):
            raise InputError("displacement a must be finite")
        if not (self.kappa > 0 and np.isfinite(self.kappa)):
            raise InputError("kappa must be positive")
        if not (self.hbar > 0 and np.isfinite(self.hbar)):
            raise InputError("hbar must be positive")

    @property
    def beta(self) -> float:
        """Coherent amplitude of ``|a⟩``."""
        return self.a * np.sqrt(self.kappa / 2)


@dataclass(frozen=True)
class FockTruncation:
    n_max: int = 64
    convergence_margin: int = 8

    def __post_init__(self):
        if self.n_max < 2:
            raise InputError("n_max must be at least 2")
        if not 0 <= self.convergence_margin < self.n_max:
            raise InputError("convergence_margin must lie in [0, n_max)")


def tail_weight(p: GaussianParams, t: FockTruncation) -> float:
    """Weight of ``|a⟩`` on number states ``n >= n_max - convergence_margin``."""
    cutoff = t.n_max - t.convergence_margin
    return float(poisson.sf(cutoff - 1, p.beta**2))


def required_fock_dim(p: GaussianParams, convergence_margin: int = 8, tail_tol: float = TAIL_TOL) -> int:
    """Smallest ``n_max`` that passes the tail-weight guard for ``p``."""
    mu = p.beta**2
    cutoff = 1
    while poisson.sf(cutoff - 1, mu) >= tail_tol:
        cutoff += 1
    return max(cutoff + convergence_margin, 2, convergence_margin + 1)


def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n)), 1).astype(np.complex128)


def quadrature_ops(p: GaussianParams, t: FockTruncation) -> tuple[HermitianOperator, HermitianOperator]:
    """Position and momentum on the first ``n_max`` number states.

    ``[X, P] = iħ`` holds exactly except in the last row and column.
    """
    c = annihilation(t.n_max)
    cd = c.conj().T
    x = (c + cd) / np.sqrt(2 * p.kappa)
    mom = -1j * p.hbar * np.sqrt(p.kappa / 2) * (c - cd)
    return HermitianOperator(x), HermitianOperator(mom)


def quadratic_observables(p: GaussianParams, t: FockTruncation) -> tuple[HermitianOperator, HermitianOperator]:
    """``A = XP + PX`` and ``B = (ħκX)² - P²`` from the truncated quadratures."""
    x, mom = quadrature_ops(p, t)
    xm, pm = x.matrix, mom.matrix
    a = xm @ pm + pm @ xm
    hk = p.hbar * p.kappa
    b = hk**2 * (xm @ xm) - pm @ pm
    # products of exactly hermitian matrices are hermitian up to round-off only
    return HermitianOperator((a + a.conj().T) / 2), HermitianOperator((b + b.conj().T) / 2)


def displaced_gaussian(p: GaussianParams, sign: int, t: FockTruncation) -> np.ndarray:
    """Number-state amplitudes of ``|±a⟩``, renormalized after truncation.

    Raises
    ------
    TruncationError
        If the weight beyond ``n_max - convergence_margin`` is not below 1e-10.
    """
    if sign not in (1, -1):
        raise InputError("sign must be +1 or -1")
    tail = tail_weight(p, t)
    if tail >= TAIL_TOL:
        raise TruncationError(
            f"n_max={t.n_max} too small for a={p.a}, kappa={p.kappa}: tail weight {tail:.2e}; "
            f"need n_max >= {required_fock_dim(p, t.convergence_margin)}"
        )
    beta = sign * p.beta
    amps = np.empty(t.n_max, dtype=np.complex128)
    amps[0] = np.exp(-(beta**2) / 2)
    for n in range(1, t.n_max):
        amps[n] = amps[n - 1] * beta / np.sqrt(n)
    return amps / np.linalg.norm(amps)


def coherent_eigenvalue(p: GaussianParams) -> complex:
    """Eigenvalue of ``A + iλB`` at ``λ = -1/(ħκ)`` shared by ``|a⟩`` and ``|-a⟩``.

    At that λ the operator equals ``-2iħc²``, and ``c²|±a⟩ = β²|±a⟩``.
    """
    return -1j * p.hbar * p.kappa * p.a**2


def saturating_lambda(p: GaussianParams) -> float:
    return -1.0 / (p.hbar * p.kappa)


def gaussian_mixture_example(
    p: GaussianParams | None = None, t: FockTruncation | None = None
) -> tuple[HermitianOperator, HermitianOperator, DensityMatrix]:
    """``A``, ``B`` and ``ρ = ½(|a⟩⟨a| + |-a⟩⟨-a|)`` in the Fock truncation.

    The two components are not orthogonal; ρ is their literal average.  For
    ``a = 0`` both components coincide and ρ is pure.
    """
    p = p or GaussianParams()
    t = t or FockTruncation()
    if p.a == 0:
        log.info("a = 0: the mixture degenerates to the pure ground state")
    a_op, b_op = quadratic_observables(p, t)
    plus = displaced_gaussian(p, +1, t)
    minus = displaced_gaussian(p, -1, t)
    rho = DensityMatrix.from_mixture([plus, minus], [0.5, 0.5])
    return a_op, b_op, rho


def mixture_purity_exact(p: GaussianParams) -> float:
    """``(1 + e^{-2κa²})/2`` from the overlap ``⟨a|-a⟩ = e^{-κa²}``."""
    return 0.5 * (1.0 + np.exp(-2 * p.kappa * p.a**2))


# --------------------------------------------------------------------------
# normal ordering
# --------------------------------------------------------------------------

# A ladder polynomial is a dict mapping words to coefficients.  A word is a
# tuple over {0, 1}: 0 is c, 1 is c†, read left to right.
_C, _CD = 0, 1


def _mul(p1: dict, p2: dict) -> dict:
    out: dict = defaultdict(complex)
    for w1, k1 in p1.items():
        for w2, k2 in p2.items():
            out[w1 + w2] += k1 * k2
    return dict(out)


def _lin(*terms: tuple[complex, dict]) -> dict:
    out: dict = defaultdict(complex)
    for k, poly in terms:
        for w, v in poly.items():
            out[w] += k * v
    return dict(out)


def normal_order(poly: dict) -> dict:
    """Rewrite every word with all ``c†`` left of all ``c`` using ``c c† = c† c + 1``."""
    out: dict = defaultdict(complex)
    stack = list(poly.items())
    while stack:
        word, coeff = stack.pop()
        if coeff == 0:
            continue
        for i in range(len(word) - 1):
            if word[i] == _C and word[i + 1] == _CD:
                swapped = word[:i] + (_CD, _C) + word[i + 2 :]
                contracted = word[:i] + word[i + 2 :]
                stack.append((swapped, coeff))
                stack.append((contracted, coeff))
                break
        else:
            out[word] += coeff
    return {w: v for w, v in out.items() if v != 0}


def coherent_expectation(poly: dict, beta: complex) -> complex:
    """``⟨β|poly|β⟩`` for a normally ordered or arbitrary ladder polynomial."""
    total = 0j
    for word, coeff in normal_order(poly).items():
        n_cd = sum(1 for s in word if s == _CD)
        total += coeff * np.conj(beta) ** n_cd * beta ** (len(word) - n_cd)
    return complex(total)


def _ladder_observables(p: GaussianParams) -> dict[str, dict]:
    c = {(_C,): 1.0}
    cd = {(_CD,): 1.0}
    x = _lin((1 / np.sqrt(2 * p.kappa), c), (1 / np.sqrt(2 * p.kappa), cd))
    mom = _lin((-1j * p.hbar * np.sqrt(p.kappa / 2), c), (1j * p.hbar * np.sqrt(p.kappa / 2), cd))
    hk = p.hbar * p.kappa
    a_op = _lin((1, _mul(x, mom)), (1, _mul(mom, x)))
    b_op = _lin((hk**2, _mul(x, x)), (-1, _mul(mom, mom)))
    comm = _lin((1j, _mul(a_op, b_op)), (-1j, _mul(b_op, a_op)))
    return {
        "x": x,
        "p": mom,
        "x2": _mul(x, x),
        "p2": _mul(mom, mom),
        "a": a_op,
        "a2": _mul(a_op, a_op),
        "b": b_op,
        "b2": _mul(b_op, b_op),
        "i_comm": comm,
    }


@dataclass(frozen=True)
class MomentTable:
    """Expectation values in one state, plus the derived uncertainty ingredients."""

    mean_x: float
    mean_p: float
    mean_x2: float
    mean_p2: float
    mean_a: float
    mean_a2: float
    mean_b: float
    mean_b2: float
    mean_i_comm: float

    @property
    def spread_a(self) -> float:
        return float(np.sqrt(max(0.0, self.mean_a2 - self.mean_a**2)))

    @property
    def spread_b(self) -> float:
        return float(np.sqrt(max(0.0, self.mean_b2 - self.mean_b**2)))

    @property
    def product(self) -> float:
        return self.spread_a * self.spread_b

    @property
    def bound(self) -> float:
        return 0.5 * abs(self.mean_i_comm)

    @property
    def gap(self) -> float:
        return self.product - self.bound

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(spread_a=self.spread_a, spread_b=self.spread_b, product=self.product,
                 bound=self.bound, gap=self.gap)
        return d


def _table(values: dict[str, complex]) -> MomentTable:
    for k, v in values.items():
        if abs(v.imag) > 1e-9 * max(1.0, abs(v.real)):
            raise AssertionError(f"moment {k} came out complex: {v}")
    return MomentTable(*(float(values[k].real) for k in
                         ("x", "p", "x2", "p2", "a", "a2", "b", "b2", "i_comm")))


def gaussian_moments_exact(p: GaussianParams) -> dict[str, MomentTable]:
    """Closed-form moments for ``|a⟩``, ``|-a⟩`` and their equal-weight mixture.

    Mixture moments are the plain average of the component moments, since ρ
    is linear in the components.  ``A`` and ``B`` are parity-even, so their
    moments agree between the components; ``X`` is odd and averages to zero.
    """
    ops = _ladder_observables(p)
    plus = {k: coherent_expectation(v, p.beta) for k, v in ops.items()}
    minus = {k: coherent_expectation(v, -p.beta) for k, v in ops.items()}
    mix = {k: 0.5 * (plus[k] + minus[k]) for k in ops}
    return {"plus": _table(plus), "minus": _table(minus), "mixture": _table(mix)}


def closed_form_bound(p: GaussianParams) -> float:
    """``½|⟨i[A,B]⟩| = ħ³κ(2κa² + 2)`` for either component and for the mixture."""
    return p.hbar**3 * p.kappa * (2 * p.kappa * p.a**2 + 2)
