"""Direct numerical search for mixed states that saturate the uncertainty relation.

This is deliberately independent of the eigenspace construction in
:mod:`minuncert.counterexample`: it parametrizes ``ρ = LL†/tr(LL†)`` with a
``dim × rank`` complex factor ``L`` and minimizes

    f(L) = gap(ρ) + w · max(0, tr ρ² - purity_max)²

with a limited-memory quasi-Newton direction and Armijo backtracking.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import subspace_angles

from .errors import DimensionError, InputError, NumericalError
from .operator_core import (
    SATURATION_TOL,
    DensityMatrix,
    HermitianOperator,
    UncertaintyReport,
    uncertainty_report,
)

log = logging.getLogger(__name__)

PURITY_SLACK = 1e-6
KINK_RADIUS = 1e-7
GRADIENT_CHECK_TOL = 1e-4
_HISTORY = 10
_ARMIJO = 1e-4


@dataclass(frozen=True)
class SearchConfig:
    rank: int = 2
    purity_max: float = 0.9
    penalty_weight: float = 10.0
    max_iters: int = 5000
    step_tol: float = 1e-14
    gap_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.rank < 2:
            raise InputError("rank must be at least 2; a rank-1 state is pure")
        if not 0 < self.purity_max < 1:
            raise InputError("purity_max must lie in (0, 1)")
        if not self.penalty_weight > 0:
            raise InputError("penalty_weight must be positive")
        if self.max_iters < 0:
            raise InputError("max_iters must be non-negative")
        if not (self.step_tol > 0 and self.gap_tol > 0):
            raise InputError("step_tol and gap_tol must be positive")

    def validate_for(self, dim: int) -> None:
        if self.rank > dim:
            raise InputError(f"rank {self.rank} exceeds the dimension {dim}")
        if self.purity_max < 1 / dim:
            raise InputError(f"purity_max {self.purity_max} is below the minimum 1/{dim}")


@dataclass(frozen=True, eq=False)
class SearchResult:
    state: DensityMatrix
    report: UncertaintyReport
    objective_trace: list[float] = field(repr=False)
    converged: bool
    iterations: int
    method: str = "gradient"


class _Objective:
    """``f`` and its gradient with respect to the complex factor ``L``."""

    def __init__(self, a: HermitianOperator, b: HermitianOperator, cfg: SearchConfig):
        if a.dim != b.dim:
            raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
        self.a = a.matrix
        self.b = b.matrix
        self.a2 = self.a @ self.a
        self.b2 = self.b @ self.b
        comm = 1j * (self.a @ self.b - self.b @ self.a)
        self.c = (comm + comm.conj().T) / 2
        self.cfg = cfg
        self.dim = a.dim

    @staticmethod
    def state(l: np.ndarray) -> np.ndarray:
        rho = l @ l.conj().T
        return rho / np.trace(rho).real

    def commutator_mean(self, l: np.ndarray) -> float:
        return float(np.real(np.sum(self.c * self.state(l).T)))

    def value(self, l: np.ndarray) -> float:
        return self.value_and_grad(l, need_grad=False)[0]

    def value_and_grad(self, l: np.ndarray, need_grad: bool = True):
        rho = self.state(l)
        ev = lambda m: float(np.real(np.sum(m * rho.T)))  # tr(mρ)
        mean_a, mean_b = ev(self.a), ev(self.b)
        var_a = max(ev(self.a2) - mean_a**2, 0.0)
        var_b = max(ev(self.b2) - mean_b**2, 0.0)
        sd_a, sd_b = np.sqrt(var_a), np.sqrt(var_b)
        comm = ev(self.c)
        pur = float(np.sum(np.abs(rho) ** 2))
        excess = max(0.0, pur - self.cfg.purity_max)
        f = sd_a * sd_b - 0.5 * abs(comm) + self.cfg.penalty_weight * excess**2
        if not np.isfinite(f):
            raise NumericalError("objective is not finite")
        if not need_grad:
            return f, None
        tiny = 1e-150
        g_var_a = self.a2 - 2 * mean_a * self.a
        g_var_b = self.b2 - 2 * mean_b * self.b
        sign = 1.0 if comm >= 0 else -1.0  # subgradient choice sign(0) = +1
        g = (
            (sd_b / (2 * max(sd_a, tiny))) * g_var_a
            + (sd_a / (2 * max(sd_b, tiny))) * g_var_b
            - 0.5 * sign * self.c
            + 4 * self.cfg.penalty_weight * excess * rho
        )
        t = float(np.real(np.vdot(l, l)))
        g_centered = g - np.real(np.sum(g * rho.T)) * np.eye(self.dim)
        grad = (2 / t) * (g_centered @ l)
        return f, grad


def _to_real(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real.ravel(), z.imag.ravel()])


def _to_complex(x: np.ndarray, shape) -> np.ndarray:
    n = x.size // 2
    return (x[:n] + 1j * x[n:]).reshape(shape)


def _random_directions(shape, n: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for _ in range(n):
        d = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        out.append(d / np.linalg.norm(d))
    return out


def gradient_check(
    a: HermitianOperator,
    b: HermitianOperator,
    l: np.ndarray,
    h: float = 1e-5,
    cfg: SearchConfig | None = None,
    n_directions: int = 20,
    seed: int = 0,
) -> float:
    """Largest relative deviation between analytic and central-difference
    directional derivatives of the objective over random unit directions.

    Deviations are measured relative to ``‖∇f‖`` (an upper bound on every
    unit directional derivative), so directions nearly orthogonal to the
    gradient do not inflate the figure with round-off.  Directions whose
    difference stencil comes within ``KINK_RADIUS`` of ``⟨i[A,B]⟩ = 0``, where
    ``f`` is not differentiable, are skipped.
    """
    if not 1e-8 <= h <= 1e-3:
        raise InputError("h must lie in [1e-8, 1e-3]")
    obj = _Objective(a, b, cfg or SearchConfig(rank=max(2, np.shape(l)[1])))
    l = np.asarray(l, dtype=np.complex128)
    f0, grad = obj.value_and_grad(l)
    gnorm = float(np.linalg.norm(grad))
    worst = 0.0
    has_kink = np.linalg.norm(obj.c) > 0
    for d in _random_directions(l.shape, n_directions, np.random.default_rng(seed)):
        if has_kink:
            comms = [obj.commutator_mean(l + t * d) for t in (-h, 0.0, h)]
            if min(abs(c) for c in comms) < KINK_RADIUS or len({c > 0 for c in comms}) > 1:
                continue
        analytic = float(np.real(np.vdot(grad, d)))
        fd = (obj.value(l + h * d) - obj.value(l - h * d)) / (2 * h)
        denom = max(gnorm, abs(fd), 1e-12 * max(1.0, abs(f0)))
        worst = max(worst, abs(analytic - fd) / denom)
    return worst


def directional_derivatives(
    a: HermitianOperator,
    b: HermitianOperator,
    l: np.ndarray,
    cfg: SearchConfig | None = None,
    n_directions: int = 20,
    seed: int = 0,
) -> np.ndarray:
    """Analytic directional derivatives of the objective at ``l``."""
    obj = _Objective(a, b, cfg or SearchConfig(rank=max(2, np.shape(l)[1])))
    _, grad = obj.value_and_grad(np.asarray(l, dtype=np.complex128))
    dirs = _random_directions(np.shape(l), n_directions, np.random.default_rng(seed))
    return np.array([float(np.real(np.vdot(grad, d))) for d in dirs])


def objective(a: HermitianOperator, b: HermitianOperator, l: np.ndarray, cfg: SearchConfig | None = None) -> float:
    obj = _Objective(a, b, cfg or SearchConfig(rank=max(2, np.shape(l)[1])))
    return obj.value(np.asarray(l, dtype=np.complex128))


def _lbfgs_direction(g: np.ndarray, s_hist: list, y_hist: list) -> np.ndarray:
    q = g.copy()
    alphas = []
    for s, y in reversed(list(zip(s_hist, y_hist))):
        rho = 1.0 / np.dot(y, s)
        alpha = rho * np.dot(s, q)
        q -= alpha * y
        alphas.append((rho, alpha))
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= np.dot(s, y) / np.dot(y, y)
    for (s, y), (rho, alpha) in zip(zip(s_hist, y_hist), reversed(alphas)):
        beta = rho * np.dot(y, q)
        q += (alpha - beta) * s
    return -q


def search_saturating_state(
    a: HermitianOperator,
    b: HermitianOperator,
    cfg: SearchConfig | None = None,
    saturation_tol: float = SATURATION_TOL,
) -> SearchResult:
    """Minimize the uncertainty gap over rank-capped mixed states.

    Failure to converge is a result, not an error: the best state found is
    returned with ``converged=False``.
    """
    cfg = cfg or SearchConfig()
    obj = _Objective(a, b, cfg)
    cfg.validate_for(obj.dim)
    rng = np.random.default_rng(cfg.seed)
    shape = (obj.dim, cfg.rank)
    l = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    l /= np.linalg.norm(l)

    def done(l_: np.ndarray) -> bool:
        rho = DensityMatrix(obj.state(l_))
        rep = uncertainty_report(a, b, rho, saturation_tol)
        return rep.gap <= cfg.gap_tol and rep.purity <= cfg.purity_max + PURITY_SLACK

    deviation = gradient_check(a, b, l, 1e-5, cfg, seed=cfg.seed)
    if deviation > GRADIENT_CHECK_TOL:
        log.info("gradient check failed at start (%.2e); using coordinate search", deviation)
        l, trace_, iters = _coordinate_search(obj, l, cfg, done)
        method = "coordinate"
    else:
        l, trace_, iters = _quasi_newton(obj, l, cfg, done)
        method = "gradient"

    state = DensityMatrix(obj.state(l))
    report = uncertainty_report(a, b, state, saturation_tol)
    converged = report.gap <= cfg.gap_tol and report.purity <= cfg.purity_max + PURITY_SLACK
    return SearchResult(state, report, trace_, converged, iters, method)


def _quasi_newton(obj: _Objective, l: np.ndarray, cfg: SearchConfig, done):
    shape = l.shape
    x = _to_real(l)
    f, g_c = obj.value_and_grad(l)
    g = _to_real(g_c)
    trace_ = [f]
    s_hist: list = []
    y_hist: list = []
    step = 1.0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        d = _lbfgs_direction(g, s_hist, y_hist)
        slope = float(np.dot(g, d))
        if not slope < 0:
            s_hist.clear()
            y_hist.clear()
            d = -g
            slope = -float(np.dot(g, g))
        step = 1.0 if s_hist else min(1.0, 1.0 / max(np.linalg.norm(g), 1e-300))
        accepted = False
        while step * np.linalg.norm(d) > cfg.step_tol:
            x_new = x + step * d
            l_new = _to_complex(x_new, shape)
            f_new = obj.value(l_new)
            if f_new <= f + _ARMIJO * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            it -= 1
            break
        DensityMatrix(obj.state(l_new))  # every iterate must be a valid state
        _, g_new_c = obj.value_and_grad(l_new)
        g_new = _to_real(g_new_c)
        s, y = x_new - x, g_new - g
        if np.dot(s, y) > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > _HISTORY:
                s_hist.pop(0)
                y_hist.pop(0)
        # keep the factor at unit norm; f is invariant under L -> cL
        norm = np.linalg.norm(x_new)
        x, f, g = x_new / norm, f_new, g_new * norm
        s_hist = [s_ / norm for s_ in s_hist]
        y_hist = [y_ * norm for y_ in y_hist]
        trace_.append(f)
        if done(_to_complex(x, shape)):
            break
    return _to_complex(x, shape), trace_, it


def _coordinate_search(obj: _Objective, l: np.ndarray, cfg: SearchConfig, done):
    shape = l.shape
    x = _to_real(l)
    f = obj.value(l)
    trace_ = [f]
    h = 0.1
    it = 0
    while it < cfg.max_iters and h > cfg.step_tol:
        it += 1
        improved = False
        for i in range(x.size):
            for sgn in (1.0, -1.0):
                trial = x.copy()
                trial[i] += sgn * h
                f_t = obj.value(_to_complex(trial, shape))
                if f_t < f:
                    x, f, improved = trial, f_t, True
                    break
        if improved:
            DensityMatrix(obj.state(_to_complex(x, shape)))
            trace_.append(f)
            if done(_to_complex(x, shape)):
                break
        else:
            h /= 2
    return _to_complex(x, shape), trace_, it


def state_support(state: DensityMatrix, tol: float = 1e-6) -> np.ndarray:
    """Orthonormal columns spanning the eigenvectors of ρ with eigenvalue > tol."""
    evals, evecs = np.linalg.eigh(state.matrix)
    return evecs[:, evals > tol]


def principal_angle(u: np.ndarray, v: np.ndarray) -> float:
    """Largest principal angle between the column spans of ``u`` and ``v``."""
    return float(np.max(subspace_angles(np.asarray(u), np.asarray(v))))
