"""Secrecy-rate maximization and the alternating min-max solver.

Two ascent families are available for every maximization:

* ``projected-gradient``: gradient step, projection onto
  {PSD, trace <= budget}, Armijo backtracking.
* ``dc-iteration``: linearize the eavesdropper log-det at the current
  iterate and maximize the resulting concave minorizer by the same
  projected gradient, run as an inner loop.

Both are monotone, so every trace is non-decreasing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize

from . import config
from .augmented import assemble_augmented, augment_channel, make_generator, random_augmented_covariance, repair_pattern, split_augmented
from .matrix_core import as_square, hermitize, is_psd, logdet_pd, random_psd
from .errors import DimensionError, NotPositiveSemidefinite
from .models import (
    AugmentedCovariance,
    ChannelPair,
    ConvergenceTrace,
    NoiseCorrelation,
    PowerBudget,
    RateValue,
    SaddleResult,
    SolverConfig,
)
from .secrecy_rates import effective_channel

log = logging.getLogger(__name__)


# ---------- Objective ----------

# scale * [log det(I + F X F^H) - log det(I + G X G^H)]
def _inv_gain(H: np.ndarray, X: np.ndarray) -> np.ndarray:
    """H^H (I + H X H^H)^-1 H."""
    inner = np.eye(H.shape[0]) + H @ X @ H.conj().T
    return hermitize(H.conj().T @ np.linalg.solve(inner, H))


def _gain(H: np.ndarray, X: np.ndarray) -> float:
    return logdet_pd(np.eye(H.shape[0]) + H @ X @ H.conj().T)


@dataclass(frozen=True)
class LogDetGap:
    """Difference of two log-dets in a covariance X.

    `scale` is 1 for proper covariances and 1/2 for augmented ones.
    """
    F: np.ndarray
    G: np.ndarray
    scale: float = 1.0

    def value(self, X: np.ndarray) -> float:
        return self.scale * (_gain(self.F, X) - _gain(self.G, X))

    def direction(self, X: np.ndarray) -> np.ndarray:
        """Gradient divided by `scale`."""
        return _inv_gain(self.F, X) - _inv_gain(self.G, X)

    def gradient(self, X: np.ndarray) -> np.ndarray:
        return self.scale * self.direction(X)


# ---------- Gradients and projection ----------

def rate_gradient_proper(ch: ChannelPair, K) -> np.ndarray:
    """H_r^H (I + H_r K H_r^H)^-1 H_r - H_e^H (I + H_e K H_e^H)^-1 H_e."""
    K = hermitize(as_square(K, "K"))
    if K.shape[0] != ch.n_t:
        raise DimensionError(f"K must be {ch.n_t}x{ch.n_t}, got {K.shape}")
    if not is_psd(K):
        raise NotPositiveSemidefinite("gradient is defined on PSD covariances")
    return LogDetGap(ch.H_r, ch.H_e).gradient(K)


def rate_gradient_general(ch: ChannelPair, aug: AugmentedCovariance) -> np.ndarray:
    """Euclidean gradient of the augmented rate with respect to K_aug."""
    gap = LogDetGap(augment_channel(ch.H_r), augment_channel(ch.H_e), 0.5)
    return gap.gradient(aug.matrix)


def _project_trace(M: np.ndarray, total: float) -> np.ndarray:
    """Frobenius projection onto {X PSD, trace X <= total}."""
    w, V = scipy.linalg.eigh(hermitize(M))
    w = np.clip(w, 0.0, None)
    if w.sum() > total:
        shift = scipy.optimize.bisect(
            lambda mu: np.clip(w - mu, 0.0, None).sum() - total,
            0.0,
            float(w.max()),
            xtol=1e-15,
            maxiter=200,
        )
        w = np.clip(w - shift, 0.0, None)
    return hermitize((V * w) @ V.conj().T)


def project_to_budget(K_raw, budget: PowerBudget) -> np.ndarray:
    return _project_trace(as_square(K_raw, "K_raw"), budget.P)


def _augmented_projector(budget: PowerBudget, proper_only: bool) -> Callable[[np.ndarray], np.ndarray]:
    def project(X: np.ndarray) -> np.ndarray:
        Y = repair_pattern(_project_trace(X, budget.augmented_power))
        if proper_only:
            n = Y.shape[0] // 2
            Y[:n, n:] = 0.0
            Y[n:, :n] = 0.0
        return Y

    return project


# ---------- Ascent engines ----------

def _armijo_ascent(
    value: Callable[[np.ndarray], float],
    direction: Callable[[np.ndarray], np.ndarray],
    project: Callable[[np.ndarray], np.ndarray],
    weight: float,
    X0: np.ndarray,
    cfg: SolverConfig,
    tol: float,
    max_iters: int,
) -> Tuple[np.ndarray, List[float], bool]:
    X = project(X0)
    f = value(X)
    values = [f]
    step = cfg.step_init
    for it in range(1, max_iters + 1):
        D = direction(X)
        # warm start from the last accepted step, allowed to grow
        step = min(step / cfg.shrink, config.STEP_MAX)
        for attempt in range(cfg.max_backtracks):
            X_new = project(X + step * D)
            if attempt == 0 and np.linalg.norm(X_new - X) <= config.STATIONARY_TOL * max(1.0, np.linalg.norm(X)):
                return X, values, True
            f_new = value(X_new)
            predicted = weight * np.vdot(D, X_new - X).real
            if f_new >= f + cfg.armijo_c * predicted:
                break
            step *= cfg.shrink
        else:
            log.info("backtracking exhausted at iteration %d (f=%.10g)", it, f)
            return X, values, False
        increase = f_new - f
        X, f = X_new, f_new
        values.append(f)
        if increase < tol:
            return X, values, True
    return X, values, False


def _dc_ascent(
    gap: LogDetGap,
    project: Callable[[np.ndarray], np.ndarray],
    X0: np.ndarray,
    cfg: SolverConfig,
    tol: float,
    max_iters: int,
) -> Tuple[np.ndarray, List[float], bool]:
    X = project(X0)
    f = gap.value(X)
    values = [f]
    inner_tol = tol * config.INNER_TOL_FACTOR
    for it in range(1, max_iters + 1):
        B = _inv_gain(gap.G, X)

        def surrogate(Y: np.ndarray) -> float:
            return gap.scale * (_gain(gap.F, Y) - np.vdot(B, Y).real)

        def surrogate_direction(Y: np.ndarray) -> np.ndarray:
            return _inv_gain(gap.F, Y) - B

        X_new, _, _ = _armijo_ascent(
            surrogate, surrogate_direction, project, gap.scale, X, cfg, inner_tol, cfg.max_iters
        )
        f_new = gap.value(X_new)
        if f_new < f:
            # inner loop could not improve the minorizer beyond round-off
            return X, values, True
        increase = f_new - f
        X, f = X_new, f_new
        values.append(f)
        if increase < tol:
            return X, values, True
    return X, values, False


def _maximize_gap(
    gap: LogDetGap,
    project: Callable[[np.ndarray], np.ndarray],
    X0: np.ndarray,
    cfg: SolverConfig,
    tol: Optional[float] = None,
) -> Tuple[np.ndarray, List[float], bool]:
    tol = cfg.tol_increase if tol is None else tol
    if cfg.method == "dc-iteration":
        return _dc_ascent(gap, project, X0, cfg, tol, cfg.max_iters)
    return _armijo_ascent(gap.value, gap.direction, project, gap.scale, X0, cfg, tol, cfg.max_iters)


# ---------- Starting points ----------

def _proper_start(ch: ChannelPair, budget: PowerBudget, cfg: SolverConfig) -> np.ndarray:
    if cfg.random_start:
        return random_psd(make_generator(cfg.seed), ch.n_t, trace=budget.P)
    return (budget.P / ch.n_t) * np.eye(ch.n_t, dtype=complex)


def _general_start(ch: ChannelPair, budget: PowerBudget, cfg: SolverConfig) -> np.ndarray:
    if cfg.improper_start:
        aug = random_augmented_covariance(make_generator(cfg.seed), ch.n_t, power=budget.P)
        return aug.matrix
    K0 = _proper_start(ch, budget, cfg)
    return assemble_augmented(K0, np.zeros_like(K0))


# ---------- Public solvers ----------

def _trace(values: List[float], point, converged: bool, cfg: SolverConfig, mode: str) -> ConvergenceTrace:
    return ConvergenceTrace(
        iterates=list(enumerate(values)),
        terminal_rate=RateValue(values[-1]),
        terminal_point=point,
        converged=converged,
        method=cfg.method,
        mode=mode,
    )


def maximize_proper(ch: ChannelPair, budget: PowerBudget, cfg: SolverConfig = SolverConfig()) -> ConvergenceTrace:
    gap = LogDetGap(ch.H_r, ch.H_e)
    K, values, converged = _maximize_gap(
        gap, lambda X: _project_trace(X, budget.P), _proper_start(ch, budget, cfg), cfg
    )
    if not converged:
        log.warning("maximize_proper hit max_iters=%d without converging", cfg.max_iters)
    log.info("proper %s: rate %.6f nats after %d iterations", cfg.method, values[-1], len(values) - 1)
    return _trace(values, K, converged, cfg, "proper")


def maximize_general(
    ch: ChannelPair,
    budget: PowerBudget,
    cfg: SolverConfig = SolverConfig(),
    proper_only: bool = False,
) -> ConvergenceTrace:
    """Ascend the augmented rate over (K, K~) jointly with trace(K_aug) <= 2P.

    With `proper_only` the pseudo-covariance is pinned to zero after every
    projection, which reproduces the proper trajectory.
    """
    gap = LogDetGap(augment_channel(ch.H_r), augment_channel(ch.H_e), 0.5)
    project = _augmented_projector(budget, proper_only)
    X0 = _general_start(ch, budget, cfg)
    if proper_only:
        X0 = project(X0)
    K_aug, values, converged = _maximize_gap(gap, project, X0, cfg)
    point = split_augmented(K_aug)
    if not converged:
        log.warning("maximize_general hit max_iters=%d without converging", cfg.max_iters)
    log.info(
        "general %s: rate %.6f nats after %d iterations, |K~|_F=%.3e",
        cfg.method, values[-1], len(values) - 1, np.linalg.norm(point.K_tilde),
    )
    return _trace(values, point, converged, cfg, "general")


# ---------- Min-max (saddle) solver ----------

def _conj_swap(X: np.ndarray) -> np.ndarray:
    """J X* J with the block swap J = [[0, I], [I, 0]] on both sides."""
    r, c = X.shape[0] // 2, X.shape[1] // 2
    Y = X.conj()
    return np.block([[Y[r:, c:], Y[r:, :c]], [Y[:r, c:], Y[:r, :c]]])


def _project_noise(A: np.ndarray, pseudo: bool) -> np.ndarray:
    """Clip singular values so that I - AA^H >= SADDLE_MARGIN * I."""
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    s = np.minimum(s, np.sqrt(1.0 - config.SADDLE_MARGIN))
    A = (U * s) @ Vh
    if pseudo:
        A = (A + _conj_swap(A)) / 2
    return A


def noise_gradient(H_r: np.ndarray, H_e: np.ndarray, A: np.ndarray, X: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Gradient in A of scale * [log det(Q + H X H^H) - log det(Q)].

    Only the objective's first term depends on A. With E = (Q + HXH^H)^-1 - Q^-1
    the gradient under the real inner product Re tr(G^H dA) is 2 * scale * E12.
    """
    n_r, n_e = A.shape
    Q = np.block([[np.eye(n_r), A], [A.conj().T, np.eye(n_e)]])
    H = np.vstack([H_r, H_e])
    E = np.linalg.inv(Q + H @ X @ H.conj().T) - np.linalg.inv(Q)
    return 2.0 * scale * E[:n_r, n_r:]


def saddle_solve(
    ch: ChannelPair,
    budget: PowerBudget,
    cfg: SolverConfig = SolverConfig(),
    pseudo: bool = False,
) -> SaddleResult:
    """min over noise correlation, max over transmit covariance.

    The outer loop is projected gradient descent on phi(A) = max_X f(A, X)
    using the gradient at the inner maximizer; every accepted outer step
    lowers phi. The inner maximization runs to tol_increase / 10 and is
    warm-started from the previous maximizer. With `pseudo` the problem is
    posed over augmented noise correlations [[A, B], [B*, A*]] and augmented
    covariances; otherwise over A and proper K.
    """
    if pseudo:
        H_r, H_e = augment_channel(ch.H_r), augment_channel(ch.H_e)
        scale = 0.5
        project_X = _augmented_projector(budget, proper_only=False)
        X = _general_start(ch, budget, cfg)
    else:
        H_r, H_e = ch.H_r, ch.H_e
        scale = 1.0
        project_X = lambda M: _project_trace(M, budget.P)  # noqa: E731
        X = _proper_start(ch, budget, cfg)

    inner_tol = cfg.tol_increase * config.INNER_TOL_FACTOR

    def inner(A: np.ndarray, X_warm: np.ndarray) -> Tuple[np.ndarray, float]:
        gap = LogDetGap(effective_channel(H_r, H_e, A), H_e, scale)
        X_opt, values, _ = _maximize_gap(gap, project_X, X_warm, cfg, tol=inner_tol)
        return X_opt, values[-1]

    A = np.zeros((H_r.shape[0], H_e.shape[0]), dtype=complex)
    X, phi = inner(A, X)
    outer_values = [phi]
    converged = False
    step = cfg.step_init
    for it in range(1, cfg.max_iters + 1):
        G = noise_gradient(H_r, H_e, A, X, scale)
        if pseudo:
            G = (G + _conj_swap(G)) / 2
        step = min(step / cfg.shrink, config.STEP_MAX)
        for _ in range(cfg.max_backtracks):
            A_new = _project_noise(A - step * G, pseudo)
            X_new, phi_new = inner(A_new, X)
            if phi_new <= phi - cfg.armijo_c * np.vdot(G, A - A_new).real:
                break
            step *= cfg.shrink
        else:
            log.info("saddle: no descent step accepted at outer iteration %d", it)
            break
        decrease = phi - phi_new
        A, X, phi = A_new, X_new, phi_new
        outer_values.append(phi)
        if decrease < cfg.tol_increase:
            converged = True
            break

    if not converged:
        log.warning("saddle_solve hit max_iters=%d without converging", cfg.max_iters)
    log.info("saddle (%s): value %.6f nats after %d outer iterations", "pseudo" if pseudo else "proper", phi, len(outer_values) - 1)

    if pseudo:
        noise = NoiseCorrelation.from_augmented(A)
        covariance = split_augmented(X)
    else:
        noise = NoiseCorrelation(A)
        covariance = X
    return SaddleResult(noise=noise, covariance=covariance, value=RateValue(phi), converged=converged, outer_values=outer_values)
