"""Secrecy-rate functionals and the checkers built on them.

Covers the proper and general (augmented) rates, degradedness, the
Fischer-like four-block inequality, pointwise dominance of proper signaling
on degraded channels, and the min-max objective with correlated noises.

All values are in nats; unit conversion happens at the reporting layer.
"""

from __future__ import annotations

import logging
import math
from typing import Tuple

import numpy as np
import scipy.linalg

from . import config
from .augmented import augment_channel, validate_augmented
from .errors import DimensionError, InfeasibleNoiseCorrelation, NotDegraded, NotPositiveSemidefinite, PartitionError
from .matrix_core import (
    as_matrix,
    as_square,
    complex_gaussian_entropy,
    eigenvalues,
    hermitian_inv_sqrt,
    hermitian_sqrt,
    hermitize,
    is_psd,
    logdet_pd,
    principal_submatrix,
    psd_tolerance,
    random_complex,
    random_pd,
    submatrix,
)
from .models import (
    AugmentedCovariance,
    ChannelPair,
    DegradednessReport,
    InequalityReport,
    NoiseCorrelation,
    PartitionSpec,
    RateValue,
)

log = logging.getLogger(__name__)


# ---------- Rates ----------

def logdet_gain(H: np.ndarray, K: np.ndarray) -> float:
    """log det(I + H K H^H)."""
    return logdet_pd(np.eye(H.shape[0]) + H @ K @ H.conj().T)


def _check_covariance(ch: ChannelPair, K) -> np.ndarray:
    K = as_square(K, "K")
    if K.shape[0] != ch.n_t:
        raise DimensionError(f"K must be {ch.n_t}x{ch.n_t}, got {K.shape}")
    K = hermitize(K)
    if not is_psd(K):
        raise NotPositiveSemidefinite("transmit covariance must be PSD")
    return K


def proper_rate(ch: ChannelPair, K) -> RateValue:
    K = _check_covariance(ch, K)
    return RateValue(logdet_gain(ch.H_r, K) - logdet_gain(ch.H_e, K))


def general_rate(ch: ChannelPair, aug: AugmentedCovariance) -> RateValue:
    aug = validate_augmented(aug.K, aug.K_tilde)
    if aug.n != ch.n_t:
        raise DimensionError(f"covariance dimension {aug.n} does not match n_t={ch.n_t}")
    K_aug = aug.matrix
    value = 0.5 * (logdet_gain(augment_channel(ch.H_r), K_aug) - logdet_gain(augment_channel(ch.H_e), K_aug))
    return RateValue(value)


# ---------- Degradedness and the determinant inequality ----------

def degradedness(ch: ChannelPair) -> DegradednessReport:
    delta = hermitize(ch.H_r.conj().T @ ch.H_r - ch.H_e.conj().T @ ch.H_e)
    w = eigenvalues(delta)
    return DegradednessReport(
        delta=delta,
        min_eig=float(w[0]),
        max_eig=float(w[-1]),
        is_degraded=bool(w[0] > psd_tolerance(delta)),
    )


def augmented_degradedness(ch: ChannelPair) -> np.ndarray:
    """blockdiag(Delta, Delta*)."""
    delta = degradedness(ch).delta
    return scipy.linalg.block_diag(delta, delta.conj())


def _fischer_logs(K: np.ndarray, part: PartitionSpec) -> Tuple[float, float]:
    s1, s2, s3, s4 = part.blocks()
    log_lhs = logdet_pd(K) - logdet_pd(principal_submatrix(K, np.concatenate([s2, s4])))
    log_rhs = (
        logdet_pd(principal_submatrix(K, np.concatenate([s1, s2])))
        - logdet_pd(principal_submatrix(K, s2))
        + logdet_pd(principal_submatrix(K, np.concatenate([s3, s4])))
        - logdet_pd(principal_submatrix(K, s4))
    )
    return log_lhs, log_rhs


def fischer_like(K, part: PartitionSpec) -> InequalityReport:
    """det(K)/det(K(S2+S4)) <= det(K(S1+S2))/det(K(S2)) * det(K(S3+S4))/det(K(S4)).

    Equality holds iff the cross block K(S1+S2, S3+S4) vanishes.
    """
    K = hermitize(as_square(K, "K"))
    if K.shape[0] != part.k:
        raise PartitionError(f"partition covers {part.k} indices but K has dimension {K.shape[0]}")
    log_lhs, log_rhs = _fischer_logs(K, part)
    lhs, rhs = math.exp(log_lhs), math.exp(log_rhs)
    s1, s2, s3, s4 = part.blocks()
    cross = submatrix(K, np.concatenate([s1, s2]), np.concatenate([s3, s4]))
    return InequalityReport(
        lhs=lhs,
        rhs=rhs,
        holds=bool(lhs <= rhs + config.INEQUALITY_SLACK * max(1.0, abs(rhs))),
        equality_gap=log_rhs - log_lhs,
        cross_block_norm=float(np.linalg.norm(cross)),
    )


def conditional_entropy_gap(K, part: PartitionSpec) -> float:
    """h(X1|X2) + h(X3|X4) - h(X1,X3|X2,X4) for X ~ CN(0, K), in nats.

    Independent route to the Fischer-like log gap through Gaussian entropies.
    """
    K = hermitize(as_square(K, "K"))
    s1, s2, s3, s4 = part.blocks()

    def h(*blocks: np.ndarray) -> float:
        return complex_gaussian_entropy(principal_submatrix(K, np.concatenate(blocks)))

    h1_given_2 = h(s1, s2) - h(s2)
    h3_given_4 = h(s3, s4) - h(s4)
    h13_given_24 = h(s1, s2, s3, s4) - h(s2, s4)
    return h1_given_2 + h3_given_4 - h13_given_24


def degraded_dominance(ch: ChannelPair, aug: AugmentedCovariance) -> Tuple[RateValue, RateValue]:
    """(R_g(K, K~), R_p(K)); on a degraded channel the first never exceeds the second."""
    report = degradedness(ch)
    if not report.is_degraded:
        raise NotDegraded(f"channel is not degraded (min eigenvalue of Delta {report.min_eig:.4g})")
    general = general_rate(ch, aug)
    proper = proper_rate(ch, aug.K)
    if general.value > proper.value + 1e-9:
        log.warning("dominance violated: general %.12g > proper %.12g", general.value, proper.value)
    return general, proper


# ---------- Correlated noises and the min-max objective ----------

def _level_A(nc: NoiseCorrelation, augmented: bool) -> np.ndarray:
    return nc.augmented if augmented else nc.A


def noise_feasibility_margin(nc: NoiseCorrelation, augmented: bool = True) -> float:
    A = _level_A(nc, augmented)
    return float(eigenvalues(np.eye(A.shape[0]) - A @ A.conj().T)[0])


def _check_noise(nc: NoiseCorrelation, augmented: bool = True) -> np.ndarray:
    margin = noise_feasibility_margin(nc, augmented)
    if margin < config.NOISE_MARGIN:
        raise InfeasibleNoiseCorrelation(f"I - AA^H must be positive definite (min eigenvalue {margin:.3e})")
    return _level_A(nc, augmented)


def noise_covariance(nc: NoiseCorrelation, augmented: bool = True) -> np.ndarray:
    """Q = [[I, A], [A^H, I]] at the chosen level."""
    A = _level_A(nc, augmented)
    n_r, n_e = A.shape
    return np.block([[np.eye(n_r), A], [A.conj().T, np.eye(n_e)]])


def udl_factors(nc: NoiseCorrelation, augmented: bool = True) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Q = U D U^H with U = [[I, A], [0, I]] and D = diag(I - AA^H, I)."""
    A = _check_noise(nc, augmented)
    n_r, n_e = A.shape
    U = np.block([[np.eye(n_r), A], [np.zeros((n_e, n_r)), np.eye(n_e)]])
    D = scipy.linalg.block_diag(np.eye(n_r) - A @ A.conj().T, np.eye(n_e))
    return U, D, U.conj().T


def udl_inverse(nc: NoiseCorrelation, augmented: bool = True) -> np.ndarray:
    """Q^-1 = [[I, 0], [-A^H, I]] diag((I - AA^H)^-1, I) [[I, -A], [0, I]]."""
    A = _check_noise(nc, augmented)
    n_r, n_e = A.shape
    left = np.block([[np.eye(n_r), np.zeros((n_r, n_e))], [-A.conj().T, np.eye(n_e)]])
    S_inv = np.linalg.inv(np.eye(n_r) - A @ A.conj().T)
    middle = scipy.linalg.block_diag(hermitize(S_inv), np.eye(n_e))
    right = np.block([[np.eye(n_r), -A], [np.zeros((n_e, n_r)), np.eye(n_e)]])
    return left @ middle @ right


def effective_channel(H_r: np.ndarray, H_e: np.ndarray, A: np.ndarray) -> np.ndarray:
    """F = [(I - AA^H)^(-1/2) (H_r - A H_e); H_e], so that H^H Q^-1 H = F^H F."""
    S = np.eye(A.shape[0]) - A @ A.conj().T
    return np.vstack([hermitian_inv_sqrt(S) @ (H_r - A @ H_e), H_e])


def effective_matrix(ch: ChannelPair, nc: NoiseCorrelation, augmented: bool = True) -> np.ndarray:
    """(H_r^H - H_e^H A^H)(I - AA^H)^-1 (H_r - A H_e) + H_e^H H_e."""
    A = _check_noise(nc, augmented)
    H_r = augment_channel(ch.H_r) if augmented else ch.H_r
    H_e = augment_channel(ch.H_e) if augmented else ch.H_e
    G = H_r - A @ H_e
    S = np.eye(A.shape[0]) - A @ A.conj().T
    return hermitize(G.conj().T @ np.linalg.solve(S, G) + H_e.conj().T @ H_e)


def minmax_objective(ch: ChannelPair, nc: NoiseCorrelation, aug: AugmentedCovariance) -> RateValue:
    """(1/2)[log det(I + F K_aug F^H) - log det(I + H_e,aug K_aug H_e,aug^H)] with augmented F."""
    A_aug = _check_noise(nc, augmented=True)
    if A_aug.shape != (2 * ch.n_r, 2 * ch.n_e):
        raise DimensionError(f"noise correlation must be {ch.n_r}x{ch.n_e}, got {nc.A.shape}")
    aug = validate_augmented(aug.K, aug.K_tilde)
    H_e = augment_channel(ch.H_e)
    F = effective_channel(augment_channel(ch.H_r), H_e, A_aug)
    K_aug = aug.matrix
    return RateValue(0.5 * (logdet_gain(F, K_aug) - logdet_gain(H_e, K_aug)))


def proper_minmax_objective(ch: ChannelPair, A, K) -> RateValue:
    """log det(I + Q^-1 H K H^H) - log det(I + H_e K H_e^H), H = [H_r; H_e].

    Evaluated as log det(Q + H K H^H) - log det(Q) so it shares no code path
    with the augmented objective.
    """
    nc = NoiseCorrelation(as_matrix(A, "A"))
    if nc.A.shape != (ch.n_r, ch.n_e):
        raise DimensionError(f"A must be {ch.n_r}x{ch.n_e}, got {nc.A.shape}")
    _check_noise(nc, augmented=False)
    K = _check_covariance(ch, K)
    Q = noise_covariance(nc, augmented=False)
    H = ch.stacked
    value = logdet_pd(Q + H @ K @ H.conj().T) - logdet_pd(Q) - logdet_gain(ch.H_e, K)
    return RateValue(value)


# ---------- Random instances for sweeps ----------

def random_channel(rng: np.random.Generator, n_t: int, n_r: int, n_e: int) -> ChannelPair:
    return ChannelPair(random_complex(rng, n_r, n_t), random_complex(rng, n_e, n_t))


def random_degraded_channel(rng: np.random.Generator, n_t: int, n_e: int) -> ChannelPair:
    """H_r is n_t x n_t with H_r^H H_r = H_e^H H_e + D for a random PD D."""
    H_e = random_complex(rng, n_e, n_t)
    D = random_pd(rng, n_t, floor=0.2)
    H_r = hermitian_sqrt(H_e.conj().T @ H_e + D)
    return ChannelPair(H_r, H_e)


def random_noise_correlation(rng: np.random.Generator, n_r: int, n_e: int, radius: float = 0.9, pseudo: bool = False) -> NoiseCorrelation:
    """Random feasible (A, B) with the augmented spectral norm at most `radius`."""
    A = random_complex(rng, n_r, n_e)
    B = random_complex(rng, n_r, n_e) if pseudo else np.zeros((n_r, n_e), dtype=complex)
    nc = NoiseCorrelation(A, B)
    norm = np.linalg.norm(nc.augmented, 2)
    scale = radius * rng.uniform(0.1, 1.0) / max(norm, 1e-12)
    return NoiseCorrelation(A * scale, B * scale)
