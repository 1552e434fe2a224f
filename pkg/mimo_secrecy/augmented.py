"""Second-order descriptions of complex signals.

Covers augmented covariance feasibility, channel augmentation, the
sqrt(2)-scaled real-composite transform and a seeded Gaussian sampler used
to check the statistics empirically.
"""

from __future__ import annotations

import logging
import math

import numpy as np
import scipy.linalg

from . import config
from .errors import CountError, DimensionError, InfeasibleSecondOrder, InvalidMatrix, NotSymmetric
from .matrix_core import as_matrix, as_square, hermitize, is_hermitian, logdet_pd, min_eigenvalue, psd_tolerance
from .models import AugmentedCovariance, ChannelPair, NoiseCorrelation, RealCompositeChannel, SampleBatch

log = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


def assemble_augmented(K: np.ndarray, K_tilde: np.ndarray) -> np.ndarray:
    return np.block([[K, K_tilde], [K_tilde.conj(), K.conj()]])


def validate_augmented(K, K_tilde) -> AugmentedCovariance:
    K = as_square(K, "K")
    K_tilde = as_square(K_tilde, "K_tilde")
    if K.shape != K_tilde.shape:
        raise DimensionError(f"K and K_tilde must have the same shape, got {K.shape} and {K_tilde.shape}")
    if not is_hermitian(K):
        raise InvalidMatrix("covariance K must be Hermitian")
    asym = np.max(np.abs(K_tilde - K_tilde.T), initial=0.0)
    if asym > config.TOL_SYMMETRIC:
        raise NotSymmetric(f"pseudo-covariance must be symmetric (max asymmetry {asym:.3e})")

    K = hermitize(K)
    K_tilde = (K_tilde + K_tilde.T) / 2
    aug = assemble_augmented(K, K_tilde)
    lam = min_eigenvalue(aug)
    if lam < -psd_tolerance(aug):
        raise InfeasibleSecondOrder(f"augmented covariance is not PSD (min eigenvalue {lam:.3e})")
    return AugmentedCovariance(K, K_tilde)


def proper_covariance(K) -> AugmentedCovariance:
    K = as_square(K, "K")
    return validate_augmented(K, np.zeros_like(K))


def split_augmented(K_aug: np.ndarray) -> AugmentedCovariance:
    """Read (K, K~) back from a 2n x 2n matrix, averaging out pattern drift.

    For a Hermitian PSD input the averaged matrix is PSD as well, so no
    feasibility check is repeated here.
    """
    n = K_aug.shape[0] // 2
    K = hermitize((K_aug[:n, :n] + K_aug[n:, n:].conj()) / 2)
    K_tilde = (K_aug[:n, n:] + K_aug[n:, :n].conj()) / 2
    K_tilde = (K_tilde + K_tilde.T) / 2
    return AugmentedCovariance(K, K_tilde)


def repair_pattern(K_aug: np.ndarray) -> np.ndarray:
    aug = split_augmented(K_aug)
    return assemble_augmented(aug.K, aug.K_tilde)


def augment_channel(H) -> np.ndarray:
    """blockdiag(H, H*)."""
    H = as_matrix(H, "H")
    return scipy.linalg.block_diag(H, H.conj())


def augment_noise_correlation(A, B=None) -> np.ndarray:
    """[[A, B], [B*, A*]]; B defaults to zero."""
    return NoiseCorrelation(A, B).augmented


def m_matrix(n: int) -> np.ndarray:
    """M = [[I, iI], [I, -iI]], mapping (Re x, Im x) to (x, x*); M M^H = 2I."""
    eye = np.eye(n)
    return np.block([[eye, 1j * eye], [eye, -1j * eye]])


def _composite(H: np.ndarray) -> np.ndarray:
    return SQRT2 * np.block([[H.real, -H.imag], [H.imag, H.real]])


def composite_from_augmented(H) -> np.ndarray:
    """(sqrt(2)/2) M_r^H H_aug M_t; equals the direct real-composite block form."""
    H = as_matrix(H, "H")
    n_out, n_in = H.shape
    return (SQRT2 / 2) * m_matrix(n_out).conj().T @ augment_channel(H) @ m_matrix(n_in)


def to_real_composite(ch: ChannelPair) -> RealCompositeChannel:
    return RealCompositeChannel(H_r=_composite(ch.H_r), H_e=_composite(ch.H_e))


def composite_covariance(aug: AugmentedCovariance) -> np.ndarray:
    """Real covariance of (Re X, Im X): (1/4) M^H K_aug M."""
    aug = validate_augmented(aug.K, aug.K_tilde)
    M = m_matrix(aug.n)
    K_bar = 0.25 * M.conj().T @ aug.matrix @ M
    K_bar = K_bar.real
    return (K_bar + K_bar.T) / 2


def augmented_from_composite(K_bar) -> AugmentedCovariance:
    """Inverse of composite_covariance for a real symmetric PSD K_bar."""
    K_bar = np.asarray(K_bar, dtype=float)
    n = K_bar.shape[0] // 2
    uu, uv = K_bar[:n, :n], K_bar[:n, n:]
    vu, vv = K_bar[n:, :n], K_bar[n:, n:]
    K = uu + vv + 1j * (vu - uv)
    K_tilde = uu - vv + 1j * (vu + uv)
    return validate_augmented(hermitize(K), (K_tilde + K_tilde.T) / 2)


def random_augmented_covariance(
    rng: np.random.Generator,
    n: int,
    power: float = 1.0,
    rank: int | None = None,
) -> AugmentedCovariance:
    """Random feasible, generally improper, covariance with trace(K) = power."""
    W = rng.standard_normal((2 * n, 2 * n if rank is None else rank))
    K_bar = W @ W.T
    K_bar *= power / np.trace(K_bar)
    return augmented_from_composite(K_bar)


def real_composite_rate(ch: ChannelPair, aug: AugmentedCovariance) -> float:
    """(1/2)[log det(I + Hr K Hr^T) - log det(I + He K He^T)] on the real side, in nats."""
    comp = to_real_composite(ch)
    K_bar = composite_covariance(aug)

    def gain(H: np.ndarray) -> float:
        return logdet_pd(np.eye(H.shape[0]) + H @ K_bar @ H.T)

    return 0.5 * (gain(comp.H_r) - gain(comp.H_e))


def make_generator(seed: int) -> np.random.Generator:
    """PCG64 stream; same seed, same draws on one platform."""
    return np.random.Generator(np.random.PCG64(seed))


def _symmetric_root(K_bar: np.ndarray) -> np.ndarray:
    w, V = scipy.linalg.eigh(K_bar)
    if w[0] < -psd_tolerance(K_bar):
        raise InfeasibleSecondOrder(f"composite covariance is not PSD (min eigenvalue {w[0]:.3e})")
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


def sample_gaussian(aug: AugmentedCovariance, count: int, seed: int) -> SampleBatch:
    if count < 1:
        raise CountError(f"sample count must be at least 1, got {count}")
    K_bar = composite_covariance(aug)
    root = _symmetric_root(K_bar)
    rng = make_generator(seed)
    z = rng.standard_normal((count, 2 * aug.n))
    real = z @ root
    samples = real[:, : aug.n] + 1j * real[:, aug.n:]
    log.debug("drew %d samples of dimension %d (seed=%d)", count, aug.n, seed)
    return SampleBatch(samples)


def estimate_augmented(batch: SampleBatch):
    """Sample second moments (K_hat, K~_hat) = (1/N) sum x x^H, (1/N) sum x x^T."""
    if batch.count < 2:
        raise CountError(f"estimation needs at least 2 samples, got {batch.count}")
    X = batch.samples
    K_raw = X.T @ X.conj() / batch.count
    asym = np.max(np.abs(K_raw - K_raw.conj().T), initial=0.0)
    if asym > config.ESTIMATE_ASYMMETRY_WARN:
        log.warning("sample covariance asymmetry %.3e exceeds %.0e; check the generator", asym, config.ESTIMATE_ASYMMETRY_WARN)
    K_tilde = X.T @ X / batch.count
    return hermitize(K_raw), (K_tilde + K_tilde.T) / 2
