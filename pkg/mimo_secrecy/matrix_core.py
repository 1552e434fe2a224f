"""Dense complex matrix helpers: definiteness, log-determinants, submatrices
and the determinant identities used by the secrecy-rate proofs.

Matrices are plain numpy arrays. Nothing here mutates its inputs.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Sequence, Tuple

import numpy as np
import scipy.linalg

from . import config
from .errors import DimensionError, InvalidMatrix, NotPositiveDefinite, NotPositiveSemidefinite, PartitionError

if TYPE_CHECKING:
    from .models import PartitionSpec


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(M, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return arr


def as_square(M, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def hermitize(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def is_hermitian(M, tol: float = config.TOL_HERM) -> bool:
    arr = as_matrix(M)
    if arr.shape[0] != arr.shape[1]:
        return False
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol)


def psd_tolerance(M: np.ndarray) -> float:
    return config.TOL_PSD_REL * max(1.0, float(np.linalg.norm(M, 2)) if M.size else 1.0)


def eigenvalues(M) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    arr = as_square(M)
    return scipy.linalg.eigvalsh(hermitize(arr))


def min_eigenvalue(M) -> float:
    return float(eigenvalues(M)[0])


def max_eigenvalue(M) -> float:
    return float(eigenvalues(M)[-1])


def is_psd(M) -> bool:
    arr = as_square(M)
    return min_eigenvalue(arr) >= -psd_tolerance(arr)


def is_pd(M) -> bool:
    arr = as_square(M)
    return min_eigenvalue(arr) > psd_tolerance(arr)


def logdet_pd(M) -> float:
    """Natural log-determinant of a positive definite matrix via Cholesky."""
    arr = hermitize(as_square(M))
    if not is_pd(arr):
        raise NotPositiveDefinite(f"matrix is not positive definite (min eigenvalue {min_eigenvalue(arr):.3e})")
    L = scipy.linalg.cholesky(arr, lower=True)
    return float(2.0 * np.sum(np.log(np.diag(L).real)))


def det_cofactor(M) -> complex:
    """Laplace expansion along the first row. Oracle use only, dim <= 5."""
    arr = as_square(M)
    n = arr.shape[0]
    if n > 5:
        raise DimensionError(f"cofactor expansion is limited to dim <= 5, got {n}")
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(arr[0, 0])
    total = 0.0j
    for j in range(n):
        minor = np.delete(np.delete(arr, 0, axis=0), j, axis=1)
        total += (-1) ** j * arr[0, j] * det_cofactor(minor)
    return total


def principal_submatrix(M, indices: Sequence[int]) -> np.ndarray:
    """M(S, S) with rows/columns in the given (zero-based) order."""
    arr = as_square(M)
    idx = np.asarray(list(indices), dtype=int)
    n = arr.shape[0]
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"index set {idx.tolist()} out of range for dimension {n}")
    return arr[np.ix_(idx, idx)]


def submatrix(M, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    arr = as_matrix(M)
    r = np.asarray(list(rows), dtype=int)
    c = np.asarray(list(cols), dtype=int)
    if (r.size and (r.min() < 0 or r.max() >= arr.shape[0])) or (c.size and (c.min() < 0 or c.max() >= arr.shape[1])):
        raise IndexError(f"index sets out of range for shape {arr.shape}")
    return arr[np.ix_(r, c)]


def schur_complement(M, keep: Sequence[int], eliminate: Sequence[int]) -> np.ndarray:
    """M(keep, keep) - M(keep, elim) M(elim, elim)^-1 M(elim, keep)."""
    arr = as_square(M)
    M_kk = submatrix(arr, keep, keep)
    M_ke = submatrix(arr, keep, eliminate)
    M_ee = submatrix(arr, eliminate, eliminate)
    M_ek = submatrix(arr, eliminate, keep)
    return M_kk - M_ke @ np.linalg.solve(M_ee, M_ek)


def check_sylvester_identity(A, B) -> Tuple[float, float]:
    """|det(I_m + AB)| and |det(I_n + BA)|."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    m, n = A.shape
    if B.shape != (n, m):
        raise DimensionError(f"B must be {n}x{m} to pair with A of shape {A.shape}, got {B.shape}")
    lhs = abs(np.linalg.det(np.eye(m) + A @ B))
    rhs = abs(np.linalg.det(np.eye(n) + B @ A))
    return float(lhs), float(rhs)


def block_expansion_identity(A, B, C) -> Tuple[np.ndarray, np.ndarray]:
    """Both sides of [A; B] C [A^H B^H] = diag(A, B) [[C, C], [C, C]] diag(A^H, B^H)."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    C = as_square(C, "C")
    n = C.shape[0]
    if A.shape[1] != n or B.shape[1] != n:
        raise DimensionError(f"A and B need {n} columns to multiply C, got {A.shape} and {B.shape}")
    stacked = np.vstack([A, B])
    lhs = stacked @ C @ stacked.conj().T
    D = scipy.linalg.block_diag(A, B)
    rhs = D @ np.block([[C, C], [C, C]]) @ D.conj().T
    return lhs, rhs


def symmetric_block_permute(M, part: "PartitionSpec") -> np.ndarray:
    """Swap block-rows 2, 3 and block-columns 2, 3; the determinant is unchanged.

    Undo with `symmetric_block_permute(result, part.swapped())`.
    """
    arr = as_square(M)
    if arr.shape[0] != part.k:
        raise PartitionError(f"partition covers {part.k} indices but matrix has dimension {arr.shape[0]}")
    s1, s2, s3, s4 = part.blocks()
    order = np.concatenate([s1, s3, s2, s4])
    return arr[np.ix_(order, order)]


def hermitian_sqrt(M) -> np.ndarray:
    """Hermitian principal square root of a PSD matrix."""
    arr = hermitize(as_square(M))
    w, V = scipy.linalg.eigh(arr)
    if w[0] < -psd_tolerance(arr):
        raise NotPositiveSemidefinite(f"square root needs a PSD matrix (min eigenvalue {w[0]:.3e})")
    root = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    return hermitize(root)


def hermitian_inv_sqrt(M) -> np.ndarray:
    arr = hermitize(as_square(M))
    w, V = scipy.linalg.eigh(arr)
    if w[0] <= psd_tolerance(arr):
        raise NotPositiveDefinite(f"inverse square root needs a PD matrix (min eigenvalue {w[0]:.3e})")
    return hermitize((V / np.sqrt(w)) @ V.conj().T)


def complex_gaussian_entropy(K) -> float:
    """Differential entropy log det(pi e K) of CN(0, K), in nats."""
    arr = as_square(K)
    n = arr.shape[0]
    return n * math.log(math.pi * math.e) + logdet_pd(arr)


def random_complex(rng: np.random.Generator, rows: int, cols: int, scale: float = 1.0) -> np.ndarray:
    """i.i.d. CN(0, scale^2) entries."""
    return scale * (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    return hermitize(random_complex(rng, n, n))


def random_pd(rng: np.random.Generator, n: int, floor: float = 0.1) -> np.ndarray:
    X = random_complex(rng, n, n)
    return hermitize(X @ X.conj().T + floor * np.eye(n))


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None, trace: float | None = None) -> np.ndarray:
    X = random_complex(rng, n, n if rank is None else rank)
    K = hermitize(X @ X.conj().T)
    if trace is not None:
        K = K * (trace / np.trace(K).real)
    return K

