"""Dense complex linear algebra used by every other module.

All routines are thin, checked wrappers around LAPACK through scipy.linalg.
The general eigensolver is LAPACK's Hessenberg reduction plus shifted QR
(zgeev); its sweep budget is internal to LAPACK and a non-converged run is
reported as ConvergenceFailure instead of returning unvetted values.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.config import ToleranceConfig
from src.core.errors import ConvergenceFailure, InvalidMatrix, NotHermitian, NotPSD

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = ToleranceConfig()

# Eigenvalues closer than this multiple of set_match_tol count as clustered.
CLUSTER_GAP_FACTOR = 1e3


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    right_vectors: Optional[np.ndarray] = None
    left_vectors: Optional[np.ndarray] = None
    max_residual: float = 0.0
    clustered: bool = False

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    worst: float
    unmatched_a: int = 0
    unmatched_b: int = 0


def as_matrix(M, square: bool = True) -> np.ndarray:
    """Validate and convert to a complex 2-D array."""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2:
        raise InvalidMatrix(f"Expected a 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"Expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("Matrix has non-finite entries")
    return arr


def op_norm(M) -> float:
    arr = np.asarray(M)
    if arr.size == 0:
        return 0.0
    return float(scipy.linalg.norm(arr, 2))


def hermitian_eig(M, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> EigenSystem:
    arr = as_matrix(M)
    norm = op_norm(arr)
    asymmetry = op_norm(arr - arr.conj().T)
    if asymmetry > tol.residual_tol * norm:
        raise NotHermitian(f"||M - M*|| = {asymmetry:.3e} exceeds {tol.residual_tol:.1e}*||M||")

    values, vectors = scipy.linalg.eigh((arr + arr.conj().T) / 2)
    reconstruction = (vectors * values) @ vectors.conj().T
    residual = op_norm(reconstruction - arr)
    return EigenSystem(values=values, right_vectors=vectors, max_residual=residual)


def _nearest_gaps(values: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    if n < 2:
        return np.full(n, np.inf)
    distances = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(distances, np.inf)
    return distances.min(axis=1)


def general_eig(M, want_vectors: bool = False, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> EigenSystem:
    arr = as_matrix(M)
    try:
        if want_vectors:
            values, left, right = scipy.linalg.eig(arr, left=True, right=True)
        else:
            values = scipy.linalg.eigvals(arr)
            left = right = None
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(f"Eigenvalue iteration did not converge: {e}") from e

    if not np.all(np.isfinite(values)):
        raise ConvergenceFailure("Eigenvalue iteration returned non-finite values")
    if not want_vectors:
        return EigenSystem(values=values)

    right = right / np.linalg.norm(right, axis=0)
    left = left / np.linalg.norm(left, axis=0)

    norm = op_norm(arr)
    bound = tol.residual_tol * norm
    checked = _nearest_gaps(values) > CLUSTER_GAP_FACTOR * tol.set_match_tol
    worst = 0.0
    for i in np.flatnonzero(checked):
        right_res = float(np.linalg.norm(arr @ right[:, i] - values[i] * right[:, i]))
        left_res = float(np.linalg.norm(left[:, i].conj() @ arr - values[i] * left[:, i].conj()))
        worst = max(worst, right_res, left_res)
        if max(right_res, left_res) > bound:
            raise ConvergenceFailure(
                f"Eigenpair {i} residual {max(right_res, left_res):.3e} exceeds {bound:.3e}"
            )

    clustered = not bool(np.all(checked))
    if clustered:
        logger.debug(f"{int((~checked).sum())} clustered eigenvalues skipped the per-vector check")
    return EigenSystem(values=values, right_vectors=right, left_vectors=left, max_residual=worst, clustered=clustered)


def pinv(M, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[np.ndarray, int]:
    """Moore-Penrose inverse with relative cutoff rank_rel_tol * sigma_max."""
    arr = as_matrix(M, square=False)
    inverse, rank = scipy.linalg.pinv(arr, atol=0.0, rtol=tol.rank_rel_tol, return_rank=True)
    return inverse, int(rank)


def psd_sqrt(M, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    eig = hermitian_eig(M, tol)
    values = eig.values
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    if values.size and values[0] < -tol.psd_clamp_tol * scale:
        raise NotPSD(f"Smallest eigenvalue {values[0]:.3e} is below -{tol.psd_clamp_tol:.1e}*||M||")

    vectors = eig.right_vectors
    root = (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.conj().T
    return (root + root.conj().T) / 2


def range_basis(M, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> Tuple[np.ndarray, np.ndarray, int]:
    """Returns (P, U, rank): orthonormal basis U of the numeric range and P = U U*."""
    arr = as_matrix(M)
    left, singular, _ = scipy.linalg.svd(arr)
    rank = _count_retained(singular, tol)
    basis = left[:, :rank]
    return basis @ basis.conj().T, basis, rank


def _count_retained(singular: np.ndarray, tol: ToleranceConfig) -> int:
    if singular.size == 0 or singular[0] == 0:
        return 0
    return int(np.count_nonzero(singular > tol.rank_rel_tol * singular[0]))


def numeric_rank(M, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> int:
    arr = np.asarray(M, dtype=complex)
    return _count_retained(scipy.linalg.svdvals(arr), tol)


def match_multisets(a: Sequence[complex], b: Sequence[complex], threshold: float) -> MatchResult:
    """Greedy minimal-distance pairing of two multisets.

    The closest remaining pair is matched first; the multisets agree when
    every point is paired and no pair is farther apart than threshold.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        return MatchResult(matched=a.size == b.size, worst=0.0, unmatched_a=int(a.size), unmatched_b=int(b.size))

    distances = np.abs(a[:, None] - b[None, :])
    free_a = np.ones(a.size, dtype=bool)
    free_b = np.ones(b.size, dtype=bool)
    worst = 0.0
    for _ in range(min(a.size, b.size)):
        masked = np.where(free_a[:, None] & free_b[None, :], distances, np.inf)
        i, j = np.unravel_index(np.argmin(masked), masked.shape)
        worst = max(worst, float(masked[i, j]))
        free_a[i] = False
        free_b[j] = False

    unmatched_a = int(free_a.sum())
    unmatched_b = int(free_b.sum())
    return MatchResult(
        matched=unmatched_a == 0 and unmatched_b == 0 and worst <= threshold,
        worst=worst,
        unmatched_a=unmatched_a,
        unmatched_b=unmatched_b,
    )


def excise(points: Sequence[complex], excluded: Sequence[complex], tol: float) -> np.ndarray:
    """Drops every point within tol of an excluded value."""
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0 or len(excluded) == 0:
        return pts
    excl = np.asarray(excluded, dtype=complex).ravel()
    keep = np.abs(pts[:, None] - excl[None, :]).min(axis=1) > tol
    return pts[keep]


def set_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest distance from a point of a to the set b (0 for empty a)."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0:
        return 0.0
    if b.size == 0:
        return float("inf")
    return float(np.abs(a[:, None] - b[None, :]).min(axis=1).max())
