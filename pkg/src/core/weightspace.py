"""Positive weights, A-seminorms, membership and canonical adjoints.

Every weight is split once into an orthonormal range basis U and kernel
basis V. Operators of the membership algebra are exactly those that are
block lower triangular in the [U V] basis, so all block statements below
are evaluated on the compressed r x r block U* T U.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.stats import unitary_group

from src.config import ToleranceConfig
from src.core.errors import DimensionMismatch, InvalidRank, NotInMA, NotPSD, ZeroWeight
from src.core.matcore import DEFAULT_TOLERANCES, as_matrix, hermitian_eig, op_norm

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


@dataclass(frozen=True)
class PositiveWeight:
    """A nonzero positive semidefinite weight with its cached block structure.

    Attributes:
        A: The weight itself (Hermitian PSD).
        sqrtA: Square root of the rank-truncated weight.
        sqrtA_pinv: Moore-Penrose inverse of sqrtA.
        P: Orthogonal projection onto the range of A.
        U: n x r orthonormal range basis (eigenvectors of A).
        V: n x (n - r) orthonormal kernel basis; [U V] is unitary.
        D: Retained positive eigenvalues, aligned with the columns of U.
        rank: Numeric rank r.
        min_pos_eig: Smallest retained eigenvalue.
    """
    A: np.ndarray
    sqrtA: np.ndarray
    sqrtA_pinv: np.ndarray
    P: np.ndarray
    U: np.ndarray
    V: np.ndarray
    D: np.ndarray
    rank: int
    min_pos_eig: float
    tol: ToleranceConfig = field(default=DEFAULT_TOLERANCES)

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    @property
    def norm(self) -> float:
        return float(self.D.max())

    @property
    def W(self) -> np.ndarray:
        return np.hstack([self.U, self.V])

    @property
    def A_pinv(self) -> np.ndarray:
        return (self.U / self.D) @ self.U.conj().T

    @classmethod
    def from_sqrt_diagonal(cls, a, tol: Optional[ToleranceConfig] = None) -> "PositiveWeight":
        """Exact diagonal weight A = diag(a**2) given its square-root diagonal a."""
        tol = tol or ToleranceConfig.for_exact_diagonal()
        a = np.asarray(a, dtype=float).ravel()
        if a.size == 0 or not np.all(np.isfinite(a)):
            raise ZeroWeight("Diagonal weight must be a non-empty finite vector")
        if np.any(a < 0):
            raise NotPSD("Square-root diagonal entries must be non-negative")

        squares = a * a
        if squares.max() == 0:
            raise ZeroWeight("Weight is the zero operator")
        keep = squares > tol.rank_rel_tol * squares.max()
        dropped = np.count_nonzero((a > 0) & ~keep)
        if dropped:
            logger.warning(f"{dropped} diagonal weights underflowed and were treated as zero")

        eye = np.eye(a.size, dtype=complex)
        root = np.where(keep, a, 0.0)
        inverse_root = np.zeros_like(a)
        inverse_root[keep] = 1.0 / a[keep]
        D = squares[keep]
        return cls(
            A=np.diag(squares).astype(complex),
            sqrtA=np.diag(root).astype(complex),
            sqrtA_pinv=np.diag(inverse_root).astype(complex),
            P=np.diag(keep.astype(float)).astype(complex),
            U=eye[:, keep],
            V=eye[:, ~keep],
            D=D,
            rank=int(keep.sum()),
            min_pos_eig=float(D.min()),
            tol=tol,
        )


@dataclass(frozen=True)
class AOperator:
    T: np.ndarray
    in_MA: bool
    sharp: Optional[np.ndarray] = None
    half_adjoint: Optional[np.ndarray] = None
    seminorm: float = math.inf


def make_weight(A, tol: ToleranceConfig = DEFAULT_TOLERANCES) -> PositiveWeight:
    arr = as_matrix(A)
    eig = hermitian_eig(arr, tol)
    values, vectors = eig.values, eig.right_vectors
    scale = float(np.max(np.abs(values)))
    if scale == 0:
        raise ZeroWeight("Weight is the zero operator")
    if values[0] < -tol.psd_clamp_tol * scale:
        raise NotPSD(f"Weight has eigenvalue {values[0]:.3e} below the clamp bound")

    keep = values > tol.rank_rel_tol * scale
    # Largest eigenvalues first so that U[:, 0] spans the dominant direction.
    order = np.argsort(-values)
    keep_idx = [i for i in order if keep[i]]
    drop_idx = [i for i in order if not keep[i]]
    U = vectors[:, keep_idx]
    V = vectors[:, drop_idx]
    D = values[keep_idx]

    sqrtA = (U * np.sqrt(D)) @ U.conj().T
    sqrtA_pinv = (U / np.sqrt(D)) @ U.conj().T
    return PositiveWeight(
        A=(arr + arr.conj().T) / 2,
        sqrtA=sqrtA,
        sqrtA_pinv=sqrtA_pinv,
        P=U @ U.conj().T,
        U=U,
        V=V,
        D=D,
        rank=len(keep_idx),
        min_pos_eig=float(D.min()),
        tol=tol,
    )


def _check_operator(w: PositiveWeight, T) -> np.ndarray:
    arr = as_matrix(T)
    if arr.shape[0] != w.n:
        raise DimensionMismatch(f"Operator is {arr.shape[0]}x{arr.shape[0]}, weight is {w.n}x{w.n}")
    return arr


def range_block(w: PositiveWeight, T) -> np.ndarray:
    """U* T U without the membership check."""
    arr = _check_operator(w, T)
    return w.U.conj().T @ arr @ w.U


def half_compression(w: PositiveWeight, T) -> np.ndarray:
    """D^{1/2} B D^{-1/2}: the matrix of A^{1/2} T (A^{1/2})^+ in the range basis."""
    root = np.sqrt(w.D)
    return root[:, None] * range_block(w, T) / root[None, :]


def vector_a_norm(w: PositiveWeight, h) -> float:
    vec = np.asarray(h, dtype=complex).ravel()
    if vec.shape[0] != w.n:
        raise DimensionMismatch(f"Vector has length {vec.shape[0]}, weight is {w.n}x{w.n}")
    return float(np.linalg.norm(w.sqrtA @ vec))


def membership_defect(w: PositiveWeight, T) -> float:
    """||(I - P) T* P||, computed as ||U* T V||."""
    arr = _check_operator(w, T)
    if w.V.shape[1] == 0:
        return 0.0
    return op_norm(w.U.conj().T @ arr @ w.V)


def membership(w: PositiveWeight, T) -> bool:
    arr = _check_operator(w, T)
    return membership_defect(w, arr) <= w.tol.residual_tol * (1 + op_norm(arr))


def require_member(w: PositiveWeight, T) -> np.ndarray:
    arr = _check_operator(w, T)
    if not membership(w, arr):
        raise NotInMA(f"Operator does not leave the kernel of A invariant (defect {membership_defect(w, arr):.3e})")
    return arr


def a_adjoint(w: PositiveWeight, T) -> np.ndarray:
    """Canonical A-adjoint A^+ T* A; it vanishes off the range block."""
    arr = require_member(w, T)
    block = range_block(w, arr)
    inner = (block.conj().T * w.D[None, :]) / w.D[:, None]
    return w.U @ inner @ w.U.conj().T


def half_adjoint(w: PositiveWeight, T) -> np.ndarray:
    """L = (A^{1/2} T (A^{1/2})^+)*, so that A^{1/2} T = L* A^{1/2}."""
    arr = require_member(w, T)
    return w.U @ half_compression(w, arr).conj().T @ w.U.conj().T


def operator_a_seminorm(w: PositiveWeight, T) -> float:
    """||T||_A, or math.inf for operators outside the membership algebra."""
    arr = _check_operator(w, T)
    if not membership(w, arr):
        return math.inf
    return op_norm(half_compression(w, arr))


def a_operator(w: PositiveWeight, T) -> AOperator:
    arr = _check_operator(w, T)
    if not membership(w, arr):
        return AOperator(T=arr, in_MA=False)
    return AOperator(
        T=arr,
        in_MA=True,
        sharp=a_adjoint(w, arr),
        half_adjoint=half_adjoint(w, arr),
        seminorm=operator_a_seminorm(w, arr),
    )


def power_seminorm(w: PositiveWeight, T, iterations: int = 5000, seed: int = 0) -> float:
    """||T||_A by power iteration on the compressed Gram operator C* C."""
    C = half_compression(w, require_member(w, T))
    gram = C.conj().T @ C
    rng = np.random.default_rng(seed)
    x = complex_gaussian(rng, (w.rank,))
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(iterations):
        y = gram @ x
        norm_y = float(np.linalg.norm(y))
        if norm_y == 0.0:
            return 0.0
        previous, estimate = estimate, float(np.real(np.vdot(x, y)))
        x = y / norm_y
        if abs(estimate - previous) <= 1e-15 * max(estimate, 1e-300):
            break
    return math.sqrt(max(estimate, 0.0))


def complex_gaussian(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    if n == 1:
        return np.exp(2j * np.pi * rng.uniform()) * np.ones((1, 1), dtype=complex)
    return unitary_group.rvs(n, random_state=rng)


def random_weight(
    seed: SeedLike,
    n: int,
    rank: int,
    spread: float = 4.0,
    tol: ToleranceConfig = DEFAULT_TOLERANCES,
) -> PositiveWeight:
    if not 1 <= rank <= n:
        raise InvalidRank(f"Rank must satisfy 1 <= rank <= n, got rank={rank}, n={n}")
    if spread < 1:
        raise ValueError(f"spread must be >= 1, got {spread}")

    rng = np.random.default_rng(seed)
    Q = haar_unitary(rng, n)
    log_spread = math.log(spread)
    d = np.zeros(n)
    d[:rank] = np.exp(rng.uniform(-log_spread, log_spread, rank))
    A = (Q * d) @ Q.conj().T
    return make_weight((A + A.conj().T) / 2, tol)


def assemble_blocks(w: PositiveWeight, T11, T21, T22) -> np.ndarray:
    """[U V] [[T11, 0], [T21, T22]] [U V]*, a member for any blocks."""
    k = w.n - w.rank
    upper = np.hstack([T11, np.zeros((w.rank, k), dtype=complex)])
    lower = np.hstack([T21, T22])
    W = w.W
    return W @ np.vstack([upper, lower]) @ W.conj().T


def random_in_MA(seed: SeedLike, w: PositiveWeight, scale: float = 1.0) -> AOperator:
    """Random block-lower operator; a member by construction."""
    rng = np.random.default_rng(seed)
    r, k = w.rank, w.n - w.rank
    T = assemble_blocks(
        w,
        complex_gaussian(rng, (r, r), scale),
        complex_gaussian(rng, (k, r), scale),
        complex_gaussian(rng, (k, k), scale),
    )
    return a_operator(w, T)


def random_member_invertible(seed: SeedLike, w: PositiveWeight, scale: float = 0.2) -> np.ndarray:
    """Well-conditioned invertible member: diagonal blocks I + scale*G."""
    rng = np.random.default_rng(seed)
    r, k = w.rank, w.n - w.rank
    return assemble_blocks(
        w,
        np.eye(r) + complex_gaussian(rng, (r, r), scale / math.sqrt(max(r, 1))),
        complex_gaussian(rng, (k, r), scale),
        np.eye(k) + complex_gaussian(rng, (k, k), scale / math.sqrt(max(k, 1))),
    )


def sample_unit_a_vectors(seed: SeedLike, w: PositiveWeight, count: int) -> np.ndarray:
    """Columns h with ||h||_A = 1, including random kernel components."""
    rng = np.random.default_rng(seed)
    z = complex_gaussian(rng, (w.rank, count))
    z /= np.linalg.norm(z, axis=0)
    h = w.U @ (z / np.sqrt(w.D)[:, None])
    if w.V.shape[1]:
        h = h + w.V @ complex_gaussian(rng, (w.V.shape[1], count))
    return h
