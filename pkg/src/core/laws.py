"""Seeded property fuzzing of the A-spectral theorems.

Each law runs independent trials. Trial i of law L draws everything from
SeedSequence([derive_seed(seed, L), i]), so any failing trial can be
replayed alone from its counterexample bundle. Converse statements are
checked by bounded witness searches; an exhausted search is reported as
inconclusive and still counts as passed.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from src.config import Config, ToleranceConfig
from src.core import aspectrum, weightspace
from src.core.errors import SpectralError, UnknownLaw
from src.core.matcore import excise, general_eig, hermitian_eig, match_multisets, numeric_rank, op_norm, set_distance
from src.core.weightspace import PositiveWeight, assemble_blocks, complex_gaussian
from src.utils.matrix_codec import encode_matrix
from src.utils.seeding import derive_seed, trial_rng

logger = logging.getLogger(__name__)

MEMBERS_PER_TRIAL = 50
WITNESS_BUDGET = 100
GKZ_INCLUSION_SAMPLES = 200
GKZ_PAIR_SAMPLES = 50
GELFAND_MIN_RADIUS = 0.1
GELFAND_REL_TOL = 2e-2


class RankPolicy(str, Enum):
    FULL = "full"
    DEFICIENT = "deficient"
    MIXED = "mixed"


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = Config.DEFAULT_SEED
    trials: int = Config.DEFAULT_TRIALS
    dim_range: Tuple[int, int] = Config.DEFAULT_DIMS
    rank_policy: RankPolicy = RankPolicy.MIXED
    scale: float = Config.DEFAULT_SCALE
    spread: float = Config.DEFAULT_SPREAD
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)

    def __post_init__(self):
        low, high = self.dim_range
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 2 <= low <= high <= 12:
            raise ValueError(f"dim_range must satisfy 2 <= min <= max <= 12, got {self.dim_range}")
        if self.scale <= 0:
            raise ValueError(f"scale must be positive, got {self.scale}")
        if self.spread < 1:
            raise ValueError(f"spread must be >= 1, got {self.spread}")

    def to_dict(self) -> Dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "dim_range": list(self.dim_range),
            "rank_policy": self.rank_policy.value,
            "scale": self.scale,
            "spread": self.spread,
            "tolerances": self.tol.to_dict(),
        }


@dataclass(frozen=True)
class LinearFunctional:
    """phi(X) = trace(F X)."""
    F: np.ndarray

    def __call__(self, X) -> complex:
        return complex(np.sum(self.F * np.asarray(X).T))

    @classmethod
    def vector_state(cls, q) -> "LinearFunctional":
        """X -> q* X q / |q|^2."""
        q = np.asarray(q, dtype=complex).ravel()
        return cls(F=np.outer(q, q.conj()) / np.vdot(q, q).real)


@dataclass
class Check:
    name: str
    error: float
    threshold: float

    @property
    def ratio(self) -> float:
        if self.error == 0:
            return 0.0
        if self.threshold <= 0 or not math.isfinite(self.error):
            return math.inf
        return self.error / self.threshold


@dataclass
class TrialOutcome:
    checks: List[Check]
    weight: Optional[np.ndarray] = None
    operators: Dict[str, np.ndarray] = field(default_factory=dict)
    inconclusive: bool = False
    metrics: Dict[str, float] = field(default_factory=dict)
    error_message: Optional[str] = None

    @property
    def deviation(self) -> float:
        if self.error_message is not None:
            return math.inf
        return max((c.ratio for c in self.checks), default=0.0)

    @property
    def passed(self) -> bool:
        return self.error_message is None and self.deviation <= 1.0

    @property
    def message(self) -> str:
        if self.error_message is not None:
            return self.error_message
        failing = [f"{c.name}: error {c.error:.3e} > {c.threshold:.3e}" for c in self.checks if c.ratio > 1.0]
        return "; ".join(failing) or "ok"


@dataclass
class Counterexample:
    law_seed: int
    trial_index: int
    message: str
    weight: Optional[np.ndarray] = None
    operators: Dict[str, np.ndarray] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            "law_seed": self.law_seed,
            "trial_index": self.trial_index,
            "message": self.message,
            "weight": encode_matrix(self.weight) if self.weight is not None else None,
            "operators": {name: encode_matrix(M) for name, M in sorted(self.operators.items())},
        }


def _json_float(value: float):
    return value if math.isfinite(value) else str(value)


@dataclass
class LawReport:
    law_id: str
    trials: int
    passed: int
    worst_deviation: float
    counterexample: Optional[Counterexample] = None
    elapsed: float = 0.0
    inconclusive: int = 0
    metrics: Dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def to_dict(self, include_elapsed: bool = False) -> Dict:
        result = {
            "law_id": self.law_id,
            "trials": self.trials,
            "passed": self.passed,
            "inconclusive": self.inconclusive,
            "worst_deviation": _json_float(self.worst_deviation),
            "metrics": {k: _json_float(v) for k, v in sorted(self.metrics.items())},
            "counterexample": self.counterexample.to_dict() if self.counterexample else None,
        }
        if include_elapsed:
            result["elapsed"] = self.elapsed
        return result


class TrialContext:
    """Random sources and tolerances for one trial."""

    def __init__(self, cfg: FuzzConfig, rng: np.random.Generator, index: int):
        self.cfg = cfg
        self.rng = rng
        self.index = index

    @property
    def tol(self) -> ToleranceConfig:
        return self.cfg.tol

    def dimension(self) -> int:
        low, high = self.cfg.dim_range
        return int(self.rng.integers(low, high + 1))

    def rank_for(self, n: int) -> int:
        if self.cfg.rank_policy == RankPolicy.FULL:
            return n
        if self.cfg.rank_policy == RankPolicy.DEFICIENT:
            return int(self.rng.integers(1, n))
        return int(self.rng.integers(1, n + 1))

    def weight(self, n: Optional[int] = None, rank: Optional[int] = None) -> PositiveWeight:
        n = n or self.dimension()
        rank = rank or self.rank_for(n)
        return weightspace.random_weight(self.rng, n, rank, self.cfg.spread, self.tol)

    def member(self, w: PositiveWeight) -> np.ndarray:
        return weightspace.random_in_MA(self.rng, w, self.cfg.scale).T

    def gaussian(self, shape) -> np.ndarray:
        return complex_gaussian(self.rng, shape, self.cfg.scale)

    def kernel_supported(self, w: PositiveWeight) -> np.ndarray:
        """K with U* K = 0, hence AK = 0."""
        k = w.n - w.rank
        if k == 0:
            return np.zeros((w.n, w.n), dtype=complex)
        return w.V @ self.gaussian((k, w.n))

    def threshold(self, *matrices) -> float:
        scale = max((op_norm(M) for M in matrices), default=0.0)
        return self.tol.set_match_tol * (1 + scale)

    def excision_tol(self, *matrices) -> float:
        # Defective eigenvalues at excluded points move by eps**(1/k).
        scale = max((op_norm(M) for M in matrices), default=0.0)
        return math.sqrt(self.tol.set_match_tol) * (1 + scale)

    def nilpotent_tol(self, *matrices) -> float:
        scale = max((op_norm(M) for M in matrices), default=0.0)
        return math.sqrt(self.tol.residual_tol) * (1 + scale)


def spectrum(w: PositiveWeight, T) -> np.ndarray:
    return aspectrum.a_spectrum(w, T).points


def set_check(name: str, a, b, threshold: float) -> Check:
    result = match_multisets(a, b, threshold)
    error = result.worst if result.unmatched_a == 0 and result.unmatched_b == 0 else math.inf
    return Check(name, error, threshold)


def flag_check(name: str, ok: bool) -> Check:
    return Check(name, 0.0 if ok else math.inf, 1.0)


@dataclass(frozen=True)
class LawSpec:
    law_id: str
    trial: Callable[[TrialContext], TrialOutcome]
    trial_factor: float = 1.0


LAW_REGISTRY: Dict[str, LawSpec] = {}


def register_law(law_id: str, trial_factor: float = 1.0):
    def decorator(fn: Callable[[TrialContext], TrialOutcome]):
        LAW_REGISTRY[law_id] = LawSpec(law_id=law_id, trial=fn, trial_factor=trial_factor)
        return fn
    return decorator


@register_law("commutation")
def _commutation(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    S, T = ctx.member(w), ctx.member(w)
    ST, TS = S @ T, T @ S
    thr = ctx.threshold(ST, TS)
    cut = ctx.excision_tol(ST, TS)
    left, right = spectrum(w, ST), spectrum(w, TS)
    radius_gap = abs(np.max(np.abs(left)) - np.max(np.abs(right)))
    return TrialOutcome(
        checks=[
            set_check("nonzero spectra of ST and TS", excise(left, [0], cut), excise(right, [0], cut), thr),
            Check("r_A(ST) = r_A(TS)", radius_gap, thr),
        ],
        weight=w.A,
        operators={"S": S, "T": T},
    )


@register_law("orthogonal_sum")
def _orthogonal_sum(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    r, k = w.rank, w.n - w.rank
    split = int(ctx.rng.integers(1, r)) if r >= 2 else r
    first = np.zeros((r, r), dtype=complex)
    second = np.zeros((r, r), dtype=complex)
    first[:split, :split] = ctx.gaussian((split, split))
    second[split:, split:] = ctx.gaussian((r - split, r - split))
    T = assemble_blocks(w, first, ctx.gaussian((k, r)), ctx.gaussian((k, k)))
    S = assemble_blocks(w, second, ctx.gaussian((k, r)), ctx.gaussian((k, k)))

    hypothesis = max(op_norm(w.A @ T @ S), op_norm(w.A @ S @ T))
    thr = ctx.threshold(T, S, T + S)
    cut = ctx.excision_tol(T, S, T + S)
    union = np.concatenate([spectrum(w, T), spectrum(w, S)])
    return TrialOutcome(
        checks=[
            Check("ATS = AST = 0", hypothesis, ctx.tol.residual_tol * w.norm * (1 + op_norm(T)) * (1 + op_norm(S))),
            set_check("sigma_A(T+S) vs union", excise(spectrum(w, T + S), [0], cut), excise(union, [0], cut), thr),
        ],
        weight=w.A,
        operators={"S": S, "T": T},
    )


def _random_idempotent(ctx: TrialContext, w: PositiveWeight) -> np.ndarray:
    similarity = weightspace.random_member_invertible(ctx.rng, w)
    pattern = ctx.rng.integers(0, 2, w.n).astype(float)
    W = w.W
    core = (W * pattern) @ W.conj().T
    return similarity @ core @ np.linalg.inv(similarity)


@register_law("idempotent")
def _idempotent(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    T, S = _random_idempotent(ctx, w), _random_idempotent(ctx, w)
    identity = np.eye(w.n)
    left_op = (identity - T) @ (identity - S)
    right_op = T @ S
    thr = ctx.threshold(left_op, right_op)
    cut = ctx.excision_tol(left_op, right_op)
    return TrialOutcome(
        checks=[
            Check("T^2 = T", op_norm(T @ T - T), ctx.tol.residual_tol * (1 + op_norm(T)) ** 2),
            Check("S^2 = S", op_norm(S @ S - S), ctx.tol.residual_tol * (1 + op_norm(S)) ** 2),
            set_check(
                "sigma_A((I-T)(I-S)) vs sigma_A(TS) off {0,1}",
                excise(spectrum(w, left_op), [0, 1], cut),
                excise(spectrum(w, right_op), [0, 1], cut),
                thr,
            ),
        ],
        weight=w.A,
        operators={"S": S, "T": T},
    )


def distinct_count(points, threshold: float) -> int:
    representatives: List[complex] = []
    for p in np.asarray(points, dtype=complex):
        if all(abs(p - q) > threshold for q in representatives):
            representatives.append(p)
    return len(representatives)


def sandwich_span_dimension(w: PositiveWeight) -> int:
    """dim span{A E_ij A}, by ranking the flattened sandwiches."""
    n = w.n
    rows = [np.outer(w.A[:, i], w.A[j, :]).ravel() for i in range(n) for j in range(n)]
    return numeric_rank(np.array(rows), w.tol)


@register_law("socle")
def _socle(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    counts = []
    for _ in range(MEMBERS_PER_TRIAL):
        T = ctx.member(w)
        counts.append(distinct_count(spectrum(w, T), ctx.threshold(T)))
    dimension = sandwich_span_dimension(w)
    return TrialOutcome(
        checks=[
            flag_check("distinct A-spectrum points <= rank(A)", max(counts) <= w.rank),
            flag_check("max distinct count attains rank(A)", max(counts) == w.rank),
            flag_check("dim span(A E_ij A) = rank(A)^2", dimension == w.rank ** 2),
        ],
        weight=w.A,
        metrics={"max_point_count": float(max(counts)), "span_dimension": float(dimension)},
    )


@register_law("spectrum_determines")
def _spectrum_determines(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    T = ctx.member(w)
    S = T + ctx.kernel_supported(w)
    checks = [Check("AS = AT", op_norm(w.A @ (S - T)), ctx.tol.residual_tol * w.norm * (1 + op_norm(T)))]
    for j in range(MEMBERS_PER_TRIAL):
        X = ctx.member(w)
        thr = ctx.threshold(S @ X, T @ X)
        checks.append(set_check(f"sigma_A(SX) = sigma_A(TX) [X{j}]", spectrum(w, S @ X), spectrum(w, T @ X), thr))

    S2, T2 = ctx.member(w), ctx.member(w)
    separated = op_norm(w.A @ (S2 - T2)) > 0.1
    found = False
    attempts = 0
    if separated:
        for attempts in range(1, WITNESS_BUDGET + 1):
            X = ctx.member(w)
            thr = ctx.threshold(S2 @ X, T2 @ X)
            if not match_multisets(spectrum(w, S2 @ X), spectrum(w, T2 @ X), thr).matched:
                found = True
                break
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"S": S, "T": T, "S_converse": S2, "T_converse": T2},
        inconclusive=separated and not found,
        metrics={"witnesses_found": float(found), "max_witness_attempts": float(attempts)},
    )


@register_law("radius_domination")
def _radius_domination(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    T = ctx.member(w)
    alpha = ctx.rng.uniform(0, 1) * np.exp(2j * np.pi * ctx.rng.uniform())
    S = alpha * T + ctx.kernel_supported(w)
    checks = []
    for j in range(MEMBERS_PER_TRIAL):
        X = ctx.member(w)
        rs, rt = aspectrum.a_radius_eig(w, S @ X), aspectrum.a_radius_eig(w, T @ X)
        checks.append(Check(f"r_A(SX) <= r_A(TX) [X{j}]", max(rs - rt, 0.0), ctx.threshold(S @ X, T @ X)))

    S2, T2 = ctx.member(w), ctx.member(w)
    if w.rank == 1:
        # Rank one makes every pair proportional; keep |alpha| > 1 so a witness exists.
        s, t = aspectrum.compress(w, S2)[0, 0], aspectrum.compress(w, T2)[0, 0]
        if abs(s) < abs(t):
            S2, T2 = T2, S2
    found = False
    attempts = 0
    for attempts in range(1, WITNESS_BUDGET + 1):
        X = ctx.member(w)
        margin = 1e3 * ctx.threshold(S2 @ X, T2 @ X)
        if aspectrum.a_radius_eig(w, S2 @ X) > aspectrum.a_radius_eig(w, T2 @ X) + margin:
            found = True
            break
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"S": S, "T": T, "S_converse": S2, "T_converse": T2},
        inconclusive=not found,
        metrics={"witnesses_found": float(found), "max_witness_attempts": float(attempts)},
    )


def _unit_vector(ctx: TrialContext, n: int) -> np.ndarray:
    q = complex_gaussian(ctx.rng, (n,))
    return q / np.linalg.norm(q)


@register_law("gkz")
def _gkz(ctx: TrialContext) -> TrialOutcome:
    n = ctx.dimension()
    q = _unit_vector(ctx, n)
    a = math.exp(ctx.rng.uniform(-math.log(ctx.cfg.spread), math.log(ctx.cfg.spread)))
    rank_one = weightspace.make_weight(a * np.outer(q, q.conj()), ctx.tol)
    phi = LinearFunctional.vector_state(q)

    checks = [Check("phi(I) = 1", abs(phi(np.eye(n)) - 1), ctx.tol.residual_tol)]
    for j in range(10):
        X, Y = ctx.member(rank_one), ctx.member(rank_one)
        thr = ctx.threshold(X @ Y, X, Y)
        checks.append(Check(f"phi(X) in sigma_A(X) [{j}]", set_distance([phi(X)], spectrum(rank_one, X)), thr))
        checks.append(Check(f"phi(XY) = phi(X)phi(Y) [{j}]", abs(phi(X @ Y) - phi(X) * phi(Y)), thr))
        checks.append(Check(
            f"phi(XY+YX) = 2phi(X)phi(Y) [{j}]", abs(phi(X @ Y + Y @ X) - 2 * phi(X) * phi(Y)), 2 * thr
        ))

    # A random trace functional must either leave the A-spectrum or be multiplicative.
    w = ctx.weight()
    candidate = LinearFunctional(ctx.gaussian((w.n, w.n)))
    rejected_after = 0
    for rejected_after in range(1, GKZ_INCLUSION_SAMPLES + 1):
        X = ctx.member(w)
        if set_distance([candidate(X)], spectrum(w, X)) > ctx.threshold(X):
            break
    else:
        rejected_after = 0

    if rejected_after == 0:
        logger.warning(f"gkz trial {ctx.index}: random functional survived {GKZ_INCLUSION_SAMPLES} inclusion samples")
        for j in range(GKZ_PAIR_SAMPLES):
            X, Y = ctx.member(w), ctx.member(w)
            checks.append(Check(
                f"surviving functional multiplicative [{j}]",
                abs(candidate(X @ Y) - candidate(X) * candidate(Y)),
                ctx.threshold(X @ Y, X, Y),
            ))
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"rank_one_weight": rank_one.A, "candidate_F": candidate.F},
        metrics={
            "random_functionals_rejected": float(rejected_after > 0),
            "max_samples_to_rejection": float(rejected_after),
        },
    )


@register_law("radical")
def _radical(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    T = ctx.member(w)
    D = w.P @ T - T @ w.P
    checks = []
    for j in range(MEMBERS_PER_TRIAL):
        X = ctx.member(w)
        DX = D @ X
        classical = float(np.max(np.abs(general_eig(DX, tol=ctx.tol).values)))
        checks.append(Check(f"r(DX) = 0 [{j}]", classical, ctx.nilpotent_tol(DX)))
        checks.append(Check(f"r_A(DX) = 0 [{j}]", aspectrum.a_radius_eig(w, DX), ctx.threshold(DX)))
    return TrialOutcome(checks=checks, weight=w.A, operators={"T": T, "D": D})


@register_law("diag_characters")
def _diag_characters(ctx: TrialContext) -> TrialOutcome:
    n = ctx.dimension()
    rank = ctx.rank_for(n)
    log_spread = math.log(ctx.cfg.spread)
    a = np.zeros(n)
    a[ctx.rng.permutation(n)[:rank]] = np.exp(ctx.rng.uniform(-log_spread, log_spread, rank))
    w = weightspace.PositiveWeight.from_sqrt_diagonal(np.sqrt(a), ctx.tol)
    t = ctx.gaussian((n,))
    T = np.diag(t)
    thr = ctx.threshold(T)

    base = spectrum(w, T)
    checks = [set_check("sigma_A(T) = {t_i : a_i > 0}", base, t[a > ctx.tol.rank_rel_tol * a.max()], thr)]

    kernel_shift = ctx.kernel_supported(w)
    for k in (1, 2, 4):
        checks.append(set_check(f"kernel perturbation 1/{k}", spectrum(w, T + kernel_shift / k), base, thr))

    gaps = np.abs(base[:, None] - base[None, :]) + np.diag(np.full(base.size, np.inf))
    start = min(0.25 * float(gaps.min()), 1.0) if base.size > 1 else 1.0
    G = ctx.member(w)
    G_norm = weightspace.operator_a_seminorm(w, G)
    for k in range(6):
        E = (start * 2.0 ** -k / G_norm) * G
        distance = weightspace.operator_a_seminorm(w, E)
        moved = match_multisets(spectrum(w, T + E), base, thr + distance)
        # Normal compression: every point moves by at most ||E||_A; only the excess is an error.
        excess = max(moved.worst - distance, 0.0) if moved.matched else math.inf
        checks.append(Check(f"continuity step {k}", excess, thr))
    return TrialOutcome(checks=checks, weight=w.A, operators={"T": T, "G": G})


@register_law("rank_one_operator")
def _rank_one_operator(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    x = w.U @ complex_gaussian(ctx.rng, (w.rank,))
    y = complex_gaussian(ctx.rng, (w.n,))
    z = w.sqrtA @ y
    variant = ctx.index % 3
    if variant == 1 and w.rank >= 2:
        x = x - (np.vdot(z, x) / np.vdot(z, z)) * z
    elif variant == 2:
        x = z / np.vdot(z, z).real
    R = np.outer(x, z.conj())
    expected = np.vdot(z, x)
    points = spectrum(w, R)
    checks = [Check("sigma_A(x (A^1/2 y)*) in {0, <x, A^1/2 y>}", set_distance(points, [0, expected]), ctx.nilpotent_tol(R))]
    if variant == 2:
        checks.append(Check("<x, A^1/2 y> = 1", abs(expected - 1.0), ctx.threshold(R)))
        checks.append(Check("1 in sigma_A", float(np.min(np.abs(points - 1.0))), ctx.threshold(R)))
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"R": R},
        metrics={"trace_one_cases": float(variant == 2)},
    )


@register_law("invertibility_routes", trial_factor=2.5)
def _invertibility_routes(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    T = ctx.member(w)
    variant = ctx.index % 3
    if variant == 1:
        shift = ctx.rng.choice(spectrum(w, T))
        T = T - shift * np.eye(w.n)
    elif variant == 2:
        B = aspectrum.compress(w, T)
        B[:, int(ctx.rng.integers(w.rank))] = 0
        T = assemble_blocks(w, B, w.V.conj().T @ T @ w.U, w.V.conj().T @ T @ w.V)

    by_compression = aspectrum.a_invertible(w, T, aspectrum.InvertibilityRoute.COMPRESSION)
    by_douglas = aspectrum.a_invertible(w, T, aspectrum.InvertibilityRoute.DOUGLAS)
    B = aspectrum.compress(w, T)
    zero_free = not aspectrum.contains_zero(aspectrum.a_spectrum(w, T), ctx.threshold(B))
    checks = [
        flag_check("compression <=> douglas", by_compression.invertible == by_douglas.invertible),
        flag_check("compression <=> 0 not in sigma_A", by_compression.invertible == zero_free),
    ]
    if by_compression.invertible:
        S = by_compression.inverse
        singular = np.linalg.svd(B, compute_uv=False)
        bound = ctx.tol.residual_tol * w.norm * singular[0] / singular[-1]
        checks.append(Check("ATS = A", op_norm(w.A @ T @ S - w.A), bound))
        checks.append(Check("AST = A", op_norm(w.A @ S @ T - w.A), bound))
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"T": T},
        metrics={"invertible_cases": float(by_compression.invertible)},
    )


@register_law("radius_bounds")
def _radius_bounds(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    T = ctx.member(w)
    L = weightspace.half_adjoint(w, T)
    radius = aspectrum.a_radius_eig(w, T)
    norm_T = weightspace.operator_a_seminorm(w, T)
    norm_L = weightspace.operator_a_seminorm(w, L)
    classical = float(np.max(np.abs(general_eig(T, tol=ctx.tol).values)))
    thr = ctx.threshold(T)
    checks = [
        Check("r_A(T) <= ||T||_A", max(radius - norm_T, 0.0), thr),
        Check("r_A(T) <= max(||T||_A, ||L||_A)", max(radius - max(norm_T, norm_L), 0.0), thr),
        Check("r_A(T) <= r(T)", max(radius - classical, 0.0), thr),
    ]
    if radius >= GELFAND_MIN_RADIUS:
        gelfand = aspectrum.a_radius_gelfand(w, T, Config.GELFAND_DOUBLINGS)
        checks.append(Check("Gelfand radius", abs(gelfand - radius), GELFAND_REL_TOL * (1 + radius)))
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"T": T},
        metrics={"gelfand_cases": float(radius >= GELFAND_MIN_RADIUS)},
    )


@register_law("conjugate_adjoint")
def _conjugate_adjoint(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    T = ctx.member(w)
    L = weightspace.half_adjoint(w, T)
    thr = ctx.threshold(T, L)
    points = spectrum(w, T)
    pure = aspectrum.pure_state_spectrum(w, T)
    checks = [
        set_check("sigma_A(T) = conj(sigma_A(L))", points, np.conj(spectrum(w, L)), thr),
        set_check("pure-state spectrum = compression spectrum", pure.points, points, thr),
    ]
    if pure.residuals.get("max_trace_defect") is not None:
        checks.append(Check("tr(QP) = 1", pure.residuals["max_trace_defect"], ctx.tol.residual_tol))
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"T": T},
        metrics={"degenerate_pure_states": float(pure.degenerate)},
    )


@register_law("spectrum_inclusion")
def _spectrum_inclusion(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    r, k = w.rank, w.n - w.rank
    T = ctx.member(w)
    thr = ctx.threshold(T)
    cut = ctx.excision_tol(T)
    classical = general_eig(T, tol=ctx.tol).values
    checks = [
        Check("sigma_A(T) in sigma(T)", set_distance(spectrum(w, T), classical), thr),
        set_check(
            "sigma_A(T) = sigma(PT) off 0",
            excise(spectrum(w, T), [0], cut),
            excise(general_eig(w.P @ T, tol=ctx.tol).values, [0], cut),
            thr,
        ),
    ]

    H = ctx.gaussian((r, r))
    H = H + H.conj().T
    hermitian = assemble_blocks(w, H / w.D[:, None], ctx.gaussian((k, r)), ctx.gaussian((k, k)))
    checks.append(Check("AT Hermitian", op_norm(w.A @ hermitian - (w.A @ hermitian).conj().T), ctx.threshold(w.A @ hermitian)))
    checks.append(Check(
        "AT Hermitian: sigma_A(T) in sigma(T)",
        set_distance(spectrum(w, hermitian), general_eig(hermitian, tol=ctx.tol).values),
        ctx.threshold(hermitian),
    ))

    commuting = w.U @ np.diag(ctx.gaussian((r,))) @ w.U.conj().T
    if k:
        commuting = commuting + w.V @ ctx.gaussian((k, k)) @ w.V.conj().T
    checks.append(Check("TA = AT", op_norm(commuting @ w.A - w.A @ commuting), ctx.threshold(commuting) * w.norm))
    checks.append(Check(
        "TA = AT: sigma_A(T) in sigma(T)",
        set_distance(spectrum(w, commuting), general_eig(commuting, tol=ctx.tol).values),
        ctx.threshold(commuting),
    ))
    return TrialOutcome(
        checks=checks,
        weight=w.A,
        operators={"T": T, "T_hermitian_product": hermitian, "T_commuting": commuting},
    )


@register_law("weight_identities")
def _weight_identities(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    thr = ctx.threshold(w.A)
    classical = hermitian_eig(w.A, ctx.tol).values
    norm_A = op_norm(w.A)
    checks = [
        set_check("sigma_A(A) = sigma(A) off 0", spectrum(w, w.A), excise(classical, [0], thr), thr),
        set_check("sigma_A(P) = {1}", spectrum(w, w.P), np.ones(w.rank), thr),
        Check("r_A(A) = ||A||", abs(aspectrum.a_radius_eig(w, w.A) - norm_A), thr),
        Check("||A||_A = ||A||", abs(weightspace.operator_a_seminorm(w, w.A) - norm_A), thr),
        Check(
            "A-inverse of A is A^+",
            op_norm(aspectrum.a_inverse(w, w.A) - w.A_pinv),
            ctx.tol.residual_tol * (1 + op_norm(w.A_pinv)) ** 2,
        ),
    ]

    T = ctx.member(w)
    L = weightspace.half_adjoint(w, T)
    thr_T = ctx.threshold(T, L)
    checks.append(Check("||T||_A = ||PL||", abs(weightspace.operator_a_seminorm(w, T) - op_norm(w.P @ L)), thr_T))
    checks.append(Check("||L||_A = ||PT||", abs(weightspace.operator_a_seminorm(w, L) - op_norm(w.P @ T)), thr_T))
    return TrialOutcome(checks=checks, weight=w.A, operators={"T": T})


def law_ids() -> List[str]:
    return list(LAW_REGISTRY)


def _run_trial(spec: LawSpec, cfg: FuzzConfig, law_seed: int, index: int) -> TrialOutcome:
    ctx = TrialContext(cfg, trial_rng(law_seed, index), index)
    try:
        return spec.trial(ctx)
    except SpectralError as e:
        logger.debug(f"{spec.law_id} trial {index} raised {type(e).__name__}: {e}")
        return TrialOutcome(checks=[], error_message=f"{type(e).__name__}: {e}")


def trial_count(law_id: str, cfg: FuzzConfig) -> int:
    return int(math.ceil(cfg.trials * LAW_REGISTRY[law_id].trial_factor))


def replay_trial(law_id: str, cfg: FuzzConfig, trial_index: int) -> TrialOutcome:
    if law_id not in LAW_REGISTRY:
        raise UnknownLaw(law_id)
    return _run_trial(LAW_REGISTRY[law_id], cfg, derive_seed(cfg.seed, law_id), trial_index)


def _merge_metrics(total: Dict[str, float], metrics: Dict[str, float]) -> None:
    for key, value in metrics.items():
        if key.startswith("max_"):
            total[key] = max(total.get(key, 0.0), value)
        else:
            total[key] = total.get(key, 0.0) + value


def run_law(law_id: str, cfg: FuzzConfig) -> LawReport:
    if law_id not in LAW_REGISTRY:
        raise UnknownLaw(law_id)
    spec = LAW_REGISTRY[law_id]
    law_seed = derive_seed(cfg.seed, law_id)
    trials = trial_count(law_id, cfg)

    started = time.perf_counter()
    passed = inconclusive = 0
    worst = 0.0
    metrics: Dict[str, float] = {}
    counterexample: Optional[Counterexample] = None
    for index in range(trials):
        outcome = _run_trial(spec, cfg, law_seed, index)
        worst = max(worst, outcome.deviation)
        _merge_metrics(metrics, outcome.metrics)
        if outcome.passed:
            passed += 1
            inconclusive += int(outcome.inconclusive)
        elif counterexample is None:
            counterexample = Counterexample(
                law_seed=law_seed,
                trial_index=index,
                message=outcome.message,
                weight=outcome.weight,
                operators=outcome.operators,
            )

    elapsed = time.perf_counter() - started
    if inconclusive:
        logger.warning(f"{law_id}: {inconclusive} witness searches exhausted their budget")
    logger.info(f"{law_id}: {passed}/{trials} passed, worst deviation {worst:.3e}, {elapsed:.2f}s")
    return LawReport(
        law_id=law_id,
        trials=trials,
        passed=passed,
        worst_deviation=worst,
        counterexample=counterexample,
        elapsed=elapsed,
        inconclusive=inconclusive,
        metrics=metrics,
    )


def run_suite(cfg: FuzzConfig, law_ids: Optional[Iterable[str]] = None) -> List[LawReport]:
    """Runs the given laws (all registered laws when None) in order."""
    selected = list(LAW_REGISTRY) if law_ids is None else list(law_ids)
    unknown = [law_id for law_id in selected if law_id not in LAW_REGISTRY]
    if unknown:
        raise UnknownLaw(f"Unknown law ids: {', '.join(unknown)}")
    return [run_law(law_id, cfg) for law_id in selected]


def law_commutation(cfg: FuzzConfig) -> LawReport:
    return run_law("commutation", cfg)


def law_orthogonal_sum(cfg: FuzzConfig) -> LawReport:
    return run_law("orthogonal_sum", cfg)


def law_idempotent(cfg: FuzzConfig) -> LawReport:
    return run_law("idempotent", cfg)


def law_socle(cfg: FuzzConfig) -> LawReport:
    return run_law("socle", cfg)


def law_spectrum_determines(cfg: FuzzConfig) -> LawReport:
    return run_law("spectrum_determines", cfg)


def law_radius_domination(cfg: FuzzConfig) -> LawReport:
    return run_law("radius_domination", cfg)


def law_gkz(cfg: FuzzConfig) -> LawReport:
    return run_law("gkz", cfg)


def law_radical(cfg: FuzzConfig) -> LawReport:
    return run_law("radical", cfg)


def law_diag_characters(cfg: FuzzConfig) -> LawReport:
    return run_law("diag_characters", cfg)


def law_rank_one_operator(cfg: FuzzConfig) -> LawReport:
    return run_law("rank_one_operator", cfg)


def law_invertibility_routes(cfg: FuzzConfig) -> LawReport:
    return run_law("invertibility_routes", cfg)


def law_radius_bounds(cfg: FuzzConfig) -> LawReport:
    return run_law("radius_bounds", cfg)


def law_conjugate_adjoint(cfg: FuzzConfig) -> LawReport:
    return run_law("conjugate_adjoint", cfg)


def law_spectrum_inclusion(cfg: FuzzConfig) -> LawReport:
    return run_law("spectrum_inclusion", cfg)


def law_weight_identities(cfg: FuzzConfig) -> LawReport:
    return run_law("weight_identities", cfg)
