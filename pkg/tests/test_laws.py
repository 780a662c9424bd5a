import json
import math

import numpy as np
import pytest

from src.core import laws, weightspace
from src.core.errors import ConvergenceFailure, UnknownLaw
from src.core.laws import (
    Check,
    FuzzConfig,
    LawReport,
    LawSpec,
    LinearFunctional,
    RankPolicy,
    TrialContext,
    TrialOutcome,
)
from src.utils.seeding import trial_rng

EXPECTED_LAWS = [
    "commutation",
    "orthogonal_sum",
    "idempotent",
    "socle",
    "spectrum_determines",
    "radius_domination",
    "gkz",
    "radical",
    "diag_characters",
    "rank_one_operator",
    "invertibility_routes",
    "radius_bounds",
    "conjugate_adjoint",
    "spectrum_inclusion",
    "weight_identities",
]


def _failing_trial(ctx: TrialContext) -> TrialOutcome:
    w = ctx.weight()
    return TrialOutcome(checks=[Check("always", 1.0, 0.5)], weight=w.A, operators={"T": np.eye(w.n)})


def _raising_trial(ctx: TrialContext) -> TrialOutcome:
    raise ConvergenceFailure("no convergence")


class TestFuzzConfig:

    def test_defaults(self):
        cfg = FuzzConfig()
        assert cfg.trials == 200
        assert cfg.dim_range == (2, 8)
        assert cfg.rank_policy == RankPolicy.MIXED

    @pytest.mark.parametrize(
        "kwargs",
        [{"trials": 0}, {"dim_range": (1, 4)}, {"dim_range": (5, 4)}, {"dim_range": (2, 13)}, {"scale": 0.0}, {"spread": 0.9}],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            FuzzConfig(**kwargs)

    def test_to_dict_is_json_serializable(self):
        payload = FuzzConfig(seed=3).to_dict()
        assert json.loads(json.dumps(payload))["seed"] == 3
        assert payload["tolerances"]["set_match_tol"] == 1e-8


class TestTrialContext:

    def _ctx(self, policy: RankPolicy) -> TrialContext:
        cfg = FuzzConfig(seed=1, trials=1, dim_range=(3, 6), rank_policy=policy)
        return TrialContext(cfg, trial_rng(99, 0), 0)

    def test_full_rank_policy(self):
        ctx = self._ctx(RankPolicy.FULL)
        for _ in range(10):
            w = ctx.weight()
            assert w.rank == w.n

    def test_deficient_policy(self):
        ctx = self._ctx(RankPolicy.DEFICIENT)
        for _ in range(10):
            w = ctx.weight()
            assert 1 <= w.rank < w.n

    def test_dimension_range(self):
        ctx = self._ctx(RankPolicy.MIXED)
        assert all(3 <= ctx.dimension() <= 6 for _ in range(30))

    def test_kernel_supported_is_killed_by_weight(self):
        ctx = self._ctx(RankPolicy.DEFICIENT)
        w = ctx.weight()
        K = ctx.kernel_supported(w)
        assert np.linalg.norm(w.A @ K) < 1e-10

    def test_members_are_members(self):
        ctx = self._ctx(RankPolicy.MIXED)
        w = ctx.weight()
        assert weightspace.membership(w, ctx.member(w))

    def test_same_index_same_draws(self):
        cfg = FuzzConfig(seed=1, trials=1)
        first = TrialContext(cfg, trial_rng(5, 3), 3).gaussian((2, 2))
        second = TrialContext(cfg, trial_rng(5, 3), 3).gaussian((2, 2))
        assert np.array_equal(first, second)


class TestHelpers:

    def test_vector_state_is_normalized(self):
        phi = LinearFunctional.vector_state([1.0, 1j, 0.0])
        assert phi(np.eye(3)) == pytest.approx(1.0)
        assert phi(np.diag([2.0, 4.0, 7.0])) == pytest.approx(3.0)

    def test_trace_functional(self):
        F = np.arange(4.0).reshape(2, 2)
        X = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert LinearFunctional(F)(X) == pytest.approx(np.trace(F @ X))

    def test_distinct_count(self):
        assert laws.distinct_count([1, 1 + 1e-12, 2, 3j], 1e-9) == 3

    @pytest.mark.parametrize("n,rank", [(3, 3), (4, 2), (5, 1)])
    def test_sandwich_span_dimension(self, n, rank):
        w = weightspace.random_weight(n + rank, n, rank)
        assert laws.sandwich_span_dimension(w) == rank ** 2

    def test_check_ratio(self):
        assert Check("zero", 0.0, 0.0).ratio == 0.0
        assert Check("inf", math.inf, 1.0).ratio == math.inf
        assert Check("half", 1.0, 2.0).ratio == 0.5

    def test_outcome_message(self):
        outcome = TrialOutcome(checks=[Check("a", 2.0, 1.0), Check("b", 0.0, 1.0)])
        assert not outcome.passed
        assert outcome.message.startswith("a: error")
        assert TrialOutcome(checks=[]).message == "ok"


class TestRegistry:

    def test_law_ids_in_suite_order(self):
        assert laws.law_ids() == EXPECTED_LAWS

    def test_public_wrappers_exist(self):
        for law_id in EXPECTED_LAWS:
            assert callable(getattr(laws, f"law_{law_id}"))

    def test_trial_factor(self):
        cfg = FuzzConfig(trials=10)
        assert laws.trial_count("invertibility_routes", cfg) == 25
        assert laws.trial_count("gkz", cfg) == 10

    def test_unknown_law_in_suite(self):
        with pytest.raises(UnknownLaw):
            laws.run_suite(FuzzConfig(trials=1), ["gkz", "no_such_law"])

    def test_unknown_law_single(self):
        with pytest.raises(UnknownLaw):
            laws.run_law("no_such_law", FuzzConfig(trials=1))


class TestRunLaw:

    def test_counterexample_is_recorded(self, monkeypatch):
        monkeypatch.setitem(laws.LAW_REGISTRY, "always_fails", LawSpec("always_fails", _failing_trial))
        report = laws.run_law("always_fails", FuzzConfig(seed=4, trials=3, dim_range=(2, 3)))
        assert report.passed == 0
        assert not report.ok
        assert report.worst_deviation == pytest.approx(2.0)
        assert report.counterexample.trial_index == 0
        bundle = report.counterexample.to_dict()
        assert bundle["weight"]["rows"] in (2, 3)
        assert "T" in bundle["operators"]

    def test_spectral_errors_fail_the_trial(self, monkeypatch):
        monkeypatch.setitem(laws.LAW_REGISTRY, "raises", LawSpec("raises", _raising_trial))
        report = laws.run_law("raises", FuzzConfig(trials=2))
        assert report.passed == 0
        assert report.worst_deviation == math.inf
        assert "ConvergenceFailure" in report.counterexample.message
        assert report.to_dict()["worst_deviation"] == "inf"

    def test_replay_reproduces_trial(self, small_fuzz_config):
        law_seed = laws.derive_seed(small_fuzz_config.seed, "commutation")
        direct = laws._run_trial(laws.LAW_REGISTRY["commutation"], small_fuzz_config, law_seed, 2)
        replayed = laws.replay_trial("commutation", small_fuzz_config, 2)
        assert np.array_equal(direct.weight, replayed.weight)
        assert direct.deviation == replayed.deviation

    def test_report_json_omits_elapsed(self, small_fuzz_config):
        report = laws.law_radius_bounds(small_fuzz_config)
        assert "elapsed" not in report.to_dict()
        assert report.to_dict(include_elapsed=True)["elapsed"] >= 0.0

    def test_metrics_are_merged(self):
        total = {}
        laws._merge_metrics(total, {"max_attempts": 3.0, "cases": 1.0})
        laws._merge_metrics(total, {"max_attempts": 2.0, "cases": 1.0})
        assert total == {"max_attempts": 3.0, "cases": 2.0}

    def test_law_report_ok(self):
        assert LawReport("x", trials=2, passed=2, worst_deviation=0.1).ok
        assert not LawReport("x", trials=2, passed=1, worst_deviation=3.0).ok


@pytest.mark.integration
class TestLawSuite:

    @pytest.mark.parametrize("law_id", EXPECTED_LAWS)
    def test_law_passes_small_run(self, law_id, small_fuzz_config):
        report = laws.run_law(law_id, small_fuzz_config)
        assert report.ok, report.counterexample.message if report.counterexample else ""
        assert report.worst_deviation <= 1.0

    @pytest.mark.parametrize("policy", [RankPolicy.FULL, RankPolicy.DEFICIENT])
    def test_rank_policies(self, policy):
        cfg = FuzzConfig(seed=77, trials=4, dim_range=(2, 6), rank_policy=policy)
        reports = laws.run_suite(cfg, ["commutation", "conjugate_adjoint", "invertibility_routes", "weight_identities"])
        assert all(r.ok for r in reports)

    def test_gkz_only(self):
        reports = laws.run_suite(FuzzConfig(seed=5, trials=10), ["gkz"])
        assert [r.law_id for r in reports] == ["gkz"]
        assert reports[0].trials == 10

    def test_fixed_seed_is_deterministic(self, small_fuzz_config):
        selected = ["idempotent", "socle", "diag_characters"]
        first = [r.to_dict() for r in laws.run_suite(small_fuzz_config, selected)]
        second = [r.to_dict() for r in laws.run_suite(small_fuzz_config, selected)]
        assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)

    def test_socle_reaches_rank(self, small_fuzz_config):
        report = laws.law_socle(small_fuzz_config)
        assert report.ok
        assert report.metrics["max_point_count"] <= small_fuzz_config.dim_range[1]

    def test_invertibility_routes_sees_both_outcomes(self):
        report = laws.law_invertibility_routes(FuzzConfig(seed=8, trials=6))
        assert report.ok
        assert 0 < report.metrics["invertible_cases"] < report.trials

    @pytest.mark.parametrize("seed", [0, 8, 2024])
    def test_rank_one_weights(self, seed):
        cfg = FuzzConfig(seed=seed, trials=6, dim_range=(2, 2), rank_policy=RankPolicy.DEFICIENT)
        reports = laws.run_suite(cfg, ["invertibility_routes", "rank_one_operator", "conjugate_adjoint", "weight_identities"])
        failing = [r.law_id for r in reports if not r.ok]
        assert failing == []
        routes = reports[0]
        assert 0 < routes.metrics["invertible_cases"] < routes.trials

    def test_rank_one_singular_trial_is_not_invertible(self):
        cfg = FuzzConfig(seed=3, trials=3, dim_range=(2, 3), rank_policy=RankPolicy.DEFICIENT)
        outcome = laws.replay_trial("invertibility_routes", cfg, 1)
        assert outcome.passed, outcome.message
        assert outcome.metrics["invertible_cases"] == 0.0

    def test_rank_one_operator_checks_trace_one_value(self, small_fuzz_config):
        outcome = laws.replay_trial("rank_one_operator", small_fuzz_config, 2)
        names = [c.name for c in outcome.checks]
        assert "<x, A^1/2 y> = 1" in names
        assert "1 in sigma_A" in names
        assert outcome.passed, outcome.message
        assert outcome.metrics["trace_one_cases"] == 1.0

    def test_rank_one_operator_counts_trace_one_cases(self, small_fuzz_config):
        report = laws.law_rank_one_operator(small_fuzz_config)
        assert report.ok
        assert report.metrics["trace_one_cases"] == sum(1 for i in range(report.trials) if i % 3 == 2)

    @pytest.mark.parametrize("seed", [2024, 31, 404])
    def test_diag_characters_leaves_margin(self, seed):
        report = laws.law_diag_characters(FuzzConfig(seed=seed, trials=10, dim_range=(2, 6)))
        assert report.ok
        assert report.worst_deviation < 0.5

    def test_diag_characters_continuity_reports_excess(self, small_fuzz_config):
        outcome = laws.replay_trial("diag_characters", small_fuzz_config, 0)
        continuity = [c for c in outcome.checks if c.name.startswith("continuity step")]
        assert len(continuity) == 6
        assert all(c.error <= 1e-9 for c in continuity)


@pytest.mark.slow
class TestFullSuite:

    def test_default_suite_passes(self):
        reports = laws.run_suite(FuzzConfig())
        failing = [r.law_id for r in reports if not r.ok]
        assert failing == []
