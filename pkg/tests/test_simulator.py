import numpy as np
import pytest

from lcc import functions
from lcc.errors import BudgetViolation, DecodingFailure, InfeasibleParams, NotEnoughReturns
from lcc.scheme import SchemeParams, Variant
from lcc.simulator import RANDOM_DELAYS, DelayModel, FaultPlan, benchmark, run_round, sweep_region

SQUARE = functions.elementwise_square(2)


def data(rng, K, p, width=2):
    return [[int(v) for v in rng.integers(0, p, width)] for _ in range(K)]


class TestPlans:
    def test_disjoint(self):
        with pytest.raises(ValueError):
            FaultPlan({1}, {1})

    def test_budget(self):
        params = SchemeParams(8, 2, 1, 1, 1, 2, 11)
        FaultPlan({0}, {1}).check(params)
        with pytest.raises(BudgetViolation):
            FaultPlan({0}, {1, 2}).check(params)

    def test_random_sizes(self):
        plan = FaultPlan.random(np.random.default_rng(0), 10, 3, 2)
        assert len(plan.straggler_ids) == 3 and len(plan.adversary_ids) == 2


class TestRound:
    @pytest.mark.parametrize("rule", ["random", "offset", "targeted"])
    def test_worked_example(self, rule):
        params = SchemeParams(8, 2, 1, 1, 1, 2, 11)
        rng = np.random.default_rng(7)
        for seed in range(20):
            plan = FaultPlan.random(rng, 8, 1, 1, rule)
            rep = run_round(params, SQUARE, data(rng, 2, 11), plan, seed)
            assert rep.match and rep.within_budget and rep.waited_for == 7
            assert rep.corrected_ids <= plan.adversary_ids
            statuses = {w.worker_id: w.status for w in rep.workers}
            assert [statuses[j] for j in plan.straggler_ids] == ["straggler"]

    def test_repetition(self):
        params = SchemeParams(5, 2, 0, 0, 0, 1, 127, Variant.UNCODED_REPETITION)
        rng = np.random.default_rng(0)
        rep = run_round(params, functions.identity(2), data(rng, 2, 127))
        assert rep.match and rep.waited_for == 2

    def test_over_budget(self):
        params = SchemeParams(8, 2, 1, 1, 1, 2, 127)
        rng = np.random.default_rng(3)
        outcomes = []
        for seed in range(20):
            plan = FaultPlan.random(rng, 8, 0, 2, "targeted")
            try:
                rep = run_round(params, SQUARE, data(rng, 2, 127), plan, seed)
                assert not rep.within_budget
                outcomes.append(rep.match)
            except (DecodingFailure, NotEnoughReturns):
                outcomes.append(False)
        assert not all(outcomes)

    def test_degree_too_high(self):
        params = SchemeParams(8, 2, 0, 0, 0, 1, 127)
        with pytest.raises(ValueError):
            run_round(params, SQUARE, [[1, 2], [3, 4]])

    def test_deterministic(self):
        params = SchemeParams(8, 2, 1, 1, 1, 2, 127)
        plan = FaultPlan({2}, {5}, "random", RANDOM_DELAYS)
        a = run_round(params, SQUARE, [[1, 2], [3, 4]], plan, 11)
        b = run_round(params, SQUARE, [[1, 2], [3, 4]], plan, 11)
        assert a.as_row() == b.as_row() and a.decoded == b.decoded


class TestSweep:
    def test_small_grid(self):
        res = sweep_region(max_N=6, degrees=(1, 2), trials=3, max_K=3)
        assert res["total_failures"] == 0
        assert res["infeasible_rejected"] == res["infeasible_checked"]
        rows = {(r["N"], r["K"], r["S"], r["A"], r["T"], r["d"]): r for r in res["rows"]}
        assert rows[(4, 3, 0, 0, 0, 2)]["variant"] == "uncoded_repetition"
        assert rows[(2, 3, 0, 0, 0, 1)]["variant"] == "infeasible"

    def test_planner_rejects(self):
        with pytest.raises(InfeasibleParams):
            SchemeParams(2, 3, 0, 0, 0, 1)


class TestBenchmark:
    def test_zero_delay_ordering_by_load(self):
        res = benchmark(40, 10, DelayModel(prob=0.0, delay=0.0), iterations=3)
        totals = {s["scheme"]: s["total"] for s in res["schemes"]}
        # no random delays: uncoded (load 1) is the fastest, the coded schemes tie
        assert totals["uncoded"] < totals["lagrange"] == totals["repetition"]

    def test_random_delays(self):
        res = benchmark(40, 10, RANDOM_DELAYS, iterations=20, seed=1, check_every=5)
        assert res["waited_for"] == {"lagrange": 7, "uncoded": 40}
        assert res["lcc_faster"]
        assert res["max_rel_error"] < 1e-6

    def test_reproducible(self):
        assert benchmark(iterations=5, seed=3) == benchmark(iterations=5, seed=3)
