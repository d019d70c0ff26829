"""In-process worker pool with a virtual clock and injected faults.

Timing is synthetic: each worker's arrival time is its compute load times
``DelayModel.compute_cost`` plus a fixed communication cost plus, with
probability ``prob``, an extra ``delay`` seconds.  Stragglers never arrive.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import functions
from .codec import build_matrix, build_matrix_real, encode, encode_real, encode_repetition, make_pad
from .errors import BudgetViolation, DecodingFailure, InfeasibleParams, NotEnoughReturns
from .field import PrimeField
from .functions import ComputationSpec
from .rsdecode import DecodeBudget, decode_real, decode_repetition, decode_robust
from .scheme import (
    SchemeParams,
    Variant,
    feasible,
    make_eval_points,
    regression_lower_bound,
    regression_threshold,
)

CORRUPTIONS = ("random", "offset", "targeted")


@dataclass(frozen=True)
class DelayModel:
    compute_cost: float = 1e-3
    comm_cost: float = 5e-3
    prob: float = 0.0
    delay: float = 0.0

    def as_dict(self) -> dict:
        return {"compute_cost": self.compute_cost, "comm_cost": self.comm_cost,
                "prob": self.prob, "delay": self.delay}


RANDOM_DELAYS = DelayModel(prob=0.05, delay=0.5)


@dataclass(frozen=True)
class FaultPlan:
    straggler_ids: frozenset = frozenset()
    adversary_ids: frozenset = frozenset()
    corruption: str = "random"
    delay: DelayModel = DelayModel()

    def __post_init__(self):
        object.__setattr__(self, "straggler_ids", frozenset(self.straggler_ids))
        object.__setattr__(self, "adversary_ids", frozenset(self.adversary_ids))
        if self.straggler_ids & self.adversary_ids:
            raise ValueError("a worker cannot be both straggler and adversary")
        if self.corruption not in CORRUPTIONS:
            raise ValueError(f"unknown corruption rule {self.corruption!r}")

    def within(self, params: SchemeParams) -> bool:
        return len(self.straggler_ids) <= params.S and len(self.adversary_ids) <= params.A

    def check(self, params: SchemeParams) -> None:
        if not self.within(params):
            raise BudgetViolation(
                f"{len(self.straggler_ids)} stragglers / {len(self.adversary_ids)} adversaries "
                f"exceed S={params.S}, A={params.A}")

    @classmethod
    def random(cls, rng: np.random.Generator, N: int, S: int, A: int, corruption: str = "random",
               delay: DelayModel = DelayModel()) -> "FaultPlan":
        ids = rng.permutation(N)
        return cls(frozenset(int(i) for i in ids[:S]), frozenset(int(i) for i in ids[S:S + A]),
                   corruption, delay)


@dataclass(frozen=True)
class WorkerReturn:
    worker_id: int
    payload: tuple | None
    status: str  # ok | straggler | adversarial; ground truth for tests only
    arrival: float


@dataclass
class RoundReport:
    decoded: list
    expected: list
    wall_clock: float
    waited_for: int
    corrected_ids: set
    match: bool
    within_budget: bool = True
    workers: list = field(default_factory=list, repr=False)

    def as_row(self) -> dict:
        return {"wall_clock": round(self.wall_clock, 9), "waited_for": self.waited_for,
                "corrected_ids": " ".join(str(i) for i in sorted(self.corrected_ids)),
                "match": self.match, "within_budget": self.within_budget}


def _arrivals(rng: np.random.Generator, loads: Sequence[float], delay: DelayModel) -> np.ndarray:
    slow = rng.random(len(loads)) < delay.prob
    return np.asarray(loads) * delay.compute_cost + delay.comm_cost + slow * delay.delay


def _corrupt(F: PrimeField, rng: np.random.Generator, rule: str, honest: list[list[int]],
             plan: FaultPlan, alphas: Sequence[int], order: Sequence[int], D: int) -> dict[int, list[int]]:
    p = F.p
    out = {}
    if rule == "targeted":
        # shift toward another codeword that agrees with the truth on the D fastest honest workers
        anchors = [alphas[j] for j in order if j not in plan.adversary_ids][:D]
        L = len(honest[0])
        shift = [int(rng.integers(1, p)) for _ in range(L)]
        for a in plan.adversary_ids:
            lam = 1
            for r in anchors:
                lam = lam * (alphas[a] - r) % p
            out[a] = [(h + c * lam) % p for h, c in zip(honest[a], shift)]
            if out[a] == honest[a]:
                out[a] = [(h + 1) % p for h in honest[a]]
        return out
    for a in plan.adversary_ids:
        if rule == "random":
            out[a] = [int(v) for v in rng.integers(0, p, size=len(honest[a]))]
        else:
            out[a] = [(h + int(rng.integers(1, p))) % p for h in honest[a]]
    return out


def run_round(params: SchemeParams, spec: ComputationSpec, X: Sequence[Sequence[int]],
              plan: FaultPlan = FaultPlan(), seed: int = 0) -> RoundReport:
    """Encode, let workers evaluate, inject faults, decode, compare to direct evaluation.

    Plans over budget are allowed (to probe the region boundary); they surface
    as ``DecodingFailure``/``NotEnoughReturns`` or as ``match=False``.
    """
    if feasible(params.N, params.K, params.S, params.A, params.T, params.d) is Variant.INFEASIBLE:
        raise InfeasibleParams("parameters outside both feasibility regions")
    if spec.declared_degree > params.d:
        raise ValueError(f"computation degree {spec.declared_degree} exceeds planned d={params.d}")
    F = params.field
    ss = np.random.SeedSequence(seed)
    pad_seq, fault_seq, *worker_seqs = ss.spawn(2 + params.N)
    fault_rng = np.random.default_rng(fault_seq)
    points = make_eval_points(params)
    M = len(X[0])

    if params.variant is Variant.UNCODED_REPETITION:
        shares = encode_repetition(X, points)
    else:
        U = build_matrix(F, points)
        pad = make_pad(F, params.T, M, int(pad_seq.generate_state(1, np.uint64)[0]))
        shares = encode(X, pad, U)

    honest = [functions.evaluate(spec, s, F) for s in shares]
    times = np.array([_arrivals(np.random.default_rng(ws), [1.0], plan.delay)[0] for ws in worker_seqs])
    order = sorted((j for j in range(params.N) if j not in plan.straggler_ids), key=lambda j: (times[j], j))
    D = params.composition_degree
    bad = _corrupt(F, fault_rng, plan.corruption, honest, plan, points.alphas, order, D) \
        if plan.adversary_ids else {}

    workers = []
    for j in range(params.N):
        if j in plan.straggler_ids:
            workers.append(WorkerReturn(j, None, "straggler", math.inf))
        elif j in bad:
            workers.append(WorkerReturn(j, tuple(bad[j]), "adversarial", float(times[j])))
        else:
            workers.append(WorkerReturn(j, tuple(honest[j]), "ok", float(times[j])))
    # the decoder only ever sees id -> payload, in arrival order
    returns = {j: list(workers[j].payload) for j in order}
    expected = [functions.evaluate(spec, x, F) for x in X]
    if params.variant is Variant.UNCODED_REPETITION:
        decoded, caught, waited = decode_repetition(returns, points, params.A)
    else:
        decoded, caught = decode_robust(F, returns, points, DecodeBudget.for_params(params))
        waited = min(params.needed, len(returns))
    wall = float(times[order[waited - 1]]) if waited else 0.0
    return RoundReport(decoded, expected, wall, waited, caught, decoded == expected,
                       plan.within(params), workers)


def sweep_region(max_N: int = 12, degrees: Sequence[int] = (1, 2, 3), trials: int = 20, max_K: int = 6,
                 p: int = 127, seed: int = 0, width: int = 2) -> dict:
    """Run every feasible (N, K, S, A, T, d) and probe the infeasible frontier.

    Rows cover all feasible tuples plus infeasible tuples one step past the
    boundary.  ``rejected`` counts infeasible tuples (in the box S, T <= N,
    A <= N/2) that the planner refused.
    """
    rows = []
    rng = np.random.default_rng(seed)
    rejected = checked_infeasible = 0
    for N, K, d in itertools.product(range(1, max_N + 1), range(1, max_K + 1), degrees):
        spec = functions.for_degree(d, width)
        for T, A, S in itertools.product(range(N + 1), range(N // 2 + 1), range(N + 1)):
            variant = feasible(N, K, S, A, T, d)
            if variant is Variant.INFEASIBLE:
                checked_infeasible += 1
                try:
                    SchemeParams(N, K, S, A, T, d, p)
                except InfeasibleParams:
                    rejected += 1
                frontier = (S, A, T) == (0, 0, 0) or any(
                    v > 0 and feasible(N, K, *(S - (i == 0), A - (i == 1), T - (i == 2)), d)
                    is not Variant.INFEASIBLE
                    for i, v in enumerate((S, A, T)))
                if frontier:
                    rows.append({"N": N, "K": K, "S": S, "A": A, "T": T, "d": d,
                                 "variant": "infeasible", "trials": 0, "failures": 0})
                continue
            params = SchemeParams(N, K, S, A, T, d, p)
            failures = 0
            for t in range(trials):
                rule = CORRUPTIONS[t % len(CORRUPTIONS)]
                plan = FaultPlan.random(rng, N, S, A, rule)
                X = [[int(v) for v in rng.integers(0, p, size=spec.input_dim)] for _ in range(K)]
                try:
                    rep = run_round(params, spec, X, plan, int(rng.integers(0, 2**63)))
                    failures += not rep.match
                except (DecodingFailure, NotEnoughReturns):
                    failures += 1
            rows.append({"N": N, "K": K, "S": S, "A": A, "T": T, "d": d,
                         "variant": str(variant), "trials": trials, "failures": failures})
    feasible_rows = [r for r in rows if r["variant"] != "infeasible"]
    return {
        "rows": rows,
        "feasible_tuples": len(feasible_rows),
        "total_failures": sum(r["failures"] for r in feasible_rows),
        "infeasible_checked": checked_infeasible,
        "infeasible_rejected": rejected,
    }


# --------------------------------------------------------------------------
# benchmark: uncoded vs repetition vs Lagrange on the regression workload


@dataclass
class SchemeTiming:
    scheme: str
    load: int
    threshold: int
    comm: float = 0.0
    comp: float = 0.0
    total: float = 0.0
    waited_for: list = field(default_factory=list)

    def as_row(self) -> dict:
        return {"scheme": self.scheme, "batches_per_worker": self.load, "recovery_threshold": self.threshold,
                "comm": round(self.comm, 9), "comp": round(self.comp, 9), "total": round(self.total, 9),
                "waited_for_max": max(self.waited_for) if self.waited_for else 0}


def _wait(times: np.ndarray, loads: np.ndarray, delay: DelayModel, ready) -> tuple[float, float, int]:
    """Scan arrivals in order until ``ready(prefix)``; return (total, comp, count)."""
    order = sorted(range(len(times)), key=lambda j: (times[j], j))
    for k in range(1, len(order) + 1):
        if ready(order[:k]):
            used = order[:k]
            total = float(times[order[k - 1]])
            comp = float(max(loads[j] for j in used) * delay.compute_cost)
            return total, comp, k
    raise NotEnoughReturns("scheme never became decodable")


def benchmark(n: int = 40, r: int = 10, delay: DelayModel = RANDOM_DELAYS, iterations: int = 100,
              seed: int = 0, m: int = 80, d: int = 10, check_every: int = 0) -> dict:
    """Simulated run-time of one GD job (``iterations`` rounds) under three storage schemes.

    All schemes see the same per-worker delay draws in each iteration.  When
    ``check_every`` > 0 the Lagrange decode of X^T X w is also carried out in
    float64 every that many iterations and its relative error recorded.
    """
    K = -(-n // r)
    R = regression_threshold(n, r)
    rng = np.random.default_rng(seed)
    schemes = {
        "uncoded": SchemeTiming("uncoded", 1, n),
        "repetition": SchemeTiming("repetition", r, n - r + 1),
        "lagrange": SchemeTiming("lagrange", r, R),
    }
    block_of = [j % K for j in range(n)]
    max_err = 0.0
    if check_every:
        Xd = rng.standard_normal((m, d))
        blocks = np.array_split(Xd, K)
        rows = max(len(b) for b in blocks)
        padded = np.stack([np.vstack([b, np.zeros((rows - len(b), d))]) for b in blocks])
        U = build_matrix_real(range(1, K + 1), range(n))
        shares = encode_real(padded.reshape(K, -1), U).reshape(n, rows, d)
    for it in range(iterations):
        slow = rng.random(n) < delay.prob
        base = delay.comm_cost + slow * delay.delay
        for name, sch in schemes.items():
            loads = np.full(n, sch.load, dtype=float)
            times = loads * delay.compute_cost + base
            if name == "uncoded":
                ready = lambda pre: len(pre) == n  # noqa: E731
            elif name == "repetition":
                ready = lambda pre: len({block_of[j] for j in pre}) == K  # noqa: E731
            else:
                ready = lambda pre: len(pre) >= R  # noqa: E731
            total, comp, k = _wait(times, loads, delay, ready)
            sch.total += total
            sch.comp += comp
            sch.comm += total - comp
            sch.waited_for.append(k)
        if check_every and it % check_every == 0:
            w = rng.standard_normal(d)
            times = np.full(n, r * delay.compute_cost) + base
            order = sorted(range(n), key=lambda j: (times[j], j))[:R]
            rets = {j: shares[j].T @ (shares[j] @ w) for j in order}
            dec, _ = decode_real(rets, list(range(n)), list(range(1, K + 1)), 2 * (K - 1))
            got = dec.sum(axis=0)
            want = Xd.T @ (Xd @ w)
            max_err = max(max_err, float(np.linalg.norm(got - want) / np.linalg.norm(want)))
    return {
        "n": n, "r": r, "K": K, "iterations": iterations, "seed": seed,
        "delay": delay.as_dict(),
        "R_lcc": R,
        "lower_bound": regression_lower_bound(n, r),
        "waited_for": {"lagrange": R, "uncoded": n},
        "schemes": [s.as_row() for s in schemes.values()],
        "lcc_faster": schemes["lagrange"].total < schemes["uncoded"].total,
        "max_rel_error": max_err,
    }
