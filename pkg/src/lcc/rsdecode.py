"""Master-side decoding of f(u(z)) from worker returns.

The decoder sees an ordered mapping ``worker_id -> payload`` (insertion order
is arrival order).  It never sees which workers were faulty.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConditioningWarning, DecodingFailure, NotEnoughReturns
from .field import (
    PrimeField,
    barycentric_weights,
    lagrange_coeffs_at,
    poly_divmod,
    poly_eval,
    solve_any,
)
from .scheme import EvalPoints

Returns = Mapping[int, Sequence[int]]


@dataclass(frozen=True)
class DecodeBudget:
    D: int
    A: int = 0

    @property
    def needed(self) -> int:
        return self.D + 2 * self.A + 1

    @classmethod
    def for_params(cls, params) -> "DecodeBudget":
        return cls(params.composition_degree, params.A)


def _first(returns: Returns, n: int) -> list[tuple[int, Sequence[int]]]:
    items = list(returns.items())
    return items[:n]


class _Interpolator:
    """Caches Lagrange coefficients (alphas of the used ids -> betas)."""

    def __init__(self, F: PrimeField, points: EvalPoints):
        self.F = F
        self.points = points
        self._cache: dict[tuple, list[list[int]]] = {}

    def coeffs(self, ids: tuple) -> list[list[int]]:
        c = self._cache.get(ids)
        if c is None:
            xs = [self.points.alphas[i] for i in ids]
            c = [lagrange_coeffs_at(self.F, xs, b) for b in self.points.betas[: self.points.K]]
            self._cache[ids] = c
        return c

    def at_betas(self, ids: tuple, ys: Sequence[int]) -> list[int]:
        p = self.F.p
        return [sum(c * y for c, y in zip(row, ys)) % p for row in self.coeffs(ids)]


def _assemble(per_coord: list[list[int]]) -> list[list[int]]:
    # per_coord[m][k] -> blocks[k][m]
    return [list(col) for col in zip(*per_coord)]


def decode_clean(F: PrimeField, returns: Returns, points: EvalPoints, budget: DecodeBudget) -> list[list[int]]:
    """Interpolate from the first D+1 returns and evaluate at the data betas."""
    if len(returns) <= budget.D:
        raise NotEnoughReturns(f"{len(returns)} returns, need {budget.D + 1}")
    used = _first(returns, budget.D + 1)
    ids = tuple(i for i, _ in used)
    interp = _Interpolator(F, points)
    coeffs = interp.coeffs(ids)
    p = F.p
    L = len(used[0][1])
    blocks = []
    for row in coeffs:
        acc = [0] * L
        for c, (_, y) in zip(row, used):
            if c:
                acc = [a + c * v for a, v in zip(acc, y)]
        blocks.append([a % p for a in acc])
    return blocks


def syndromes(F: PrimeField, returns: Returns, points: EvalPoints, A: int) -> list[list[int]]:
    """S_k = sum_i y_i alpha_i^k / prod_{j != i}(alpha_i - alpha_j), k = 0..2A-1, per coordinate.

    All returns passed in are used.  With n returns of a degree <= D
    polynomial, S_k vanishes for every k <= n - D - 2.
    """
    if A == 0:
        return []
    ids = list(returns)
    xs = [points.alphas[i] for i in ids]
    ws = barycentric_weights(F, xs)
    p = F.p
    L = len(next(iter(returns.values())))
    out = []
    scaled = list(ws)
    for _k in range(2 * A):
        S = [0] * L
        for c, i in zip(scaled, ids):
            S = [s + c * y for s, y in zip(S, returns[i])]
        out.append([s % p for s in S])
        scaled = [c * x % p for c, x in zip(scaled, xs)]
    return out


def _consistent(F: PrimeField, xs: Sequence[int], ws: Sequence[int], ys: Sequence[int], D: int) -> bool:
    """True iff the points lie on one polynomial of degree <= D (all parity checks vanish)."""
    p = F.p
    scaled = list(ws)
    for _ in range(len(xs) - D - 1):
        if sum(c * y for c, y in zip(scaled, ys)) % p:
            return False
        scaled = [c * x % p for c, x in zip(scaled, xs)]
    return True


def berlekamp_welch(F: PrimeField, xs: Sequence[int], ys: Sequence[int], D: int, A: int) -> tuple[list[int], list[int]]:
    """Degree <= D polynomial agreeing with all but at most A of the points.

    Returns (coefficients, indices of disagreeing points).
    """
    p = F.p
    n = len(xs)
    if n < D + 2 * A + 1:
        raise NotEnoughReturns(f"{n} points, need {D + 2 * A + 1}")
    # unknowns: e_0..e_{A-1} (E monic of degree A), q_0..q_{D+A}
    rows, rhs = [], []
    for x, y in zip(xs, ys):
        pw = [1] * (D + A + 1)
        for k in range(1, D + A + 1):
            pw[k] = pw[k - 1] * x % p
        rows.append([-y * pw[k] % p for k in range(A)] + pw)
        rhs.append(y * pow(x, A, p) % p)
    sol = solve_any(F, rows, rhs)
    if sol is None:
        raise DecodingFailure("no error-locator polynomial of the budgeted degree exists")
    E = sol[:A] + [1]
    Q = sol[A:]
    P, rem = poly_divmod(F, Q, E)
    if rem or len(P) > D + 1:
        raise DecodingFailure("more corrupted returns than the adversary budget")
    bad = [i for i, (x, y) in enumerate(zip(xs, ys)) if poly_eval(F, P, x) != y % p]
    if len(bad) > A:
        raise DecodingFailure(f"{len(bad)} disagreements exceed the adversary budget {A}")
    return P, bad


def decode_robust(F: PrimeField, returns: Returns, points: EvalPoints,
                  budget: DecodeBudget) -> tuple[list[list[int]], set[int]]:
    """Decode from the first D+2A+1 returns, correcting up to A corrupted ones.

    Coordinates are decoded one at a time.  Workers caught in an earlier
    coordinate are dropped from later ones, which shrinks the remaining
    adversary budget by the same count.
    """
    if budget.A == 0:
        return decode_clean(F, returns, points, budget), set()
    if len(returns) < budget.needed:
        raise NotEnoughReturns(f"{len(returns)} returns, need {budget.needed}")
    used = dict(_first(returns, budget.needed))
    D = budget.D
    interp = _Interpolator(F, points)
    weights: dict[tuple, list[int]] = {}
    caught: set[int] = set()
    L = len(next(iter(used.values())))
    per_coord = []
    for m in range(L):
        ids = tuple(i for i in used if i not in caught)
        A_left = budget.A - len(caught)
        xs = [points.alphas[i] for i in ids]
        ys = [used[i][m] for i in ids]
        if ids not in weights:
            weights[ids] = barycentric_weights(F, xs)
        if _consistent(F, xs, weights[ids], ys, D):
            per_coord.append(interp.at_betas(ids[: D + 1], ys[: D + 1]))
            continue
        if A_left == 0:
            raise DecodingFailure("inconsistent returns after all budgeted adversaries were removed")
        P, bad = berlekamp_welch(F, xs, ys, D, A_left)
        caught.update(ids[b] for b in bad)
        per_coord.append([poly_eval(F, P, b) for b in points.betas[: points.K]])
    return _assemble(per_coord), caught


def decode_repetition(returns: Returns, points: EvalPoints, A: int = 0) -> tuple[list[list[int]], set[int], int]:
    """Majority vote over the first 2A+1 replicas of each block.

    Returns (blocks, corrected ids, number of returns consumed).
    """
    K = points.K
    where = {b: i for i, b in enumerate(points.betas[:K])}
    seen: list[list[tuple[int, tuple]]] = [[] for _ in range(K)]
    consumed = 0
    for wid, payload in returns.items():
        if all(len(s) >= 2 * A + 1 for s in seen):
            break
        consumed += 1
        k = where[points.alphas[wid]]
        if len(seen[k]) < 2 * A + 1:
            seen[k].append((wid, tuple(payload)))
    if any(len(s) < 2 * A + 1 for s in seen):
        raise NotEnoughReturns("some block has fewer than 2A+1 replicas returned")
    blocks, caught = [], set()
    for s in seen:
        votes: dict[tuple, int] = {}
        for _, v in s:
            votes[v] = votes.get(v, 0) + 1
        winner, count = max(votes.items(), key=lambda kv: kv[1])
        if count < A + 1:
            raise DecodingFailure("no replica value reached a majority")
        blocks.append(list(winner))
        caught.update(w for w, v in s if v != winner)
    return blocks, caught, consumed


# --------------------------------------------------------------------------
# real-valued decoding


def real_lagrange_coeffs(xs: Sequence[float], targets: Sequence[float]) -> np.ndarray:
    """C[k, i] = l_i(targets[k]) for nodes xs, in float64."""
    xs = np.asarray(xs, dtype=np.float64)
    C = np.ones((len(targets), len(xs)))
    for k, t in enumerate(targets):
        for i, xi in enumerate(xs):
            others = np.delete(xs, i)
            C[k, i] = np.prod((t - others) / (xi - others))
    return C


def decode_real(returns: Mapping[int, np.ndarray], alphas: Sequence[float], betas: Sequence[float],
                D: int, cond_limit: float = 1e9) -> tuple[np.ndarray, float]:
    """Interpolate real-valued returns from the first D+1 arrivals.

    Returns (decoded K x L array, condition estimate).  The estimate is
    ||(|C| |Y|)|| / ||C Y||: how much rounding error in the returns can be
    amplified relative to the decoded values.  Relative error is roughly
    machine epsilon times this number.
    """
    if len(returns) <= D:
        raise NotEnoughReturns(f"{len(returns)} returns, need {D + 1}")
    used = list(returns.items())[: D + 1]
    xs = [alphas[i] for i, _ in used]
    C = real_lagrange_coeffs(xs, betas)
    Y = np.stack([np.asarray(y, dtype=np.float64) for _, y in used])
    out = C @ Y
    scale = np.linalg.norm(np.abs(C) @ np.abs(Y))
    size = np.linalg.norm(out)
    cond = float(scale / size) if size > 0 else (0.0 if scale == 0 else float("inf"))
    if cond > cond_limit:
        warnings.warn(f"decoding condition estimate {cond:.3g} exceeds {cond_limit:.3g}",
                      ConditioningWarning, stacklevel=2)
    return out, cond
