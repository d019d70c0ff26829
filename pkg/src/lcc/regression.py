"""Least-squares regression by gradient descent with Lagrange-coded gradient computation.

Row-block convention: the data matrix X (m x d) is split into K row blocks
Xb_k, and each worker evaluates f(Xb) = Xb^T Xb w on its coded block.  The
master decodes f at every data block and sums, recovering X^T X w.  X^T y is
computed once on the master.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field

import numpy as np

from .codec import build_matrix, build_matrix_real, encode, encode_real, RandomPad
from .errors import ConditioningWarning, DimensionMismatch, InfeasibleParams, OverflowRisk
from .field import PrimeField
from .rsdecode import DecodeBudget, decode_clean, decode_real
from .scheme import EvalPoints, feasible, regression_lower_bound, regression_threshold, Variant
from .simulator import DelayModel

FIELD_PRIME = 2**61 - 1


@dataclass
class RegressionProblem:
    X: np.ndarray
    y: np.ndarray
    n: int
    r: int
    step: float | None = None
    momentum: float = 0.9
    iterations: int = 50

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise DimensionMismatch(f"X {self.X.shape} and y {self.y.shape} do not line up")
        if not 1 <= self.r <= self.n:
            raise ValueError("need 1 <= r <= n")

    @property
    def K(self) -> int:
        return -(-self.n // self.r)

    @property
    def threshold(self) -> int:
        return regression_threshold(self.n, self.r)

    @property
    def rows_per_block(self) -> int:
        return -(-self.X.shape[0] // self.K)

    def blocks(self, X=None) -> np.ndarray:
        """K row blocks of equal height; the last is zero-padded (zero rows leave X^T X unchanged)."""
        X = self.X if X is None else X
        h = self.rows_per_block
        out = np.zeros((self.K, h, X.shape[1]), dtype=X.dtype)
        for k in range(self.K):
            part = X[k * h:(k + 1) * h]
            out[k, : len(part)] = part
        return out

    def default_step(self) -> float:
        # the loss ||Xw - y||^2 is 2*lambda_max(X^T X)-smooth
        return 1.0 / (2.0 * np.linalg.norm(self.X, 2) ** 2)


def synthetic(m: int, d: int, n: int, r: int, seed: int = 0, iterations: int = 50, **kw) -> RegressionProblem:
    """Random features and a random true weight vector; labels are noiseless."""
    rng = np.random.default_rng(seed)
    w_true = rng.standard_normal(d)
    X = rng.standard_normal((m, d))
    return RegressionProblem(X, X @ w_true, n, r, iterations=iterations, **kw)


def load_csv(path, n: int, r: int, **kw) -> RegressionProblem:
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    return RegressionProblem(data[:, :-1], data[:, -1], n, r, **kw)


def gradient_direct(problem: RegressionProblem, w) -> np.ndarray:
    """2 X^T (X w - y)."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (problem.X.shape[1],):
        raise DimensionMismatch(f"w has shape {w.shape}, expected ({problem.X.shape[1]},)")
    return 2.0 * problem.X.T @ (problem.X @ w - problem.y)


def loss(problem: RegressionProblem, w) -> float:
    res = problem.X @ w - problem.y
    return float(res @ res)


# --------------------------------------------------------------------------
# fixed-point embedding


@dataclass(frozen=True)
class QuantizationConfig:
    scale: int = 2**8
    p: int = FIELD_PRIME

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.p)

    @property
    def guard(self) -> int:
        return self.p // 2


def quantize_vector(v, config: QuantizationConfig) -> list[int]:
    """Round to nearest multiple of 1/scale, then map signed integers to residues."""
    q = np.rint(np.asarray(v, dtype=np.float64) * config.scale)
    if np.any(np.abs(q) >= config.guard):
        raise OverflowRisk("value exceeds the field's signed range")
    return [int(x) % config.p for x in q.ravel()]


def dequantize(values, config: QuantizationConfig, power: int = 1) -> np.ndarray:
    """Inverse of quantization for products of ``power`` quantized factors."""
    F = config.field
    return np.array([F.signed(v) for v in values], dtype=np.float64) / float(config.scale) ** power


@dataclass
class QuantizedProblem:
    problem: RegressionProblem
    config: QuantizationConfig
    Xq: list  # signed integers, m x d
    yq: list
    Xty: list  # signed X_q^T y_q (scale^2)

    @property
    def d(self) -> int:
        return self.problem.X.shape[1]


def _signed_ints(A, scale) -> np.ndarray:
    q = np.rint(np.asarray(A, dtype=np.float64) * scale)
    if np.any(np.abs(q) >= 2**62):
        raise OverflowRisk("value too large to quantize")
    return q.astype(np.int64).astype(object)


def quantize(problem: RegressionProblem, config: QuantizationConfig = QuantizationConfig()) -> QuantizedProblem:
    Xq = _signed_ints(problem.X, config.scale)
    yq = _signed_ints(problem.y, config.scale)
    if max(abs(int(v)) for v in Xq.ravel()) >= config.guard or \
            max(abs(int(v)) for v in yq.ravel()) >= config.guard:
        raise OverflowRisk("data exceeds the field's signed range")
    return QuantizedProblem(problem, config, Xq.tolist(), yq.tolist(), list(Xq.T @ yq))


def _check_overflow(qp: QuantizedProblem, wq) -> None:
    # |X^T X w| and scale * |X^T y| must stay below p/2 (products of three scaled factors)
    Xq = np.array(qp.Xq, dtype=object)
    col = [sum(abs(int(v)) for v in Xq[:, j]) for j in range(Xq.shape[1])]
    rowmax = max((sum(abs(int(v)) for v in row) for row in Xq), default=0)
    bound_xxw = max(col, default=0) * rowmax * max((abs(int(v)) for v in wq), default=0)
    bound_xty = qp.config.scale * max((abs(int(v)) for v in qp.Xty), default=0)
    if 2 * max(bound_xxw, bound_xty) >= qp.config.guard:
        raise OverflowRisk("quantized gradient may wrap around the field modulus; lower the scale")


def gradient_quantized(qp: QuantizedProblem, wq) -> list[int]:
    """Signed field gradient 2 (Xq^T Xq wq - scale * Xq^T yq), at scale^3."""
    Xq = np.array(qp.Xq, dtype=object)
    w = np.array(wq, dtype=object)
    XtXw = Xq.T @ (Xq @ w)
    return [int(2 * (a - qp.config.scale * b)) for a, b in zip(XtXw, qp.Xty)]


# --------------------------------------------------------------------------
# coded gradient descent


@dataclass
class GDResult:
    w: np.ndarray
    losses: list
    threshold_used: int
    mode: str
    gradients: list = field(default_factory=list, repr=False)
    direct_gradients: list = field(default_factory=list, repr=False)
    max_rel_error: float = 0.0
    exact: bool = True
    share_digest: str = ""
    timing: dict = field(default_factory=dict)
    condition: float = 0.0


def _check_feasible(problem: RegressionProblem) -> None:
    n, K = problem.n, problem.K
    if problem.threshold > n or feasible(n, K, n - problem.threshold, 0, 0, 2) is not Variant.LAGRANGE:
        raise InfeasibleParams(f"n={n} workers cannot host K={K} blocks at degree 2 "
                               f"(needs 2*(K-1)+1 = {problem.threshold} <= n)")


def _digest(shares) -> str:
    h = hashlib.sha256()
    for s in shares:
        h.update(s.tobytes() if isinstance(s, np.ndarray) else repr(list(s)).encode())
    return h.hexdigest()


def _straggler_schedule(rng, n: int, count: int, fixed):
    if fixed:
        return set(fixed)
    if count:
        return set(int(i) for i in rng.choice(n, size=count, replace=False))
    return set()


def lcc_gd(problem: RegressionProblem, mode: str = "real", stragglers: int = 0, straggler_ids=None,
           config: QuantizationConfig = QuantizationConfig(), delay: DelayModel | None = None,
           seed: int = 0, cond_limit: float = 1e9, keep_gradients: bool = False) -> GDResult:
    """Nesterov-accelerated GD where X^T X w is decoded from the fastest R workers.

    ``stragglers`` workers (chosen afresh each iteration) or the fixed
    ``straggler_ids`` never return; the budget is n - R.
    """
    _check_feasible(problem)
    n, K, R = problem.n, problem.K, problem.threshold
    budget = n - R
    if stragglers > budget or (straggler_ids is not None and len(straggler_ids) > budget):
        raise InfeasibleParams(f"at most {budget} stragglers are tolerable with R={R}")
    if mode not in ("real", "field"):
        raise ValueError("mode must be 'real' or 'field'")
    rng = np.random.default_rng(seed)
    delay = delay or DelayModel()
    d = problem.X.shape[1]
    h = problem.rows_per_block
    step = problem.step if problem.step is not None else problem.default_step()
    mu = problem.momentum
    betas = list(range(1, K + 1))
    alphas = list(range(n))
    D = 2 * (K - 1)

    if mode == "field":
        F = config.field
        qp = quantize(problem, config)
        Xq_blocks = problem.blocks(np.array(qp.Xq, dtype=object))
        points = EvalPoints(tuple(b % F.p for b in betas), tuple(alphas), K, 0)
        U = build_matrix(F, points)
        data = [[int(v) % F.p for v in b.ravel()] for b in Xq_blocks]
        shares = encode(data, RandomPad((), seed, 0), U)
        share_mats = [np.array(s, dtype=object).reshape(h, d) for s in shares]
    else:
        Ur = build_matrix_real(betas, alphas)
        shares = encode_real(problem.blocks().reshape(K, -1), Ur)
        share_mats = [s.reshape(h, d) for s in shares]
    digest = _digest(shares)

    w = np.zeros(d)
    w_prev = w.copy()
    losses, grads, directs = [], [], []
    exact, max_err, cond = True, 0.0, 0.0
    timing = {"comm": 0.0, "comp": 0.0, "total": 0.0}
    Xty = problem.X.T @ problem.y
    for _ in range(problem.iterations):
        v = w + mu * (w - w_prev)
        out = _straggler_schedule(rng, n, stragglers, straggler_ids)
        slow = rng.random(n) < delay.prob
        times = problem.r * delay.compute_cost + delay.comm_cost + slow * delay.delay
        order = sorted((j for j in range(n) if j not in out), key=lambda j: (times[j], j))[:R]
        t_total = float(times[order[-1]])
        t_comp = problem.r * delay.compute_cost
        timing["total"] += t_total
        timing["comp"] += t_comp
        timing["comm"] += t_total - t_comp

        if mode == "field":
            vq = quantize_vector(v, config)
            _check_overflow(qp, [F.signed(x) for x in vq])
            wv = np.array(vq, dtype=object)
            rets = {j: [int(x) % F.p for x in share_mats[j].T @ (share_mats[j] @ wv)] for j in order}
            blocks = decode_clean(F, rets, points, DecodeBudget(D))
            xtxw = [sum(col) % F.p for col in zip(*blocks)]
            g_field = [F.signed(2 * (a - config.scale * b)) for a, b in zip(xtxw, qp.Xty)]
            g_direct = gradient_quantized(qp, [F.signed(x) for x in vq])
            exact &= g_field == g_direct
            g = dequantize([x % F.p for x in g_field], config, power=3)
            if keep_gradients:
                grads.append(g_field)
                directs.append(g_direct)
        else:
            rets = {j: share_mats[j].T @ (share_mats[j] @ v) for j in order}
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", ConditioningWarning)
                dec, c = decode_real(rets, alphas, betas, D, cond_limit)
            for wmsg in caught:
                warnings.warn(wmsg.message, ConditioningWarning, stacklevel=2)
            cond = max(cond, c)
            xtxw = dec.sum(axis=0)
            want = problem.X.T @ (problem.X @ v)
            denom = np.linalg.norm(want)
            if denom > 0:
                max_err = max(max_err, float(np.linalg.norm(xtxw - want) / denom))
            g = 2.0 * (xtxw - Xty)
            if keep_gradients:
                grads.append(g)
                directs.append(gradient_direct(problem, v))
        w_prev = w
        w = v - step * g
        losses.append(loss(problem, w))
    if _digest(shares) != digest:
        raise RuntimeError("coded storage changed between iterations")
    return GDResult(w, losses, R, mode, grads, directs, max_err, exact, digest, timing, cond)


def uncoded_gd(problem: RegressionProblem, mode: str = "real",
               config: QuantizationConfig = QuantizationConfig()) -> np.ndarray:
    """Reference run: identical updates with the gradient computed directly."""
    d = problem.X.shape[1]
    step = problem.step if problem.step is not None else problem.default_step()
    mu = problem.momentum
    w = np.zeros(d)
    w_prev = w.copy()
    qp = quantize(problem, config) if mode == "field" else None
    F = config.field
    for _ in range(problem.iterations):
        v = w + mu * (w - w_prev)
        if qp is not None:
            vq = [F.signed(x) for x in quantize_vector(v, config)]
            g = dequantize([x % F.p for x in gradient_quantized(qp, vq)], config, power=3)
        else:
            g = gradient_direct(problem, v)
        w_prev = w
        w = v - step * g
    return w


def summary(problem: RegressionProblem, result: GDResult) -> dict:
    return {
        "n": problem.n, "r": problem.r, "K": problem.K,
        "m": int(problem.X.shape[0]), "d": int(problem.X.shape[1]),
        "mode": result.mode,
        "threshold": result.threshold_used,
        "lower_bound": regression_lower_bound(problem.n, problem.r),
        "iterations": problem.iterations,
        "loss": [float(x) for x in result.losses],
        "exact": result.exact,
        "max_rel_error": result.max_rel_error,
        "condition_estimate": result.condition,
        "timing": {k: round(v, 9) for k, v in result.timing.items()},
        "w": [float(x) for x in result.w],
    }
