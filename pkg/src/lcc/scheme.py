"""Parameter planning: which (S, A, T) a worker pool supports, and where to evaluate."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import FieldTooSmall, InfeasibleParams
from .field import DEFAULT_PRIME, PrimeField


class Variant(str, enum.Enum):
    INFEASIBLE = "infeasible"
    LAGRANGE = "lagrange"
    UNCODED_REPETITION = "uncoded_repetition"

    def __str__(self):
        return self.value


def lagrange_lhs(K: int, S: int, A: int, T: int, d: int) -> int:
    return (K + T - 1) * d + S + 2 * A + 1


def repetition_lhs(K: int, S: int, A: int, T: int, d: int) -> int:
    return K * (S + 2 * A + d * T + 1)


def feasible(N: int, K: int, S: int, A: int, T: int, d: int) -> Variant:
    """Lagrange coding if its inequality holds, else repetition, else infeasible."""
    if lagrange_lhs(K, S, A, T, d) <= N:
        return Variant.LAGRANGE
    if repetition_lhs(K, S, A, T, d) <= N:
        return Variant.UNCODED_REPETITION
    return Variant.INFEASIBLE


def region_report(N: int, K: int, S: int, A: int, T: int, d: int) -> dict:
    """Both region inequalities with their sides evaluated."""
    lag = lagrange_lhs(K, S, A, T, d)
    rep = repetition_lhs(K, S, A, T, d)
    return {
        "variant": str(feasible(N, K, S, A, T, d)),
        "lagrange": {
            "formula": "(K+T-1)*deg+S+2A+1 <= N",
            "expr": f"({K}+{T}-1)*{d}+{S}+2*{A}+1",
            "lhs": lag,
            "N": N,
            "holds": lag <= N,
        },
        "uncoded_repetition": {
            "formula": "K*(S+2A+deg*T+1) <= N",
            "expr": f"{K}*({S}+2*{A}+{d}*{T}+1)",
            "lhs": rep,
            "N": N,
            "holds": rep <= N,
        },
    }


def describe_region(N: int, K: int, S: int, A: int, T: int, d: int) -> str:
    r = region_report(N, K, S, A, T, d)
    lag, rep = r["lagrange"], r["uncoded_repetition"]

    def side(x):
        return f"{x['expr']} = {x['lhs']} {'<=' if x['holds'] else '>'} {N}"

    if lag["holds"]:
        return f"feasible: lagrange ({side(lag)})"
    if rep["holds"]:
        return f"feasible: uncoded_repetition ({side(rep)}; lagrange needs {side(lag)})"
    return f"infeasible ({lag['lhs']} > {N}; uncoded needs {side(rep)})"


def recovery_threshold(N: int, K: int, d: int, T: int = 0) -> int:
    """Number of returns that always suffice when there are no adversaries."""
    if feasible(N, K, 0, 0, T, d) is Variant.INFEASIBLE:
        raise InfeasibleParams(describe_region(N, K, 0, 0, T, d))
    return min((K - 1) * d + 1, N - N // K + 1) + T * d


def regression_threshold(n: int, r: int) -> int:
    return 2 * -(-n // r) - 1


def regression_lower_bound(n: int, r: int) -> int:
    """Any linear scheme must wait for at least ceil(n / r) workers."""
    if not 1 <= r <= n:
        raise ValueError("need 1 <= r <= n")
    return -(-n // r)


@dataclass(frozen=True)
class SchemeParams:
    N: int
    K: int
    S: int = 0
    A: int = 0
    T: int = 0
    d: int = 1
    p: int = DEFAULT_PRIME
    variant: Variant | None = None
    field: PrimeField = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.N < 1 or self.K < 1 or self.d < 1 or min(self.S, self.A, self.T) < 0:
            raise ValueError(f"parameters out of range: {self}")
        allowed = feasible(self.N, self.K, self.S, self.A, self.T, self.d)
        if allowed is Variant.INFEASIBLE:
            raise InfeasibleParams(describe_region(self.N, self.K, self.S, self.A, self.T, self.d))
        variant = Variant(self.variant) if self.variant is not None else allowed
        if variant is Variant.UNCODED_REPETITION and \
                repetition_lhs(self.K, self.S, self.A, self.T, self.d) > self.N:
            raise InfeasibleParams(describe_region(self.N, self.K, self.S, self.A, self.T, self.d))
        if variant is Variant.LAGRANGE and allowed is not Variant.LAGRANGE:
            raise InfeasibleParams(describe_region(self.N, self.K, self.S, self.A, self.T, self.d))
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "field", PrimeField(self.p))

    @property
    def composition_degree(self) -> int:
        """Degree bound of f(u(z))."""
        return self.d * (self.K + self.T - 1)

    @property
    def needed(self) -> int:
        """Returns the decoder consumes: D + 2A + 1."""
        return self.composition_degree + 2 * self.A + 1

    def as_dict(self) -> dict:
        return {"N": self.N, "K": self.K, "S": self.S, "A": self.A, "T": self.T,
                "d": self.d, "p": self.p, "variant": str(self.variant)}


@dataclass(frozen=True)
class EvalPoints:
    betas: tuple
    alphas: tuple
    K: int
    T: int = 0

    def __post_init__(self):
        if len(set(self.betas)) != len(self.betas):
            raise ValueError("betas must be distinct")
        if len(self.betas) != self.K + self.T:
            raise ValueError("need exactly K + T betas")

    @property
    def N(self) -> int:
        return len(self.alphas)

    @property
    def is_repetition(self) -> bool:
        return set(self.alphas) <= set(self.betas[: self.K])

    def validate(self) -> None:
        if not self.is_repetition and len(set(self.alphas)) != len(self.alphas):
            raise ValueError("alphas must be distinct")
        if self.T > 0 and set(self.alphas) & set(self.betas[: self.K]):
            raise ValueError("alphas must avoid the data betas when T > 0")


def make_eval_points(params: SchemeParams, mode: str = "field") -> EvalPoints:
    """Canonical consecutive-integer placement.

    field/lagrange: betas 1..K+T, alphas K+T+1..K+T+N.
    field/repetition: alphas cycle through betas 1..K.
    real: betas 1..K, alphas 0..N-1 (the regression placement; T must be 0).
    """
    N, K, T = params.N, params.K, params.T
    if mode == "real":
        if T:
            raise ValueError("real mode has no privacy padding")
        return EvalPoints(tuple(range(1, K + 1)), tuple(range(N)), K, 0)
    p = params.p
    if params.variant is Variant.UNCODED_REPETITION:
        if p <= K:
            raise FieldTooSmall(f"p={p} must exceed K={K}")
        betas = tuple(range(1, K + T + 1))
        return EvalPoints(betas, tuple(betas[j % K] for j in range(N)), K, T)
    if p < N + K + T:
        raise FieldTooSmall(f"p={p} must be at least N+K+T={N + K + T}")
    betas = tuple(b % p for b in range(1, K + T + 1))
    alphas = tuple(a % p for a in range(K + T + 1, K + T + N + 1))
    pts = EvalPoints(betas, alphas, K, T)
    pts.validate()
    return pts


def random_eval_points(rng, p: int, K: int, T: int, N: int) -> EvalPoints:
    """Random valid placement: distinct betas, distinct alphas avoiding betas[:K]."""
    if p < N + K:
        raise FieldTooSmall(f"p={p} must be at least N+K={N + K}")
    betas = [int(v) for v in rng.choice(p, size=K + T, replace=False)]
    pool = sorted(set(range(p)) - set(betas[:K])) if p < 4096 else None
    if pool is not None:
        alphas = [int(v) for v in rng.choice(pool, size=N, replace=False)]
    else:
        taken, alphas = set(betas[:K]), []
        while len(alphas) < N:
            a = int(rng.integers(0, p))
            if a not in taken:
                taken.add(a)
                alphas.append(a)
    pts = EvalPoints(tuple(betas), tuple(alphas), K, T)
    pts.validate()
    return pts
