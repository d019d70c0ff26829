"""Computation targets: polynomial maps on data blocks with a declared total degree.

A block is a flat vector.  In finite-field mode it is a list of ints reduced
mod p; in real mode it is a float64 numpy array.  Matrix-shaped inputs are
stored row-major.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np

from .errors import DimensionMismatch
from .field import PrimeField

Evaluator = Callable[[np.ndarray, "ComputationSpec"], np.ndarray]

_REGISTRY: dict[str, Evaluator] = {}


@dataclass(frozen=True)
class ComputationSpec:
    kind: str
    declared_degree: int
    input_dim: int
    output_dim: int
    params: dict[str, Any] = field(default_factory=dict, compare=False)

    def with_params(self, **params) -> "ComputationSpec":
        """Same computation with updated round parameters (e.g. a new weight vector)."""
        return replace(self, params={**self.params, **params})


def identity(dim: int) -> ComputationSpec:
    return ComputationSpec("identity", 1, dim, dim)


def linear_map(b, rows: int) -> ComputationSpec:
    """f(X) = X b for X a rows x len(b) matrix."""
    b = list(b)
    return ComputationSpec("linear_map", 1, rows * len(b), rows, {"b": b, "rows": rows})


def elementwise_square(dim: int) -> ComputationSpec:
    return ComputationSpec("elementwise_square", 2, dim, dim)


def bilinear_product(a: int, b: int, c: int) -> ComputationSpec:
    """f(A, B) = A B for A of shape (a, b) and B of shape (b, c), packed as A then B."""
    return ComputationSpec("bilinear_product", 2, a * b + b * c, a * c, {"shape": (a, b, c)})


def matrix_square(side: int) -> ComputationSpec:
    """f(X) = X X for a side x side matrix stored row-major."""
    return ComputationSpec("matrix_square", 2, side * side, side * side, {"side": side})


def gradient_kernel(w, rows: int) -> ComputationSpec:
    """f(Xb) = Xb^T Xb w for a row block Xb of shape (rows, len(w))."""
    w = list(w)
    return ComputationSpec("gradient_kernel", 2, rows * len(w), len(w), {"w": w, "rows": rows})


def multilinear_monomial(arity: int, width: int = 1) -> ComputationSpec:
    """Elementwise product of ``arity`` consecutive groups of ``width`` entries."""
    if arity < 1:
        raise ValueError("arity must be positive")
    return ComputationSpec("multilinear_monomial", arity, arity * width, width, {"arity": arity})


def custom(name: str, evaluator: Evaluator, degree: int, input_dim: int, output_dim: int,
           **params) -> ComputationSpec:
    """Register a user evaluator.  Decoding is only as correct as ``degree`` is honest."""
    if degree < 1:
        raise ValueError("declared degree must be >= 1")
    _REGISTRY[name] = evaluator
    return ComputationSpec(name, degree, input_dim, output_dim, params)


def for_degree(d: int, width: int = 1) -> ComputationSpec:
    """A canonical built-in of total degree ``d``, used by sweeps and the CLI."""
    if d == 1:
        return identity(width)
    if d == 2:
        return elementwise_square(width)
    return multilinear_monomial(d, width)


def by_name(kind: str, dim: int, **params) -> ComputationSpec:
    if kind == "identity":
        return identity(dim)
    if kind in ("square", "elementwise_square"):
        return elementwise_square(dim)
    if kind == "matrix_square":
        side = int(round(dim**0.5))
        if side * side != dim:
            raise DimensionMismatch(f"block length {dim} is not a perfect square")
        return matrix_square(side)
    if kind in ("monomial", "multilinear_monomial"):
        arity = int(params.get("arity", 3))
        if dim % arity:
            raise DimensionMismatch(f"block length {dim} not divisible by arity {arity}")
        return multilinear_monomial(arity, dim // arity)
    raise ValueError(f"unknown computation kind {kind!r}")


def degree_of(spec: ComputationSpec) -> int:
    return spec.declared_degree


def _evaluate(spec: ComputationSpec, x: np.ndarray) -> np.ndarray:
    k = spec.kind
    if k == "identity":
        return x.copy()
    if k == "elementwise_square":
        return x * x
    if k == "linear_map":
        b = np.array(spec.params["b"], dtype=x.dtype)
        return x.reshape(spec.params["rows"], len(b)) @ b
    if k == "bilinear_product":
        a, b, c = spec.params["shape"]
        A = x[: a * b].reshape(a, b)
        B = x[a * b:].reshape(b, c)
        return (A @ B).reshape(-1)
    if k == "matrix_square":
        n = spec.params["side"]
        A = x.reshape(n, n)
        return (A @ A).reshape(-1)
    if k == "gradient_kernel":
        w = np.array(spec.params["w"], dtype=x.dtype)
        Xb = x.reshape(spec.params["rows"], len(w))
        return Xb.T @ (Xb @ w)
    if k == "multilinear_monomial":
        out = x[: spec.output_dim].copy()
        for g in range(1, spec.params["arity"]):
            out = out * x[g * spec.output_dim:(g + 1) * spec.output_dim]
        return out
    if k in _REGISTRY:
        return np.asarray(_REGISTRY[k](x, spec))
    raise ValueError(f"unknown computation kind {k!r}")


def evaluate(spec: ComputationSpec, x, F: PrimeField | None = None):
    """Apply ``spec`` to one block.

    With ``F`` the block is treated as F_p elements and a list of ints is
    returned; without it the computation runs in float64.
    """
    if len(x) != spec.input_dim:
        raise DimensionMismatch(f"{spec.kind} expects {spec.input_dim} entries, got {len(x)}")
    if F is None:
        out = _evaluate(spec, np.asarray(x, dtype=np.float64))
    else:
        # object dtype keeps exact Python-int arithmetic
        out = _evaluate(spec, np.array([v % F.p for v in x], dtype=object))
        out = [int(v) % F.p for v in out]
    if len(out) != spec.output_dim:
        raise DimensionMismatch(f"{spec.kind} produced {len(out)} entries, expected {spec.output_dim}")
    return out
