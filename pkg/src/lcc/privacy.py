"""Checks that T colluding workers learn nothing about the dataset."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codec import EncodingMatrix, build_matrix
from .errors import SingularMatrix, SingularSubmatrix, StateSpaceTooLarge
from .field import PrimeField, det, kernel_vector, mat_inv
from .scheme import EvalPoints

MAX_STATES = 2**24


@dataclass
class MDSAudit:
    passed: bool
    subsets_checked: int
    witness: tuple | None = None

    def __bool__(self):
        return self.passed


def audit_mds(U: EncodingMatrix, T: int | None = None) -> MDSAudit:
    """Every T x T submatrix of the bottom T rows of U must be invertible."""
    T = U.T if T is None else T
    if T < 1:
        raise ValueError("audit needs T >= 1")
    F = U.F
    bottom = U.U[-T:]
    checked = 0
    for cols in itertools.combinations(range(U.N), T):
        checked += 1
        sub = [[row[j] for j in cols] for row in bottom]
        if det(F, sub) == 0:
            return MDSAudit(False, checked, cols)
    return MDSAudit(True, checked)


def solve_collusion_mask(U: EncodingMatrix, subset) -> list[list[int]]:
    """Inverse of the bottom submatrix on the colluding columns.

    For fixed data, Z -> Z @ U_bottom[:, subset] is then a bijection, so the
    colluders' view is uniformly masked.
    """
    subset = list(subset)
    if len(subset) != U.T or U.T < 1:
        raise ValueError("collusion set must have exactly T members")
    sub = [[row[j] for j in subset] for row in U.bottom]
    try:
        return mat_inv(U.F, sub)
    except SingularMatrix as exc:
        raise SingularSubmatrix(f"bottom submatrix on {subset} is singular") from exc


def collision_witness(U: EncodingMatrix, subset) -> tuple[list[int], list[int]] | None:
    """Two pads (M = 1) that give the colluders identical shares for the same data.

    Exists exactly when the bottom submatrix on ``subset`` is singular.
    """
    F = U.F
    subset = list(subset)
    # left kernel of the bottom submatrix = kernel of its transpose
    subT = [[U.U[U.K + t][j] for t in range(U.T)] for j in subset]
    v = kernel_vector(F, subT)
    if v is None:
        return None
    return [0] * U.T, v


def _digits(count: int, width: int, p: int) -> np.ndarray:
    """All vectors in F_p^width, one per row, in lexicographic order."""
    if width == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((p,) * width, dtype=np.int64).reshape(width, -1).T
    assert grid.shape[0] == count
    return grid


def _entropy(counts: np.ndarray, total: int) -> float:
    # probabilities are the exact rationals count / total
    return -sum(float(Fraction(int(c), total)) * math.log2(Fraction(int(c), total)) for c in counts if c)


def measure_mi_exhaustive(p: int, M: int, K: int, T: int, subset, N: int | None = None,
                          points: EvalPoints | None = None) -> Fraction | float:
    """I(X; shares of ``subset``) in bits, by enumerating every (X, Z).

    Returns ``Fraction(0)`` exactly when the colluders' view has the same
    distribution for every dataset; otherwise the (irrational) value from the
    exact joint distribution.
    """
    subset = list(subset)
    if len(subset) > max(T, 0) and T > 0:
        raise ValueError("collusion set larger than T")
    states = p ** (M * (K + T))
    if states > MAX_STATES:
        raise StateSpaceTooLarge(f"{states} states exceed {MAX_STATES}")
    F = PrimeField(p)
    if points is None:
        N = N if N is not None else max(subset) + 1
        if T == 0 and N <= K:
            betas = tuple(range(1, K + 1))
            points = EvalPoints(betas, betas[:N], K, 0)
        else:
            points = EvalPoints(tuple(range(1, K + T + 1)), tuple(range(K + T + 1, K + T + N + 1)), K, T)
    U = build_matrix(F, points)
    Utop = np.array([[U.U[i][j] for j in subset] for i in range(K)], dtype=np.int64)
    Ubot = np.array([[U.U[K + t][j] for j in subset] for t in range(T)], dtype=np.int64).reshape(T, len(subset))

    nX, nZ = p ** (K * M), p ** (T * M)
    X = _digits(nX, K * M, p).reshape(nX, K, M)
    Z = _digits(nZ, T * M, p).reshape(nZ, T, M)
    XU = np.einsum("xkm,ks->xsm", X, Utop) % p
    ZU = np.einsum("ztm,ts->zsm", Z, Ubot) % p
    view = (XU[:, None] + ZU[None, :]) % p  # (nX, nZ, |subset|, M)
    view = view.reshape(nX, nZ, -1)
    radix = p ** np.arange(view.shape[-1], dtype=np.int64)
    codes = (view * radix).sum(axis=-1)  # (nX, nZ)

    cond = np.sort(codes, axis=1)
    if (cond == cond[0]).all():
        return Fraction(0)
    total = nX * nZ
    _, joint = np.unique(codes, return_counts=True)
    h_view = _entropy(joint, total)
    h_cond = 0.0
    for row in codes:
        _, c = np.unique(row, return_counts=True)
        h_cond += _entropy(c, nZ) / nX
    return h_view - h_cond


def audit_privacy(F: PrimeField, points: EvalPoints, M: int = 1, exhaustive: bool = True) -> dict:
    """Report used by the ``audit-privacy`` command."""
    U = build_matrix(F, points)
    report: dict = {"p": F.p, "N": points.N, "K": points.K, "T": points.T, "M": M}
    if points.T >= 1:
        audit = audit_mds(U)
        report["mds"] = "pass" if audit.passed else "fail"
        report["mds_submatrices_checked"] = audit.subsets_checked
        if audit.witness is not None:
            report["witness"] = list(audit.witness)
    else:
        report["mds"] = "n/a"
    checked, worst = 0, Fraction(0)
    if exhaustive and points.T >= 1:
        for size in range(1, points.T + 1):
            for sub in itertools.combinations(range(points.N), size):
                mi = measure_mi_exhaustive(F.p, M, points.K, points.T, sub, points=points)
                checked += 1
                worst = max(worst, mi)
    report["subsets_checked"] = checked
    report["mi_bits_max"] = float(worst)
    return report
