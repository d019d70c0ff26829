"""Lagrange encoding of a dataset into N worker shares."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, VariantMismatch
from .field import PrimeField, lagrange_coeffs_at
from .scheme import EvalPoints


@dataclass(frozen=True)
class EncodingMatrix:
    """(K+T) x N matrix whose column j holds the Lagrange basis values at alpha_j."""

    F: PrimeField
    points: EvalPoints
    U: tuple

    @property
    def K(self) -> int:
        return self.points.K

    @property
    def T(self) -> int:
        return self.points.T

    @property
    def N(self) -> int:
        return self.points.N

    @property
    def top(self) -> list[list[int]]:
        return [list(r) for r in self.U[: self.K]]

    @property
    def bottom(self) -> list[list[int]]:
        return [list(r) for r in self.U[self.K:]]

    def column(self, j: int) -> list[int]:
        return [row[j] for row in self.U]


def build_matrix(F: PrimeField, points: EvalPoints) -> EncodingMatrix:
    cols = [lagrange_coeffs_at(F, points.betas, a) for a in points.alphas]
    U = tuple(tuple(col[i] for col in cols) for i in range(len(points.betas)))
    return EncodingMatrix(F, points, U)


def build_matrix_real(betas: Sequence[float], alphas: Sequence[float]) -> np.ndarray:
    """Float64 counterpart of :func:`build_matrix` for real-valued data."""
    betas = np.asarray(betas, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    U = np.ones((len(betas), len(alphas)))
    for i, bi in enumerate(betas):
        for ell, bl in enumerate(betas):
            if ell != i:
                U[i] *= (alphas - bl) / (bi - bl)
    return U


@dataclass(frozen=True)
class RandomPad:
    Z: tuple
    seed: int
    consumed: int


def make_pad(F: PrimeField, T: int, M: int, seed: int) -> RandomPad:
    """T uniform blocks of length M.

    Philox is counter-based and ``Generator.integers`` is unbiased, so the
    pad is replayable from ``seed`` alone.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    Z = tuple(tuple(int(v) for v in rng.integers(0, F.p, size=M, dtype=np.uint64)) for _ in range(T))
    return RandomPad(Z, seed, T * M)


def encode(X: Sequence[Sequence[int]], pad: RandomPad, U: EncodingMatrix) -> list[list[int]]:
    """Share j is sum_i (X || Z)_i * U[i][j]."""
    F = U.F
    if len(X) != U.K or len(pad.Z) != U.T:
        raise DimensionMismatch(f"need {U.K} data blocks and {U.T} pad blocks, got {len(X)} and {len(pad.Z)}")
    blocks = [list(b) for b in X] + [list(z) for z in pad.Z]
    M = len(blocks[0])
    if any(len(b) != M for b in blocks):
        raise DimensionMismatch("all blocks must share one length")
    p = F.p
    shares = []
    for j in range(U.N):
        col = U.column(j)
        acc = [0] * M
        for c, b in zip(col, blocks):
            if c:
                acc = [(a + c * v) for a, v in zip(acc, b)]
        shares.append([a % p for a in acc])
    return shares


def encode_real(X: np.ndarray, U: np.ndarray) -> np.ndarray:
    """X has shape (K, M); returns the (N, M) array of real-valued shares."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != U.shape[0]:
        raise DimensionMismatch(f"need {U.shape[0]} blocks, got {X.shape[0]}")
    return U.T @ X


def encode_repetition(X: Sequence[Sequence[int]], points: EvalPoints) -> list[list[int]]:
    if points.T != 0 or not points.is_repetition:
        raise VariantMismatch("points were not built for uncoded repetition")
    if len(X) != points.K:
        raise DimensionMismatch(f"need {points.K} data blocks, got {len(X)}")
    where = {b: i for i, b in enumerate(points.betas[: points.K])}
    return [list(X[where[a]]) for a in points.alphas]


# --------------------------------------------------------------------------
# share files: header (p, M, j, alpha_j) as little-endian u64, then M 8-byte values.
# Real-valued shares carry p = 0 and store alpha and the payload as float64.

_HEADER = struct.Struct("<QQQ")


def share_to_bytes(share, j: int, alpha, p: int) -> bytes:
    M = len(share)
    head = _HEADER.pack(p, M, j)
    if p:
        return head + struct.pack("<Q", alpha) + struct.pack(f"<{M}Q", *share)
    return head + struct.pack("<d", alpha) + struct.pack(f"<{M}d", *share)


def share_from_bytes(data: bytes) -> tuple[int, int, object, list]:
    """Returns (p, j, alpha, values)."""
    p, M, j = _HEADER.unpack_from(data)
    off = _HEADER.size
    if p:
        (alpha,) = struct.unpack_from("<Q", data, off)
        values = list(struct.unpack_from(f"<{M}Q", data, off + 8))
    else:
        (alpha,) = struct.unpack_from("<d", data, off)
        values = list(struct.unpack_from(f"<{M}d", data, off + 8))
    if len(data) != off + 8 + 8 * M:
        raise ValueError("share file length does not match its header")
    return p, j, alpha, values


def write_shares(outdir, shares, alphas, p: int) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for j, (share, a) in enumerate(zip(shares, alphas)):
        path = outdir / f"worker_{j:04d}.bin"
        path.write_bytes(share_to_bytes([v if p else float(v) for v in share], j, a, p))
        paths.append(path)
    dump = {
        "p": p,
        "M": len(shares[0]) if shares else 0,
        "shares": [{"worker": j, "alpha": a, "values": [v if p else float(v) for v in s]}
                   for j, (s, a) in enumerate(zip(shares, alphas))],
    }
    (outdir / "shares.json").write_text(json.dumps(dump, indent=1, sort_keys=True))
    return paths
