import numpy as np
import pytest
from hypothesis import given, strategies as st

from lcc.codec import (
    RandomPad,
    build_matrix,
    build_matrix_real,
    encode,
    encode_real,
    encode_repetition,
    make_pad,
    share_from_bytes,
    share_to_bytes,
    write_shares,
)
from lcc.errors import DimensionMismatch, VariantMismatch
from lcc.field import PrimeField, interpolate, poly_eval
from lcc.scheme import EvalPoints, SchemeParams, Variant, make_eval_points

F11 = PrimeField(11)
NO_PAD = RandomPad((), 0, 0)


class TestMatrix:
    def test_small_example(self):
        U = build_matrix(F11, EvalPoints((1, 2), (3, 4), 2))
        assert [list(r) for r in U.U] == [[10, 9], [2, 3]]

    def test_column_at_node_is_unit_vector(self):
        U = build_matrix(F11, EvalPoints((1, 2, 3), (2, 5), 3))
        assert U.column(0) == [0, 1, 0]

    def test_single_block_is_all_ones(self):
        U = build_matrix(F11, EvalPoints((1,), (2, 3, 4), 1))
        assert [list(r) for r in U.U] == [[1, 1, 1]]

    def test_worked_example_masks_every_share(self):
        # K=2, T=1, 8 workers: each share is a combination of the data plus a nonzero multiple of Z
        pts = make_eval_points(SchemeParams(8, 2, 1, 1, 1, 2, 11))
        U = build_matrix(F11, pts)
        assert all(U.bottom[0][j] != 0 for j in range(8))

    def test_real_matches_field_formula(self):
        Ur = build_matrix_real([1, 2], [3, 4])
        np.testing.assert_allclose(Ur, [[-1, -2], [2, 3]])


class TestEncode:
    def test_small_example(self):
        U = build_matrix(F11, EvalPoints((1, 2), (3, 4), 2))
        assert encode([[1], [4]], NO_PAD, U) == [[7], [10]]

    def test_constant_dataset(self):
        U = build_matrix(F11, EvalPoints((1, 2), (3, 4, 5, 6), 2))
        assert encode([[5, 2], [5, 2]], NO_PAD, U) == [[5, 2]] * 4

    @given(st.data())
    def test_shares_lie_on_interpolant(self, data):
        p = 127
        F = PrimeField(p)
        K = data.draw(st.integers(1, 4))
        T = data.draw(st.integers(0, 3))
        N = data.draw(st.integers(1, 10))
        M = data.draw(st.integers(1, 3))
        seed = data.draw(st.integers(0, 2**32))
        pts = EvalPoints(tuple(range(1, K + T + 1)), tuple(range(K + T + 1, K + T + N + 1)), K, T)
        X = [[data.draw(st.integers(0, p - 1)) for _ in range(M)] for _ in range(K)]
        pad = make_pad(F, T, M, seed)
        shares = encode(X, pad, build_matrix(F, pts))
        blocks = X + [list(z) for z in pad.Z]
        for m in range(M):
            u = interpolate(F, [(b, blk[m]) for b, blk in zip(pts.betas, blocks)])
            assert [s[m] for s in shares] == [poly_eval(F, u, a) for a in pts.alphas]

    def test_dimension_checks(self):
        U = build_matrix(F11, EvalPoints((1, 2), (3, 4), 2))
        with pytest.raises(DimensionMismatch):
            encode([[1]], NO_PAD, U)
        with pytest.raises(DimensionMismatch):
            encode([[1], [2, 3]], NO_PAD, U)

    def test_real(self):
        Ur = build_matrix_real([1, 2], [3, 4])
        np.testing.assert_allclose(encode_real(np.array([[1.0], [4.0]]), Ur), [[7.0], [10.0]])


class TestRepetition:
    def test_round_robin(self):
        pts = make_eval_points(SchemeParams(5, 2, 0, 0, 0, 2, 127, Variant.UNCODED_REPETITION))
        assert encode_repetition([["a"], ["b"]], pts) == [["a"], ["b"], ["a"], ["b"], ["a"]]
        pts = make_eval_points(SchemeParams(3, 1, 0, 0, 0, 1, 127, Variant.UNCODED_REPETITION))
        assert encode_repetition([[9]], pts) == [[9]] * 3

    def test_replication_counts(self):
        for N in range(1, 12):
            for K in range(1, N + 1):
                pts = EvalPoints(tuple(range(1, K + 1)), tuple(1 + j % K for j in range(N)), K)
                counts = [pts.alphas.count(b) for b in pts.betas]
                assert min(counts) == N // K and max(counts) == -(-N // K)

    def test_wrong_points(self):
        pts = EvalPoints((1, 2), (3, 4), 2)
        with pytest.raises(VariantMismatch):
            encode_repetition([[1], [2]], pts)


class TestPad:
    @given(st.integers(0, 5), st.integers(1, 6), st.integers(0, 2**40))
    def test_consumption_and_replay(self, T, M, seed):
        F = PrimeField(2**31 - 1)
        pad = make_pad(F, T, M, seed)
        assert pad.consumed == T * M
        assert len(pad.Z) == T and all(len(z) == M for z in pad.Z)
        assert pad == make_pad(F, T, M, seed)
        assert all(0 <= v < F.p for z in pad.Z for v in z)


class TestShareFiles:
    def test_roundtrip_field(self):
        raw = share_to_bytes([1, 2, 2**61 - 2], 3, 17, 2**61 - 1)
        assert len(raw) == 24 + 8 + 24
        assert share_from_bytes(raw) == (2**61 - 1, 3, 17, [1, 2, 2**61 - 2])

    def test_roundtrip_real(self):
        p, j, alpha, vals = share_from_bytes(share_to_bytes([0.5, -1.25], 1, 2.0, 0))
        assert (p, j, alpha, vals) == (0, 1, 2.0, [0.5, -1.25])

    def test_truncated(self):
        with pytest.raises(Exception):
            share_from_bytes(share_to_bytes([1, 2], 0, 3, 11)[:-4])

    def test_write(self, tmp_path):
        paths = write_shares(tmp_path, [[1, 2], [3, 4]], [5, 6], 11)
        assert [p.name for p in paths] == ["worker_0000.bin", "worker_0001.bin"]
        assert share_from_bytes(paths[1].read_bytes()) == (11, 1, 6, [3, 4])
        assert (tmp_path / "shares.json").exists()
