import itertools

import pytest
from hypothesis import given, strategies as st

from lcc.errors import DuplicateAbscissa, EmptyInput, SingularMatrix, ZeroInverse
from lcc.field import (
    PrimeField,
    barycentric_weights,
    det,
    eval_many,
    from_roots,
    interpolate,
    is_prime,
    kernel_vector,
    lagrange_basis,
    lagrange_coeffs_at,
    mat_inv,
    mat_mul,
    poly_divmod,
    poly_eval,
    poly_mul,
    solve_any,
)

F11 = PrimeField(11)
PRIMES = [2, 3, 11, 127, 2**31 - 1, 2**61 - 1]


def brute_inverse(p, a):
    return next(x for x in range(1, p) if a * x % p == 1)


class TestPrimality:
    def test_small_primes_match_trial_division(self):
        for n in range(-3, 2000):
            oracle = n > 1 and all(n % k for k in range(2, int(n**0.5) + 1))
            assert is_prime(n) == oracle, n

    def test_large(self):
        assert is_prime(2**61 - 1)
        assert not is_prime((2**31 - 1) * (2**61 - 1))
        assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7

    def test_composite_modulus_rejected(self):
        with pytest.raises(ValueError):
            PrimeField(12)


class TestArithmetic:
    def test_inverse_examples(self):
        assert F11.inv(10) == 10
        assert F11.inv(1) == 1
        with pytest.raises(ZeroInverse):
            F11.inv(0)
        with pytest.raises(ZeroDivisionError):
            F11.div(3, 0)

    def test_inverse_matches_exhaustive_search(self):
        for a in range(1, 11):
            assert F11.inv(a) == brute_inverse(11, a)

    @given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
    def test_field_axioms(self, p, a, b, c):
        F = PrimeField(p)
        a, b, c = F(a), F(b), F(c)
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.add(a, F.neg(a)) == 0
        assert F.sub(a, b) == F.add(a, F.neg(b))
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.div(F.mul(a, b), a) == b

    @given(st.lists(st.integers(1, 2**31 - 2), min_size=1, max_size=20))
    def test_batch_inverse(self, xs):
        F = PrimeField(2**31 - 1)
        assert F.batch_inv(xs) == [F.inv(x) for x in xs]

    def test_batch_inverse_rejects_zero(self):
        with pytest.raises(ZeroInverse):
            F11.batch_inv([3, 0, 4])

    def test_signed_representative(self):
        assert F11.signed(10) == -1
        assert F11.signed(5) == 5
        assert F11.signed(6) == -5


class TestPolynomials:
    def test_interpolation_examples(self):
        assert interpolate(F11, [(1, 1), (2, 4), (3, 9)]) == [0, 0, 1]
        assert interpolate(F11, [(1, 5), (2, 5)]) == [5]
        with pytest.raises(DuplicateAbscissa):
            interpolate(F11, [(1, 1), (1, 2)])
        with pytest.raises(EmptyInput):
            interpolate(F11, [])

    def test_evaluation_examples(self):
        assert eval_many(F11, [0, 0, 1], [3]) == [9]
        q = interpolate(F11, [(1, 1), (2, 4), (3, 9)])
        assert eval_many(F11, q, [4]) == [5]
        assert eval_many(F11, [], [0, 3, 7]) == [0, 0, 0]

    @given(st.data())
    def test_interpolate_roundtrip(self, data):
        p = data.draw(st.sampled_from([11, 127, 2**31 - 1]))
        F = PrimeField(p)
        n = data.draw(st.integers(1, min(p, 12)))
        xs = data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n, unique=True))
        ys = data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
        q = interpolate(F, list(zip(xs, ys)))
        assert len(q) <= n
        assert eval_many(F, q, xs) == ys

    @given(st.lists(st.integers(0, 126), max_size=6), st.lists(st.integers(0, 126), min_size=1, max_size=5))
    def test_divmod(self, a, b):
        F = PrimeField(127)
        if not any(b):
            return
        q, r = poly_divmod(F, a, b)
        while b and b[-1] == 0:
            b = b[:-1]
        assert len(r) < len(b)
        for x in range(5):
            lhs = poly_eval(F, a, x)
            rhs = F.add(poly_eval(F, poly_mul(F, q, b), x), poly_eval(F, r, x))
            assert lhs == rhs

    def test_from_roots(self):
        q = from_roots(F11, [2, 5])
        assert [poly_eval(F11, q, x) == 0 for x in range(11)].count(True) == 2
        assert q[-1] == 1

    @given(st.lists(st.integers(0, 126), min_size=1, max_size=8, unique=True), st.integers(0, 126))
    def test_lagrange_coefficients(self, xs, t):
        F = PrimeField(127)
        c = lagrange_coeffs_at(F, xs, t)
        basis = lagrange_basis(F, xs)
        assert c == [poly_eval(F, b, t) for b in basis]
        assert sum(c) % 127 == 1  # partition of unity

    def test_barycentric_weights(self):
        xs = [1, 2, 4]
        w = barycentric_weights(F11, xs)
        for i, xi in enumerate(xs):
            prod = 1
            for j, xj in enumerate(xs):
                if j != i:
                    prod = prod * (xi - xj) % 11
            assert w[i] * prod % 11 == 1


class TestLinearAlgebra:
    def test_det_matches_permutation_expansion(self):
        import numpy as np

        rng = np.random.default_rng(3)
        for n in range(1, 5):
            for _ in range(10):
                A = rng.integers(0, 11, size=(n, n)).tolist()
                total = 0
                for perm in itertools.permutations(range(n)):
                    sign = (-1) ** sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
                    term = sign
                    for i in range(n):
                        term *= A[i][perm[i]]
                    total += term
                assert det(F11, A) == total % 11

    def test_inverse(self):
        A = [[2, 3], [1, 4]]
        Ai = mat_inv(F11, A)
        assert mat_mul(F11, A, Ai) == [[1, 0], [0, 1]]
        with pytest.raises(SingularMatrix):
            mat_inv(F11, [[1, 2], [2, 4]])

    def test_solve_and_kernel(self):
        A = [[1, 2], [2, 4]]
        assert solve_any(F11, A, [1, 3]) is None
        x = solve_any(F11, A, [1, 2])
        assert [sum(a * b for a, b in zip(r, x)) % 11 for r in A] == [1, 2]
        v = kernel_vector(F11, A)
        assert any(v) and all(sum(a * b for a, b in zip(r, v)) % 11 == 0 for r in A)
        assert kernel_vector(F11, [[1, 0], [0, 1]]) is None
