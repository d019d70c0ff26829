import numpy as np
import pytest
from hypothesis import given, strategies as st

from lcc import functions
from lcc.errors import DimensionMismatch
from lcc.field import PrimeField

F11 = PrimeField(11)


class TestBuiltins:
    def test_examples(self):
        assert functions.evaluate(functions.identity(2), [3, 7], F11) == [3, 7]
        assert functions.evaluate(functions.elementwise_square(1), [3], F11) == [9]
        spec = functions.gradient_kernel([1, 0], rows=1)
        assert functions.evaluate(spec, [2, 5], F11) == [4, 10]

    def test_declared_degrees(self):
        assert functions.degree_of(functions.identity(3)) == 1
        assert functions.degree_of(functions.linear_map([1, 2], 2)) == 1
        assert functions.degree_of(functions.elementwise_square(3)) == 2
        assert functions.degree_of(functions.bilinear_product(2, 2, 2)) == 2
        assert functions.degree_of(functions.gradient_kernel([1, 2], 3)) == 2
        assert functions.degree_of(functions.multilinear_monomial(3)) == 3

    def test_bilinear(self):
        spec = functions.bilinear_product(1, 2, 1)
        assert functions.evaluate(spec, [1, 2, 3, 4], F11) == [(3 + 8) % 11]

    def test_matrix_square(self):
        spec = functions.matrix_square(2)
        assert spec.declared_degree == 2
        # [[1, 2], [3, 4]]^2 = [[7, 10], [15, 22]]
        assert functions.evaluate(spec, [1, 2, 3, 4], F11) == [7, 10, 4, 0]
        assert functions.by_name("matrix_square", 9).params["side"] == 3

    def test_linear_map(self):
        spec = functions.linear_map([1, 2], rows=2)
        assert functions.evaluate(spec, [1, 1, 3, 4], F11) == [3, 11 % 11]

    def test_wrong_dimension(self):
        with pytest.raises(DimensionMismatch):
            functions.evaluate(functions.identity(2), [1, 2, 3], F11)

    def test_with_params(self):
        spec = functions.gradient_kernel([1, 0], rows=1)
        new = spec.with_params(w=[0, 1])
        assert functions.evaluate(new, [2, 5], F11) == [10, 25 % 11]
        assert spec.params["w"] == [1, 0]

    def test_real_mode(self):
        out = functions.evaluate(functions.elementwise_square(2), [1.5, -2.0])
        np.testing.assert_allclose(out, [2.25, 4.0])

    def test_by_name(self):
        assert functions.by_name("square", 3).kind == "elementwise_square"
        assert functions.by_name("monomial", 6, arity=3).declared_degree == 3
        with pytest.raises(DimensionMismatch):
            functions.by_name("monomial", 5, arity=3)
        with pytest.raises(ValueError):
            functions.by_name("nope", 3)


class TestCustom:
    def test_registered_evaluator(self):
        spec = functions.custom("cube_sum", lambda x, s: [sum(v**3 for v in x)], 3, 2, 1)
        assert functions.evaluate(spec, [2, 3], F11) == [(8 + 27) % 11]

    def test_bad_degree(self):
        with pytest.raises(ValueError):
            functions.custom("bad", lambda x, s: x, 0, 1, 1)


@given(st.integers(1, 3), st.lists(st.integers(0, 126), min_size=6, max_size=6), st.integers(0, 126))
def test_degree_is_honest(d, x, c):
    """f(c x) = c^d f(x) for the homogeneous built-ins."""
    F = PrimeField(127)
    spec = functions.for_degree(d, 6 // d if d != 2 else 6)
    x = x[: spec.input_dim]
    lhs = functions.evaluate(spec, [c * v % 127 for v in x], F)
    rhs = [pow(c, d, 127) * v % 127 for v in functions.evaluate(spec, x, F)]
    assert lhs == rhs
