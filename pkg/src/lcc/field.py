"""Prime-field arithmetic and dense univariate polynomials over F_p.

Field elements are plain Python ints in ``[0, p)``.  Polynomials are lists of
coefficients, lowest degree first; the zero polynomial is the empty list.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DuplicateAbscissa, EmptyInput, SingularMatrix, ZeroInverse

DEFAULT_PRIME = 2**31 - 1

# Miller-Rabin with these bases is deterministic for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p.  Construction fails unless ``p`` is prime."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def __call__(self, value: int) -> int:
        return value % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return a * b % self.p

    def neg(self, a: int) -> int:
        return -a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def div(self, a: int, b: int) -> int:
        return a * self.inv(b) % self.p

    def batch_inv(self, values: Sequence[int]) -> list[int]:
        """Montgomery's trick: invert many elements with a single exponentiation."""
        p = self.p
        prefix = [1] * (len(values) + 1)
        for i, v in enumerate(values):
            if v % p == 0:
                raise ZeroInverse("0 has no inverse")
            prefix[i + 1] = prefix[i] * v % p
        acc = self.inv(prefix[-1]) if values else 1
        out = [0] * len(values)
        for i in range(len(values) - 1, -1, -1):
            out[i] = acc * prefix[i] % p
            acc = acc * values[i] % p
        return out

    def signed(self, a: int) -> int:
        """Centered representative in (-p/2, p/2]."""
        a %= self.p
        return a - self.p if a > self.p // 2 else a


# --------------------------------------------------------------------------
# polynomials


def trim(q: list[int]) -> list[int]:
    while q and q[-1] == 0:
        q.pop()
    return q


def degree(q: Sequence[int]) -> int:
    """Degree of ``q``; the zero polynomial has degree -1."""
    return len(q) - 1


def poly_eval(F: PrimeField, q: Sequence[int], x: int) -> int:
    p = F.p
    acc = 0
    for c in reversed(q):
        acc = (acc * x + c) % p
    return acc


def eval_many(F: PrimeField, q: Sequence[int], xs: Iterable[int]) -> list[int]:
    return [poly_eval(F, q, x) for x in xs]


def poly_add(F: PrimeField, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % F.p
    return trim(out)


def poly_scale(F: PrimeField, a: Sequence[int], c: int) -> list[int]:
    return trim([x * c % F.p for x in a])


def poly_mul(F: PrimeField, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    p = F.p
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return trim(out)


def poly_divmod(F: PrimeField, num: Sequence[int], den: Sequence[int]) -> tuple[list[int], list[int]]:
    den = trim(list(den))
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    p = F.p
    rem = trim([c % p for c in num])
    if len(rem) < len(den):
        return [], rem
    lead_inv = F.inv(den[-1])
    quot = [0] * (len(rem) - len(den) + 1)
    for shift in range(len(quot) - 1, -1, -1):
        c = rem[shift + len(den) - 1] * lead_inv % p
        quot[shift] = c
        if c:
            for i, d in enumerate(den):
                rem[shift + i] = (rem[shift + i] - c * d) % p
    return trim(quot), trim(rem[: len(den) - 1])


def from_roots(F: PrimeField, roots: Iterable[int]) -> list[int]:
    """Monic polynomial prod (z - r)."""
    q = [1]
    for r in roots:
        q = poly_mul(F, q, [F.neg(r), 1])
    return q


def _check_abscissas(xs: Sequence[int]) -> None:
    if not xs:
        raise EmptyInput("need at least one point")
    if len(set(xs)) != len(xs):
        raise DuplicateAbscissa("interpolation abscissas must be distinct")


def barycentric_weights(F: PrimeField, xs: Sequence[int]) -> list[int]:
    """w_i = 1 / prod_{j != i} (x_i - x_j)."""
    p = F.p
    dens = []
    for i, xi in enumerate(xs):
        d = 1
        for j, xj in enumerate(xs):
            if i != j:
                d = d * (xi - xj) % p
        dens.append(d)
    return F.batch_inv(dens)


def interpolate(F: PrimeField, points: Sequence[tuple[int, int]]) -> list[int]:
    """Unique polynomial of degree < len(points) through ``points`` (O(k^2))."""
    xs = [F(x) for x, _ in points]
    _check_abscissas(xs)
    ws = barycentric_weights(F, xs)
    master = from_roots(F, xs)
    out = [0] * len(xs)
    p = F.p
    for (xi, (_, y)), w in zip(zip(xs, points), ws):
        c = y * w % p
        if c == 0:
            continue
        # synthetic division of master by (z - xi)
        basis, _ = _deflate(F, master, xi)
        for k, b in enumerate(basis):
            out[k] = (out[k] + c * b) % p
    return trim(out)


def _deflate(F: PrimeField, q: Sequence[int], root: int) -> tuple[list[int], int]:
    p = F.p
    n = len(q) - 1
    out = [0] * n
    acc = 0
    for k in range(n, 0, -1):
        acc = (acc * root + q[k]) % p
        out[k - 1] = acc
    rem = (acc * root + q[0]) % p
    return out, rem


def lagrange_basis(F: PrimeField, xs: Sequence[int]) -> list[list[int]]:
    """The k Lagrange basis polynomials for nodes ``xs``."""
    xs = [F(x) for x in xs]
    _check_abscissas(xs)
    ws = barycentric_weights(F, xs)
    master = from_roots(F, xs)
    return [poly_scale(F, _deflate(F, master, xi)[0], w) for xi, w in zip(xs, ws)]


def lagrange_coeffs_at(F: PrimeField, xs: Sequence[int], target: int) -> list[int]:
    """Values l_i(target) of the Lagrange basis for nodes ``xs``.

    ``sum_i y_i * l_i(target)`` is the interpolant through ``(xs, ys)``
    evaluated at ``target``.
    """
    xs = [F(x) for x in xs]
    _check_abscissas(xs)
    p = F.p
    target %= p
    if target in xs:
        return [1 if x == target else 0 for x in xs]
    ws = barycentric_weights(F, xs)
    full = 1
    for x in xs:
        full = full * (target - x) % p
    diffs_inv = F.batch_inv([(target - x) % p for x in xs])
    return [full * w % p * di % p for w, di in zip(ws, diffs_inv)]


# --------------------------------------------------------------------------
# dense linear algebra mod p


def mat_mul(F: PrimeField, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> list[list[int]]:
    p = F.p
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) % p for col in cols] for row in A]


def _row_reduce(F: PrimeField, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form over the first ``ncols`` columns.  Returns (rows, pivot columns)."""
    p = F.p
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        rows[r] = [v * inv % p for v in rows[r]]
        pr = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [(v - f * w) % p for v, w in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def det(F: PrimeField, A: Sequence[Sequence[int]]) -> int:
    p = F.p
    M = [[v % p for v in row] for row in A]
    n = len(M)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d = d * M[c][c] % p
        inv = F.inv(M[c][c])
        for i in range(c + 1, n):
            f = M[i][c] * inv % p
            if f:
                M[i] = [(v - f * w) % p for v, w in zip(M[i], M[c])]
    return d % p


def mat_inv(F: PrimeField, A: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(A)
    aug = [[v % F.p for v in row] + [int(i == j) for j in range(n)] for i, row in enumerate(A)]
    rows, pivots = _row_reduce(F, aug, n)
    if len(pivots) < n:
        raise SingularMatrix("matrix is not invertible")
    return [row[n:] for row in rows]


def solve_any(F: PrimeField, A: Sequence[Sequence[int]], b: Sequence[int]) -> list[int] | None:
    """One solution of A x = b (free variables set to 0), or None if inconsistent."""
    ncols = len(A[0])
    aug = [[v % F.p for v in row] + [bi % F.p] for row, bi in zip(A, b)]
    rows, pivots = _row_reduce(F, aug, ncols)
    for row in rows[len(pivots):]:
        if row[-1]:
            return None
    x = [0] * ncols
    for row, c in zip(rows, pivots):
        x[c] = row[-1]
    return x


def kernel_vector(F: PrimeField, A: Sequence[Sequence[int]]) -> list[int] | None:
    """A nonzero x with A x = 0, or None when A has full column rank."""
    ncols = len(A[0])
    rows, pivots = _row_reduce(F, [[v % F.p for v in row] for row in A], ncols)
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    x = [0] * ncols
    x[free[0]] = 1
    for row, c in zip(rows, pivots):
        x[c] = -row[free[0]] % F.p
    return x
