"""Hadamard matrix synthesis: Sylvester doubling and Paley constructions.

Covers every multiple of 4 up to 100 except 92 (which needs a Williamson-type
construction), plus orders 1 and 2.  Matrices are built in integer arithmetic
and normalized so the first row and first column are all +1, which keeps
H^T H = n I exact.
"""

from __future__ import annotations

import numpy as np

from .errors import UnknownOrder


def _factorize(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _prime_power(n: int) -> tuple[int, int] | None:
    """Return (p, k) if n = p^k for a single prime p, else None."""
    if n < 2:
        return None
    factors = _factorize(n)
    if len(factors) != 1:
        return None
    p, k = next(iter(factors.items()))
    return p, k


class _GF:
    """Tiny GF(p^k) just big enough to evaluate the quadratic character.

    Elements are encoded as integers in [0, q) read as base-p coefficient
    vectors of polynomials modulo a monic irreducible of degree k.
    """

    def __init__(self, p: int, k: int):
        self.p, self.k, self.q = p, k, p**k
        self.modulus = self._find_irreducible() if k > 1 else None

    def _find_irreducible(self) -> tuple[int, ...]:
        p, k = self.p, self.k
        if k > 3:
            raise NotImplementedError("only degrees <= 3 are needed below order 100")
        # degree 2 or 3: irreducible over GF(p) iff it has no root
        for code in range(p**k):
            coeffs = self._decode(code) + (1,)  # monic
            if all(self._poly_eval(coeffs, x) != 0 for x in range(p)):
                return coeffs
        raise RuntimeError("no irreducible polynomial found")  # unreachable

    def _decode(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            out.append(code % self.p)
            code //= self.p
        return tuple(out)

    def _encode(self, coeffs) -> int:
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + c % self.p
        return code

    def _poly_eval(self, coeffs, x: int) -> int:
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def sub(self, a: int, b: int) -> int:
        av, bv = self._decode(a), self._decode(b)
        return self._encode([(x - y) % self.p for x, y in zip(av, bv)])

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        av, bv = self._decode(a), self._decode(b)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(av):
            for j, y in enumerate(bv):
                prod[i + j] = (prod[i + j] + x * y) % self.p
        # reduce modulo the monic irreducible
        mod = self.modulus
        for top in range(len(prod) - 1, self.k - 1, -1):
            c = prod[top]
            if c:
                for i in range(self.k):
                    prod[top - self.k + i] = (prod[top - self.k + i] - c * mod[i]) % self.p
                prod[top] = 0
        return self._encode(prod[: self.k])

    def quadratic_character(self) -> list[int]:
        """chi(x) for every x in [0, q): 0 at 0, +1 on squares, -1 otherwise."""
        squares = {self.mul(x, x) for x in range(1, self.q)}
        return [0] + [1 if x in squares else -1 for x in range(1, self.q)]


def _jacobsthal(q: int) -> np.ndarray:
    p, k = _prime_power(q)  # type: ignore[misc]
    gf = _GF(p, k)
    chi = gf.quadratic_character()
    Q = np.empty((q, q), dtype=np.int64)
    for i in range(q):
        for j in range(q):
            Q[i, j] = chi[gf.sub(i, j)]
    return Q


def _paley_one(q: int) -> np.ndarray:
    """Order q+1 for prime power q = 3 (mod 4)."""
    Q = _jacobsthal(q)
    n = q + 1
    S = np.zeros((n, n), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    return np.eye(n, dtype=np.int64) + S


def _paley_two(q: int) -> np.ndarray:
    """Order 2(q+1) for prime power q = 1 (mod 4)."""
    Q = _jacobsthal(q)
    n = q + 1
    C = np.zeros((n, n), dtype=np.int64)
    C[0, 1:] = 1
    C[1:, 0] = 1
    C[1:, 1:] = Q
    pos = np.array([[1, 1], [1, -1]], dtype=np.int64)
    zero = np.array([[1, -1], [-1, -1]], dtype=np.int64)
    return np.kron(C, pos) + np.kron(np.eye(n, dtype=np.int64), zero)


def _normalize(h: np.ndarray) -> np.ndarray:
    """Flip signs so the first row and first column are all +1."""
    h = h * h[0]  # flip columns
    h = h * h[:, :1]  # flip rows
    return h


def _construct(order: int) -> np.ndarray | None:
    if order == 1:
        return np.array([[1]], dtype=np.int64)
    if order == 2:
        return np.array([[1, 1], [1, -1]], dtype=np.int64)
    if order % 4 != 0:
        return None
    if order % 2 == 0:
        half = _construct(order // 2)
        if half is not None:
            return np.kron(np.array([[1, 1], [1, -1]], dtype=np.int64), half)
    pp = _prime_power(order - 1)
    if pp is not None and (order - 1) % 4 == 3:
        return _normalize(_paley_one(order - 1))
    if order % 2 == 0:
        q = order // 2 - 1
        pp = _prime_power(q)
        if pp is not None and q % 4 == 1:
            return _normalize(_paley_two(q))
    return None


def hadamard(order: int) -> np.ndarray:
    """Hadamard matrix of the given order as a complex array.

    First row and column are all +1 and H^T H = order * I exactly.  Raises
    UnknownOrder when no implemented construction reaches the order.
    """
    if order < 1:
        raise ValueError("order must be positive")
    h = _construct(order)
    if h is None:
        raise UnknownOrder(f"no Sylvester/Paley construction for order {order}")
    return h.astype(np.complex128)


def smallest_hadamard_order(minimum: int) -> int:
    """Smallest constructible order >= minimum (raises UnknownOrder beyond 2x)."""
    order = minimum
    while order <= 2 * minimum:
        if order in (1, 2) or order % 4 == 0:
            if _construct(order) is not None:
                return order
        order += 1
    raise UnknownOrder(f"no constructible Hadamard order in [{minimum}, {2 * minimum}]")
