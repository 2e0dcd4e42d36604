"""Graded weight-multiplicity predictions in characteristic zero.

The q-analogue of the Kostant partition function counts the expressions of a
root-lattice vector as a multiset of positive roots, graded by multiset size;
the q-analogue of the weight multiplicity is its alternating Weyl-group sum
at rho-shifted arguments.  Evaluation at q = 1 recovers the plain weight
multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded
from .rootdata import RootDatum, weyl_elements


@dataclass(frozen=True)
class QPolynomial:
    """Integer-coefficient polynomial in q, ascending exponents, trimmed."""

    coeffs: tuple

    @staticmethod
    def make(coeffs) -> "QPolynomial":
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        return QPolynomial(tuple(int(c) for c in coeffs))

    @staticmethod
    def zero() -> "QPolynomial":
        return QPolynomial(())

    @staticmethod
    def one() -> "QPolynomial":
        return QPolynomial((1,))

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return QPolynomial.make(
            [
                (self.coeffs[i] if i < len(self.coeffs) else 0)
                + (other.coeffs[i] if i < len(other.coeffs) else 0)
                for i in range(n)
            ]
        )

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + other.scale(-1)

    def scale(self, c: int) -> "QPolynomial":
        return QPolynomial.make([c * x for x in self.coeffs])

    def shift(self, k: int = 1) -> "QPolynomial":
        """Multiply by q^k."""
        if not self.coeffs:
            return self
        return QPolynomial(tuple([0] * k) + self.coeffs)

    def evaluate(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        return len(self.coeffs) - 1


def _box_points(coords):
    """All integer points 0 <= c <= coords, sorted by height then lex."""
    points = [()]
    for bound in coords:
        points = [p + (v,) for p in points for v in range(bound + 1)]
    return sorted(points, key=lambda c: (sum(c), c))


def q_kostant_partition(datum: RootDatum, beta) -> QPolynomial:
    """Generating polynomial of expressions of beta as positive-root multisets,
    graded by the number of parts; 0 outside the nonnegative root cone.

    One in-place convolution pass per positive root (heights ascending) over
    the finite box under beta.
    """
    coords = datum.root_coordinates(tuple(beta))
    if coords is None or any(c < 0 for c in coords):
        return QPolynomial.zero()
    points = _box_points(coords)
    table = {p: QPolynomial.zero() for p in points}
    table[tuple([0] * datum.rank)] = QPolynomial.one()
    for root in datum.pos_roots:
        for p in points:
            prev = tuple(a - b for a, b in zip(p, root))
            if all(x >= 0 for x in prev):
                table[p] = table[p] + table[prev].shift(1)
    return table[coords]


def q_kostant_bruteforce(datum: RootDatum, beta, height_cap: int = 12) -> QPolynomial:
    """Exhaustive multiset enumeration; independent oracle for the DP."""
    coords = datum.root_coordinates(tuple(beta))
    if coords is None or any(c < 0 for c in coords):
        return QPolynomial.zero()
    if sum(coords) > height_cap:
        raise CapExceeded(f"brute force capped at height {height_cap}")
    counts = {}

    def walk(remaining, root_idx, parts):
        if all(x == 0 for x in remaining):
            counts[parts] = counts.get(parts, 0) + 1
            return
        if root_idx >= len(datum.pos_roots):
            return
        root = datum.pos_roots[root_idx]
        k = 0
        current = remaining
        while True:
            walk(current, root_idx + 1, parts + k)
            nxt = tuple(a - b for a, b in zip(current, root))
            if any(x < 0 for x in nxt):
                break
            current = nxt
            k += 1

    walk(coords, 0, 0)
    top = max(counts, default=0)
    return QPolynomial.make([counts.get(i, 0) for i in range(top + 1)])


def lusztig_q_analogue(
    datum: RootDatum, lam, mu, weyl_cap: int = 10_000
) -> QPolynomial:
    """Alternating Weyl sum of the q-partition function at w(lam+rho)-(mu+rho).

    Both weights must be dominant; terms whose argument falls outside the
    nonnegative root cone contribute nothing.
    """
    lam, mu = tuple(lam), tuple(mu)
    if not datum.is_dominant(lam) or not datum.is_dominant(mu):
        raise ValueError("q-analogue needs dominant weights")
    rho = datum.rho_shift()
    lam_rho = datum.add_weights(lam, rho)
    mu_rho = datum.add_weights(mu, rho)
    total = QPolynomial.zero()
    for mat, sign in weyl_elements(datum, cap=weyl_cap):
        arg = datum.sub_weights(datum.act(mat, lam_rho), mu_rho)
        part = q_kostant_partition(datum, arg)
        if not part.is_zero():
            total = total + part.scale(sign)
    return total
