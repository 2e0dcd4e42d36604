"""Exact dense linear algebra over Q, Z and prime fields.

Everything downstream sits on this module: rational rank/kernel, column
Hermite normal form for integer lattices, reduction of rational matrices mod
p, and characteristic polynomials with full factorization over F_p.

Matrices are immutable (tuple-of-tuples entries); all operations are pure
functions, so values can be shared freely across threads.  Dimensions are
desk scale (<= ~2000); no sparsity, no asymptotically clever algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Sequence

from .errors import InternalCheckError, NonIntegral


def _freeze_q(rows: Iterable[Iterable]) -> tuple:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _freeze_z(rows: Iterable[Iterable]) -> tuple:
    out = []
    for row in rows:
        frozen = []
        for x in row:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integer entry {x}")
                x = x.numerator
            frozen.append(int(x))
        out.append(tuple(frozen))
    return tuple(out)


@dataclass(frozen=True)
class MatrixQ:
    """Dense matrix with arbitrary-precision rational entries."""

    rows: int
    cols: int
    entries: tuple

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "MatrixQ":
        frozen = _freeze_q(rows)
        ncols = len(frozen[0]) if frozen else 0
        if any(len(r) != ncols for r in frozen):
            raise ValueError("ragged rows")
        return MatrixQ(len(frozen), ncols, frozen)

    @staticmethod
    def identity(n: int) -> "MatrixQ":
        return MatrixQ.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> "MatrixQ":
        return MatrixQ(rows, cols, tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows)))

    def __matmul__(self, other: "MatrixQ") -> "MatrixQ":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        bt = list(zip(*other.entries)) if other.entries else []
        prod = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in bt)
            for row in self.entries
        )
        return MatrixQ(self.rows, other.cols, prod)

    def __add__(self, other: "MatrixQ") -> "MatrixQ":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return MatrixQ(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "MatrixQ") -> "MatrixQ":
        return self + other.scale(-1)

    def scale(self, c) -> "MatrixQ":
        c = Fraction(c)
        return MatrixQ(self.rows, self.cols, tuple(tuple(c * x for x in row) for row in self.entries))

    def transpose(self) -> "MatrixQ":
        return MatrixQ(self.cols, self.rows, tuple(zip(*self.entries)) if self.entries else ())

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def to_z(self) -> "MatrixZ":
        return MatrixZ(self.rows, self.cols, _freeze_z(self.entries))

    def hstack(self, other: "MatrixQ") -> "MatrixQ":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return MatrixQ(
            self.rows,
            self.cols + other.cols,
            tuple(r1 + r2 for r1, r2 in zip(self.entries, other.entries)),
        )


@dataclass(frozen=True)
class MatrixZ:
    """Dense matrix with arbitrary-precision integer entries."""

    rows: int
    cols: int
    entries: tuple

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "MatrixZ":
        frozen = _freeze_z(rows)
        ncols = len(frozen[0]) if frozen else 0
        if any(len(r) != ncols for r in frozen):
            raise ValueError("ragged rows")
        return MatrixZ(len(frozen), ncols, frozen)

    def to_q(self) -> MatrixQ:
        return MatrixQ(self.rows, self.cols, _freeze_q(self.entries))

    def to_fp(self, p: int) -> "MatrixFp":
        return MatrixFp(
            self.rows, self.cols, tuple(tuple(x % p for x in row) for row in self.entries), p
        )

    def __matmul__(self, other: "MatrixZ") -> "MatrixZ":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        bt = list(zip(*other.entries)) if other.entries else []
        prod = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in bt)
            for row in self.entries
        )
        return MatrixZ(self.rows, other.cols, prod)

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)


@dataclass(frozen=True)
class MatrixFp:
    """Dense matrix over the prime field F_p; entries are residues in [0, p)."""

    rows: int
    cols: int
    entries: tuple
    p: int

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p**0.5) + 1)):
            raise ValueError(f"{self.p} is not prime")
        if any(not (0 <= x < self.p) for row in self.entries for x in row):
            raise ValueError("entry out of range")

    @staticmethod
    def from_rows(rows: Sequence[Sequence], p: int) -> "MatrixFp":
        frozen = tuple(tuple(int(x) % p for x in row) for row in rows)
        ncols = len(frozen[0]) if frozen else 0
        if any(len(r) != ncols for r in frozen):
            raise ValueError("ragged rows")
        return MatrixFp(len(frozen), ncols, frozen, p)

    @staticmethod
    def identity(n: int, p: int) -> "MatrixFp":
        return MatrixFp.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], p)

    @staticmethod
    def zero(rows: int, cols: int, p: int) -> "MatrixFp":
        return MatrixFp(rows, cols, tuple(tuple(0 for _ in range(cols)) for _ in range(rows)), p)

    def __matmul__(self, other: "MatrixFp") -> "MatrixFp":
        if self.cols != other.rows or self.p != other.p:
            raise ValueError("dimension or prime mismatch")
        p = self.p
        bt = list(zip(*other.entries)) if other.entries else []
        prod = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) % p for col in bt)
            for row in self.entries
        )
        return MatrixFp(self.rows, other.cols, prod, p)

    def __add__(self, other: "MatrixFp") -> "MatrixFp":
        if (self.rows, self.cols, self.p) != (other.rows, other.cols, other.p):
            raise ValueError("mismatch")
        p = self.p
        return MatrixFp(
            self.rows,
            self.cols,
            tuple(tuple((a + b) % p for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
            p,
        )

    def __sub__(self, other: "MatrixFp") -> "MatrixFp":
        return self + other.scale(-1)

    def scale(self, c: int) -> "MatrixFp":
        c %= self.p
        return MatrixFp(
            self.rows, self.cols, tuple(tuple((c * x) % self.p for x in row) for row in self.entries), self.p
        )

    def transpose(self) -> "MatrixFp":
        return MatrixFp(self.cols, self.rows, tuple(zip(*self.entries)) if self.entries else (), self.p)

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def vstack(self, other: "MatrixFp") -> "MatrixFp":
        if self.cols != other.cols or self.p != other.p:
            raise ValueError("mismatch")
        return MatrixFp(self.rows + other.rows, self.cols, self.entries + other.entries, self.p)

    def trace(self) -> int:
        return sum(self.entries[i][i] for i in range(self.rows)) % self.p


@dataclass(frozen=True)
class LatticeBasis:
    """Basis of a full-rank-in-its-span sublattice of Z^n in column HNF.

    Columns are echelon with strictly increasing pivot rows, positive pivots,
    and entries reduced above each pivot.  The ambient rational coordinate
    system is fixed by the caller; this object only sees integers.
    """

    ambient: int
    basis: MatrixZ

    @property
    def rank(self) -> int:
        return self.basis.cols

    def pivots(self) -> list:
        piv = []
        for j in range(self.basis.cols):
            col = self.basis.column(j)
            i = next(k for k, x in enumerate(col) if x != 0)
            piv.append(i)
        return piv

    def member_coordinates(self, vector: Sequence[int]):
        """Integer coordinates of `vector` in this basis, or None."""
        vec = [int(x) for x in vector]
        if len(vec) != self.ambient:
            raise ValueError("ambient mismatch")
        coords = []
        piv = self.pivots()
        for j in range(self.basis.cols):
            i = piv[j]
            pivot = self.basis.entries[i][j]
            if vec[i] % pivot != 0:
                return None
            c = vec[i] // pivot
            coords.append(c)
            col = self.basis.column(j)
            for k in range(self.ambient):
                vec[k] -= c * col[k]
        if any(x != 0 for x in vec):
            return None
        return coords


# ---------------------------------------------------------------------------
# rank / kernel


def rank_kernel_Q(m: MatrixQ):
    """Rank and a basis of the right kernel (as kernel columns) over Q."""
    work = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if work[i][c] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = Fraction(1) / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    kernel_cols = []
    for fc in free_cols:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row_idx, pc in enumerate(pivot_cols):
            v[pc] = -work[row_idx][fc]
        kernel_cols.append(v)
    kernel = MatrixQ(
        ncols, len(kernel_cols), tuple(tuple(col[i] for col in kernel_cols) for i in range(ncols))
    )
    _check_kernel_q(m, r, kernel)
    return r, kernel


def _check_kernel_q(m: MatrixQ, rank: int, kernel: MatrixQ):
    if rank + kernel.cols != m.cols:
        raise InternalCheckError("rank-nullity violated over Q")
    if kernel.cols and not (m @ kernel).is_zero():
        raise InternalCheckError("kernel columns not annihilated over Q")


def rank_kernel_Fp(m: MatrixFp):
    """Rank and right-kernel basis columns over F_p."""
    p = m.p
    work = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if work[i][c] % p != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = pow(work[r][c], p - 2, p)
        work[r] = [(x * inv) % p for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][c] % p != 0:
                f = work[i][c]
                work[i] = [(a - f * b) % p for a, b in zip(work[i], work[r])]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    free_cols = [c for c in range(ncols) if c not in pivot_cols]
    kernel_cols = []
    for fc in free_cols:
        v = [0] * ncols
        v[fc] = 1
        for row_idx, pc in enumerate(pivot_cols):
            v[pc] = (-work[row_idx][fc]) % p
        kernel_cols.append(v)
    kernel = MatrixFp(
        ncols, len(kernel_cols), tuple(tuple(col[i] for col in kernel_cols) for i in range(ncols)), p
    )
    if r + kernel.cols != ncols:
        raise InternalCheckError("rank-nullity violated over F_p")
    if kernel.cols and not (m @ kernel).is_zero():
        raise InternalCheckError("kernel columns not annihilated over F_p")
    return r, kernel


def solve_Q(a: MatrixQ, b: MatrixQ):
    """One solution X of a X = b over Q, or None if inconsistent."""
    nrows, ncols = a.rows, a.cols
    work = [list(ra) + list(rb) for ra, rb in zip(a.entries, b.entries)]
    pivot_cols = []
    r = 0
    total = ncols + b.cols
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if work[i][c] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = Fraction(1) / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if any(work[i][c] != 0 for c in range(ncols, total)) and all(
            work[i][c] == 0 for c in range(ncols)
        ):
            return None
    sol = [[Fraction(0)] * b.cols for _ in range(ncols)]
    for row_idx, pc in enumerate(pivot_cols):
        for j in range(b.cols):
            sol[pc][j] = work[row_idx][ncols + j]
    return MatrixQ(ncols, b.cols, tuple(tuple(row) for row in sol))


def invert_Q(a: MatrixQ) -> MatrixQ:
    if a.rows != a.cols:
        raise ValueError("not square")
    sol = solve_Q(a, MatrixQ.identity(a.rows))
    if sol is None or not (a @ sol - MatrixQ.identity(a.rows)).is_zero():
        raise ValueError("matrix not invertible")
    return sol


def solve_Fp(a: MatrixFp, b: MatrixFp):
    """One solution X of a X = b over F_p, or None if inconsistent."""
    p = a.p
    nrows, ncols = a.rows, a.cols
    work = [list(ra) + list(rb) for ra, rb in zip(a.entries, b.entries)]
    pivot_cols = []
    r = 0
    total = ncols + b.cols
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if work[i][c] % p != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = pow(work[r][c], p - 2, p)
        work[r] = [(x * inv) % p for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][c] % p != 0:
                f = work[i][c]
                work[i] = [(x - f * y) % p for x, y in zip(work[i], work[r])]
        pivot_cols.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if any(work[i][c] != 0 for c in range(ncols, total)) and all(
            work[i][c] == 0 for c in range(ncols)
        ):
            return None
    sol = [[0] * b.cols for _ in range(ncols)]
    for row_idx, pc in enumerate(pivot_cols):
        for j in range(b.cols):
            sol[pc][j] = work[row_idx][ncols + j]
    return MatrixFp(ncols, b.cols, tuple(tuple(row) for row in sol), p)


# ---------------------------------------------------------------------------
# Hermite normal form


def hnf(m: MatrixZ) -> LatticeBasis:
    """Column HNF basis of the lattice spanned by the columns of m.

    Deterministic extended-gcd column reduction; raises on zero input since a
    lattice basis must be nonempty.
    """
    cols = [list(m.column(j)) for j in range(m.cols)]
    cols = [c for c in cols if any(x != 0 for x in c)]
    if not cols:
        raise ValueError("zero matrix spans no lattice")
    n = m.rows
    basis = []
    row = 0
    while row < n and cols:
        active = [c for c in cols if c[row] != 0]
        rest = [c for c in cols if c[row] == 0]
        if not active:
            cols = rest
            row += 1
            continue
        # reduce all active columns into one pivot column via gcd steps
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[row]))
            a, b = active[0], active[1]
            q = b[row] // a[row]
            nb = [x - q * y for x, y in zip(b, a)]
            active = [a] + ([nb] if any(x != 0 for x in nb) else []) + active[2:]
            active = [c for c in active if c[row] != 0] + [c for c in active if c[row] == 0]
            moved = [c for c in active if c[row] == 0]
            if moved:
                rest.extend(moved)
                active = [c for c in active if c[row] != 0]
        pivot_col = active[0]
        if pivot_col[row] < 0:
            pivot_col = [-x for x in pivot_col]
        # reduce previously found basis columns above this pivot
        for b in basis:
            if b[row] != 0:
                q = b[row] // pivot_col[row]
                for k in range(n):
                    b[k] -= q * pivot_col[k]
        basis.append(pivot_col)
        cols = rest
        row += 1
    result = LatticeBasis(n, MatrixZ(n, len(basis), tuple(tuple(b[i] for b in basis) for i in range(n))))
    _check_hnf_shape(result)
    return result


def _check_hnf_shape(lb: LatticeBasis):
    piv = lb.pivots()
    if piv != sorted(piv) or len(set(piv)) != len(piv):
        raise InternalCheckError("HNF pivots not strictly increasing")
    for j, i in enumerate(piv):
        pivot = lb.basis.entries[i][j]
        if pivot <= 0:
            raise InternalCheckError("HNF pivot not positive")
        for j2 in range(lb.basis.cols):
            if j2 != j and not (0 <= lb.basis.entries[i][j2] < pivot):
                raise InternalCheckError("HNF entries not reduced in pivot row")


# ---------------------------------------------------------------------------
# reduction mod p


def p_integral_reduce(m: MatrixQ, p: int) -> MatrixFp:
    """Entrywise reduction mod p; NonIntegral if p divides any denominator."""
    out = []
    for i, row in enumerate(m.entries):
        new = []
        for j, x in enumerate(row):
            den = x.denominator
            if den % p == 0:
                raise NonIntegral(i, j, den)
            new.append((x.numerator * pow(den, p - 2, p)) % p)
        out.append(tuple(new))
    return MatrixFp(m.rows, m.cols, tuple(out), p)


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, ascending, normalized: no trailing 0)


def poly_trim(f: list) -> list:
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_add_fp(f, g, p):
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)) % p for i in range(n)]
    return poly_trim(out)


def poly_sub_fp(f, g, p):
    n = max(len(f), len(g))
    out = [((f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0)) % p for i in range(n)]
    return poly_trim(out)


def poly_mul_fp(f, g, p):
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return poly_trim(out)


def poly_divmod_fp(f, g, p):
    if not g:
        raise ZeroDivisionError("poly division by zero")
    f = list(f)
    q = [0] * max(0, len(f) - len(g) + 1)
    inv = pow(g[-1], p - 2, p)
    while len(f) >= len(g) and poly_trim(f):
        if len(f) < len(g):
            break
        c = (f[-1] * inv) % p
        d = len(f) - len(g)
        if c:
            q[d] = c
            for i, b in enumerate(g):
                f[d + i] = (f[d + i] - c * b) % p
        f.pop()
    return poly_trim(q), poly_trim(f)


def poly_monic_fp(f, p):
    if not f:
        return []
    inv = pow(f[-1], p - 2, p)
    return [(c * inv) % p for c in f]


def poly_gcd_fp(f, g, p):
    f, g = list(f), list(g)
    while g:
        _, r = poly_divmod_fp(f, g, p)
        f, g = g, r
    return poly_monic_fp(f, p)


def poly_xgcd_fp(f, g, p):
    """(d, u, v) with u*f + v*g = d, d the monic gcd."""
    r0, r1 = list(f), list(g)
    u0, u1 = [1], []
    v0, v1 = [], [1]
    while r1:
        q, r = poly_divmod_fp(r0, r1, p)
        r0, r1 = r1, r
        u0, u1 = u1, poly_sub_fp(u0, poly_mul_fp(q, u1, p), p)
        v0, v1 = v1, poly_sub_fp(v0, poly_mul_fp(q, v1, p), p)
    if not r0:
        raise ValueError("xgcd of zero polynomials")
    lead_inv = pow(r0[-1], p - 2, p)
    scale = lambda h: [(c * lead_inv) % p for c in h]
    return scale(r0), scale(u0), scale(v0)


def poly_powmod_fp(f, e, mod, p):
    result = [1]
    base = poly_divmod_fp(f, mod, p)[1]
    while e:
        if e & 1:
            result = poly_divmod_fp(poly_mul_fp(result, base, p), mod, p)[1]
        base = poly_divmod_fp(poly_mul_fp(base, base, p), mod, p)[1]
        e >>= 1
    return result


def poly_deriv_fp(f, p):
    return poly_trim([(i * c) % p for i, c in enumerate(f)][1:])


def poly_eval_fp(f, x, p):
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


# ---------------------------------------------------------------------------
# characteristic polynomial (Hessenberg method, valid over any prime field)


def char_poly_Fp(m: MatrixFp) -> list:
    """Monic characteristic polynomial of a square matrix, ascending coeffs."""
    if m.rows != m.cols:
        raise ValueError("not square")
    n = m.rows
    p = m.p
    h = [list(row) for row in m.entries]
    # similarity reduction to upper Hessenberg form with pivoting
    for c in range(n - 2):
        pr = next((i for i in range(c + 1, n) if h[i][c] % p != 0), None)
        if pr is None:
            continue
        if pr != c + 1:
            h[c + 1], h[pr] = h[pr], h[c + 1]
            for i in range(n):
                h[i][c + 1], h[i][pr] = h[i][pr], h[i][c + 1]
        inv = pow(h[c + 1][c], p - 2, p)
        for i in range(c + 2, n):
            if h[i][c] % p != 0:
                u = (h[i][c] * inv) % p
                for j in range(n):
                    h[i][j] = (h[i][j] - u * h[c + 1][j]) % p
                for j in range(n):
                    h[j][c + 1] = (h[j][c + 1] + u * h[j][i]) % p
    # recurrence for char polys of leading principal Hessenberg minors
    polys = [[1]]
    for k in range(1, n + 1):
        term = poly_mul_fp([(-h[k - 1][k - 1]) % p, 1], polys[k - 1], p)
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = (prod * h[i][i - 1]) % p
            coef = (h[i - 1][k - 1] * prod) % p
            if coef:
                term = poly_sub_fp(term, poly_mul_fp([coef], polys[i - 1], p), p)
        polys.append(term)
    out = polys[n]
    out = out + [0] * (n + 1 - len(out))
    if out[n] != 1:
        raise InternalCheckError("characteristic polynomial not monic")
    return out


def min_poly_Fp(m: MatrixFp) -> list:
    """Minimal polynomial via first linear dependence among powers."""
    if m.rows != m.cols:
        raise ValueError("not square")
    n, p = m.rows, m.p
    power = MatrixFp.identity(n, p)
    flat_powers = [[x for row in power.entries for x in row]]
    for _ in range(n):
        power = power @ m
        flat_powers.append([x for row in power.entries for x in row])
        k = len(flat_powers)
        mat = MatrixFp(n * n, k, tuple(zip(*flat_powers)), p)
        rank, kernel = rank_kernel_Fp(mat)
        if kernel.cols > 0:
            coeffs = [kernel.entries[i][0] for i in range(k)]
            return poly_monic_fp(poly_trim(coeffs), p)
    raise InternalCheckError("minimal polynomial not found")


# ---------------------------------------------------------------------------
# factorization over F_p


def _pth_root_poly(f, p):
    # f = g(x^p) with coefficients in the prime field, so g just decimates
    if any(c != 0 for i, c in enumerate(f) if i % p != 0):
        raise ValueError("not a p-th power")
    return [f[i] for i in range(0, len(f), p)]


def squarefree_decomposition_Fp(f, p):
    """List of (monic squarefree factor, multiplicity), char-p aware."""
    f = poly_monic_fp(list(f), p)
    out = []
    mult = 1
    while len(f) > 1:
        df = poly_deriv_fp(f, p)
        if not df:
            f = _pth_root_poly(f, p)
            mult *= p
            continue
        c = poly_gcd_fp(f, df, p)
        w = poly_divmod_fp(f, c, p)[0]
        i = 1
        while len(w) > 1:
            y = poly_gcd_fp(w, c, p)
            z = poly_divmod_fp(w, y, p)[0]
            if len(z) > 1:
                out.append((z, i * mult))
            w = y
            c = poly_divmod_fp(c, y, p)[0]
            i += 1
        f = c
    return out


def _distinct_degree_Fp(f, p):
    """(product-of-irreducibles-of-degree-d, d) pairs for squarefree monic f."""
    out = []
    h = [0, 1]  # x
    d = 0
    while len(f) - 1 > 2 * d:
        d += 1
        h = poly_powmod_fp(h, p, f, p)
        g = poly_gcd_fp(poly_sub_fp(h, [0, 1], p), f, p)
        if len(g) > 1:
            out.append((g, d))
            f = poly_divmod_fp(f, g, p)[0]
            h = poly_divmod_fp(h, f, p)[1]
    if len(f) > 1:
        out.append((f, len(f) - 1))
    return out


def _equal_degree_split_Fp(f, d, p, rng):
    """Cantor-Zassenhaus split of a product of degree-d irreducibles."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        a = poly_trim(a)
        if len(a) <= 0:
            continue
        if p == 2:
            # trace map over F_{2^d}
            b = list(a)
            acc = list(a)
            for _ in range(d - 1):
                acc = poly_powmod_fp(acc, 2, f, p)
                b = poly_add_fp(b, acc, p)
            g = poly_gcd_fp(b, f, p)
        else:
            g0 = poly_gcd_fp(a, f, p)
            if 1 < len(g0) < len(f):
                g = g0
            else:
                b = poly_powmod_fp(a, (p**d - 1) // 2, f, p)
                g = poly_gcd_fp(poly_sub_fp(b, [1], p), f, p)
        if 1 < len(g) < len(f):
            rest = poly_divmod_fp(f, g, p)[0]
            return _equal_degree_split_Fp(g, d, p, rng) + _equal_degree_split_Fp(rest, d, p, rng)


def factor_squarefree_Fp(f, p, rng):
    """Factor f over F_p into pairwise-coprime powers of irreducibles.

    Returns a deterministically sorted list of (monic irreducible, exponent).
    The rng only steers Cantor-Zassenhaus splitting choices; the output set
    is unique regardless of seed.
    """
    f = poly_trim(list(f))
    if len(f) <= 1:
        raise ValueError("cannot factor a constant")
    factors = {}
    for sqfree, mult in squarefree_decomposition_Fp(f, p):
        for prod, d in _distinct_degree_Fp(sqfree, p):
            for irr in _equal_degree_split_Fp(prod, d, p, rng):
                key = tuple(poly_monic_fp(irr, p))
                factors[key] = factors.get(key, 0) + mult
    out = sorted(((list(k), e) for k, e in factors.items()), key=lambda t: (len(t[0]), t[0]))
    # exact recombination check
    acc = [1]
    for irr, e in out:
        for _ in range(e):
            acc = poly_mul_fp(acc, irr, p)
    if acc != poly_monic_fp(f, p):
        raise InternalCheckError("factorization does not recombine")
    return out


def binomial(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return comb(n, k)
