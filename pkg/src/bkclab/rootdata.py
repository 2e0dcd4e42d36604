"""Root-system combinatorics, Chevalley structure constants, and the runtime
hypothesis checker.

Supported groups: GL(n) for 2 <= n <= 4 and simply-connected simple groups of
type A_r, B_r, C_r, D_r (rank <= 4) and G_2, one factor per run.

Coordinate conventions, fixed here once and used everywhere:

* GL(n) weights are integer n-tuples (the standard character lattice of the
  diagonal torus); a weight is dominant iff weakly decreasing.  Simple roots
  are alpha_i = e_i - e_{i+1}.
* For a simply-connected simple group of rank r, weights are integer
  r-tuples of fundamental-weight coordinates, so the i-th coordinate is the
  pairing with the i-th simple coroot; dominant iff all coordinates >= 0.
* ``cartan[i][j]`` is the pairing of the root alpha_j against the coroot
  alpha_i^vee.  ``d[i]`` are the symmetrizers, normalized so short roots have
  squared length 2; then d[i] * cartan[i][j] is symmetric.
* Positive roots are stored as tuples of simple-root coefficients, sorted by
  height then lexicographically.  The same order drives the extraspecial-pair
  normalization of the Chevalley constants N_{alpha,beta}.
* The Lie algebra basis is labelled ("t", i) for the Cartan part (coroots
  alpha_i^vee for simple types, the diagonal matrix units for GL(n)),
  ("e", k) and ("f", k) for the root vectors of the k-th positive root.

Half-integral rho never appears: GL(n) uses the shifted vector
(n-1, n-2, ..., 0), which differs from rho by a central vector and therefore
gives the same pairings against roots and coroots.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import CapExceeded, InternalCheckError, UnsupportedGroup
from .exactalg import (
    MatrixFp,
    MatrixQ,
    MatrixZ,
    invert_Q,
    rank_kernel_Fp,
    solve_Fp,
)

_BAD_PRIMES = {"A": (), "GL": (), "B": (2,), "C": (2,), "D": (2,), "G": (2, 3)}

_KIND_RE = re.compile(r"^(GL|A|B|C|D|G)(\d+)(sc)?$")


@dataclass(frozen=True)
class GroupSpec:
    """A group kind plus the characteristic of the base field.

    ``kind`` strings look like "GL2", "GL3", "A2", "B3", "G2"; simple types
    accept an optional "sc" suffix ("A1sc") to emphasize simply-connected.
    ``p`` is a prime, or None for characteristic zero.
    """

    kind: str
    p: Optional[int] = None

    def parsed(self):
        m = _KIND_RE.match(self.kind)
        if not m:
            raise UnsupportedGroup(f"cannot parse group kind {self.kind!r}")
        family, size, sc = m.group(1), int(m.group(2)), m.group(3)
        if family == "GL":
            if sc:
                raise UnsupportedGroup("GL(n) takes no 'sc' suffix")
            if not 2 <= size <= 4:
                raise UnsupportedGroup(f"GL({size}) outside supported range 2..4")
        elif family == "G":
            if size != 2:
                raise UnsupportedGroup("only G2 in the G family")
        elif family == "D":
            if not 3 <= size <= 4:
                raise UnsupportedGroup(f"D{size} unsupported (need rank 3..4)")
        elif family in ("A", "B", "C"):
            lo = 1 if family == "A" else 2
            if not lo <= size <= 4:
                raise UnsupportedGroup(f"{family}{size} outside supported ranks")
        return family, size


def _simple_cartan(family: str, r: int):
    """Cartan matrix and symmetrizers for one simple type."""
    cartan = [[2 if i == j else 0 for j in range(r)] for i in range(r)]
    d = [1] * r
    if family == "A":
        for i in range(r - 1):
            cartan[i][i + 1] = cartan[i + 1][i] = -1
    elif family in ("B", "C"):
        for i in range(r - 2):
            cartan[i][i + 1] = cartan[i + 1][i] = -1
        if family == "B":
            # last simple root short
            cartan[r - 2][r - 1] = -1
            cartan[r - 1][r - 2] = -2
            d = [2] * (r - 1) + [1]
        else:
            # last simple root long
            cartan[r - 2][r - 1] = -2
            cartan[r - 1][r - 2] = -1
            d = [1] * (r - 1) + [2]
    elif family == "D":
        for i in range(r - 2):
            cartan[i][i + 1] = cartan[i + 1][i] = -1
        cartan[r - 3][r - 1] = cartan[r - 1][r - 3] = -1
    elif family == "G":
        # alpha_1 short, alpha_2 long
        cartan[0][1] = -3
        cartan[1][0] = -1
        d = [1, 3]
    else:
        raise UnsupportedGroup(family)
    for i in range(r):
        for j in range(r):
            if d[i] * cartan[i][j] != d[j] * cartan[j][i]:
                raise InternalCheckError("symmetrizer table broken")
    return cartan, d


def _positive_roots(cartan, r):
    """All positive roots as coefficient tuples, by string closure."""
    simples = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]
    roots = set(simples)
    while True:
        new = set()
        for beta in roots:
            for i in range(r):
                if beta == simples[i]:
                    continue
                pairing = sum(beta[j] * cartan[i][j] for j in range(r))
                down = 0
                while tuple(
                    beta[j] - (down + 1) * simples[i][j] for j in range(r)
                ) in roots:
                    down += 1
                if down - pairing >= 1:
                    cand = tuple(beta[j] + simples[i][j] for j in range(r))
                    if cand not in roots:
                        new.add(cand)
        if not new:
            break
        roots |= new
    return sorted(roots, key=lambda c: (sum(c), c))


class RootDatum:
    """Root/Weyl combinatorics and Chevalley constants for one group factor."""

    def __init__(self, spec: GroupSpec):
        family, size = spec.parsed()
        self.family = family
        self.kind = spec.kind
        if family == "GL":
            self.n = size
            self.rank = size - 1
            self.coord_dim = size
            self.t_dim = size
            cartan_family = "A"
        else:
            self.n = None
            self.rank = size
            self.coord_dim = size
            self.t_dim = size
            cartan_family = family
        self.cartan, self.d = _simple_cartan(cartan_family, self.rank)
        self.pos_roots = _positive_roots(self.cartan, self.rank)
        self.root_index = {c: k for k, c in enumerate(self.pos_roots)}
        self._all_roots = set(self.pos_roots) | {
            tuple(-x for x in c) for c in self.pos_roots
        }
        self._form = [
            [self.d[i] * self.cartan[i][j] for j in range(self.rank)]
            for i in range(self.rank)
        ]
        self.highest_root = self.pos_roots[-1]
        self.coxeter_number = sum(self.highest_root) + 1
        if self.family != "GL":
            self._cartan_inv = invert_Q(MatrixQ.from_rows(self.cartan))
        self._build_constants()
        self._w0 = self._compute_w0()

    # -- basic lattice operations ------------------------------------------

    def height(self, coords) -> int:
        return sum(coords)

    def simple_root_weight(self, i: int) -> tuple:
        """Weight-lattice coordinates of alpha_i."""
        if self.family == "GL":
            v = [0] * self.coord_dim
            v[i] = 1
            v[i + 1] = -1
            return tuple(v)
        return tuple(self.cartan[j][i] for j in range(self.rank))

    def weight_of_root(self, coords) -> tuple:
        v = [0] * self.coord_dim
        for i, c in enumerate(coords):
            if c:
                w = self.simple_root_weight(i)
                v = [a + c * b for a, b in zip(v, w)]
        return tuple(v)

    def pairing_simple(self, weight, i: int) -> int:
        """Pairing of a weight against the i-th simple coroot."""
        if self.family == "GL":
            return weight[i] - weight[i + 1]
        return weight[i]

    def norm2_vec(self, coords) -> int:
        """Squared length of an integer combination of simple roots."""
        acc = 0
        for i, a in enumerate(coords):
            if a:
                for j, b in enumerate(coords):
                    if b:
                        acc += a * b * self._form[i][j]
        return acc

    def coroot_pairing(self, weight, coords) -> int:
        """Pairing of a weight against the coroot of the root with the given
        simple-root coefficients."""
        norm2 = self.norm2_vec(coords)
        acc = Fraction(0)
        for i, c in enumerate(coords):
            if c:
                acc += Fraction(2 * c * self.d[i], norm2) * self.pairing_simple(
                    weight, i
                )
        if acc.denominator != 1:
            raise InternalCheckError("coroot pairing not integral")
        return int(acc)

    def is_dominant(self, weight) -> bool:
        return all(self.pairing_simple(weight, i) >= 0 for i in range(self.rank))

    def reflect_simple(self, weight, i: int) -> tuple:
        c = self.pairing_simple(weight, i)
        if c == 0:
            return tuple(weight)
        alpha = self.simple_root_weight(i)
        return tuple(w - c * a for w, a in zip(weight, alpha))

    def rho_shift(self) -> tuple:
        """Integer stand-in for rho: same pairings with all (co)roots."""
        if self.family == "GL":
            return tuple(range(self.n - 1, -1, -1))
        return tuple([1] * self.rank)

    def add_weights(self, a, b) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def sub_weights(self, a, b) -> tuple:
        return tuple(x - y for x, y in zip(a, b))

    def root_coordinates(self, weight_diff):
        """Simple-root coefficients of a weight-lattice vector, or None if the
        vector is not in the root lattice."""
        if self.family == "GL":
            if sum(weight_diff) != 0:
                return None
            coords = []
            acc = 0
            for i in range(self.n - 1):
                acc += weight_diff[i]
                coords.append(acc)
            return tuple(coords)
        # in fundamental coordinates a root combination reads cartan . c
        rhs = MatrixQ.from_rows([[x] for x in weight_diff])
        sol = self._cartan_inv @ rhs
        coords = [sol.entries[i][0] for i in range(self.rank)]
        if any(c.denominator != 1 for c in coords):
            return None
        return tuple(int(c) for c in coords)

    def inner(self, v, w) -> Fraction:
        """W-invariant inner product on the weight lattice (short root = 2)."""
        if self.family == "GL":
            return Fraction(sum(a * b for a, b in zip(v, w)))
        # (v, alpha_j) = d_j <v, alpha_j^vee>; expand w rationally in roots
        rhs = MatrixQ.from_rows([[x] for x in w])
        sol = self._cartan_inv @ rhs
        acc = Fraction(0)
        for j in range(self.rank):
            acc += sol.entries[j][0] * self.d[j] * self.pairing_simple(v, j)
        return acc

    # -- Weyl group ---------------------------------------------------------

    def simple_reflection_matrix(self, i: int) -> tuple:
        n = self.coord_dim
        if self.family == "GL":
            perm = list(range(n))
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
            return tuple(
                tuple(1 if k == perm[j] else 0 for k in range(n)) for j in range(n)
            )
        alpha = self.simple_root_weight(i)
        rows = [[1 if k == j else 0 for k in range(n)] for j in range(n)]
        for j in range(n):
            rows[j][i] = (1 if i == j else 0) - alpha[j]
        return tuple(tuple(r) for r in rows)

    def act(self, matrix, weight) -> tuple:
        return tuple(
            sum(matrix[j][k] * weight[k] for k in range(self.coord_dim))
            for j in range(self.coord_dim)
        )

    def w0_matrix(self) -> tuple:
        return self._w0

    def _compute_w0(self):
        v = list(self.rho_shift())
        n = self.coord_dim
        mat = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        steps = 0
        while True:
            i = next(
                (
                    i
                    for i in range(self.rank)
                    if self.pairing_simple(tuple(v), i) > 0
                ),
                None,
            )
            if i is None:
                break
            s = self.simple_reflection_matrix(i)
            mat = tuple(
                tuple(
                    sum(s[a][k] * mat[k][b] for k in range(n)) for b in range(n)
                )
                for a in range(n)
            )
            v = list(self.act(s, tuple(v)))
            steps += 1
        if steps != len(self.pos_roots):
            raise InternalCheckError("w0 length != number of positive roots")
        return mat

    # -- Chevalley structure constants ---------------------------------------

    def _string_down(self, beta, alpha) -> int:
        """Largest k with beta - k*alpha still a root."""
        k = 0
        while True:
            cand = tuple(b - (k + 1) * a for b, a in zip(beta, alpha))
            if cand in self._all_roots:
                k += 1
            else:
                return k

    def _build_constants(self):
        n_pos = {}
        extraspecial = {}
        self._n_pos = n_pos  # filled in height order; _n_any reads it
        for g_idx, gamma in enumerate(self.pos_roots):
            if sum(gamma) == 1:
                continue
            pairs = []
            for a_idx in range(len(self.pos_roots)):
                alpha = self.pos_roots[a_idx]
                rest = tuple(g - a for g, a in zip(gamma, alpha))
                if rest in self.root_index:
                    b_idx = self.root_index[rest]
                    if a_idx < b_idx:
                        pairs.append((a_idx, b_idx))
            if not pairs:
                raise InternalCheckError("positive root with no decomposition")
            xi, eta = pairs[0]
            n_val = (
                self._string_down(self.pos_roots[eta], self.pos_roots[xi]) + 1
            )
            n_pos[(xi, eta)] = n_val
            n_pos[(eta, xi)] = -n_val
            extraspecial[g_idx] = (xi, eta)
            for a_idx, b_idx in pairs[1:]:
                val = self._special_from_identity(
                    g_idx, xi, eta, a_idx, b_idx, n_pos
                )
                expect = (
                    self._string_down(self.pos_roots[b_idx], self.pos_roots[a_idx])
                    + 1
                )
                if abs(val) != expect:
                    raise InternalCheckError(
                        f"structure constant magnitude {val} != {expect}"
                    )
                n_pos[(a_idx, b_idx)] = val
                n_pos[(b_idx, a_idx)] = -val
        self._extraspecial = extraspecial

    def _special_from_identity(self, g_idx, xi, eta, a_idx, b_idx, n_pos):
        gamma = self.pos_roots[g_idx]
        xi_c = self.pos_roots[xi]
        eta_c = self.pos_roots[eta]
        alpha = self.pos_roots[a_idx]
        beta = self.pos_roots[b_idx]
        neg = lambda c: tuple(-x for x in c)
        total = Fraction(0)
        u = tuple(e - a for e, a in zip(eta_c, alpha))  # eta - alpha
        if u in self._all_roots:
            total += Fraction(
                self._n_any(eta_c, neg(alpha)) * self._n_any(xi_c, neg(beta)),
                self.norm2_vec(u),
            )
        v = tuple(x - a for x, a in zip(xi_c, alpha))  # xi - alpha
        if v in self._all_roots:
            total += Fraction(
                self._n_any(neg(alpha), xi_c) * self._n_any(eta_c, neg(beta)),
                self.norm2_vec(v),
            )
        val = Fraction(self.norm2_vec(gamma), n_pos[(xi, eta)]) * total
        if val.denominator != 1:
            raise InternalCheckError("non-integral structure constant")
        return int(val)

    def _n_any(self, x, y) -> int:
        """N_{x,y} for arbitrary-sign roots x, y; 0 if x+y is not a root."""
        s = tuple(a + b for a, b in zip(x, y))
        if s not in self._all_roots:
            return 0
        xp = x in self.root_index
        yp = y in self.root_index
        neg = lambda c: tuple(-v for v in c)
        if xp and yp:
            return self._n_pos[(self.root_index[x], self.root_index[y])]
        if not xp and not yp:
            return -self._n_any(neg(x), neg(y))
        if not xp and yp:
            return -self._n_any(y, x)
        # x positive, y negative
        if s in self.root_index:
            val = Fraction(-self.norm2_vec(s), self.norm2_vec(x)) * self._n_any(
                neg(y), s
            )
        else:
            val = Fraction(self.norm2_vec(s), self.norm2_vec(y)) * self._n_any(
                neg(s), x
            )
        if val.denominator != 1:
            raise InternalCheckError("non-integral mixed structure constant")
        return int(val)

    def n_constant(self, x, y) -> int:
        """Public accessor for N_{x,y} on arbitrary-sign root coordinates."""
        return self._n_any(tuple(x), tuple(y))

    def extraspecial_pair(self, k: int):
        """(xi_idx, eta_idx) with alpha_xi + alpha_eta = the k-th positive
        root; xi is always simple."""
        return self._extraspecial[k]

    # -- Lie algebra on labels ------------------------------------------------

    def g_basis(self):
        labels = [("t", i) for i in range(self.t_dim)]
        labels += [("e", k) for k in range(len(self.pos_roots))]
        labels += [("f", k) for k in range(len(self.pos_roots))]
        return labels

    def b_basis(self):
        return [("t", i) for i in range(self.t_dim)] + [
            ("e", k) for k in range(len(self.pos_roots))
        ]

    def dim_g(self) -> int:
        return self.t_dim + 2 * len(self.pos_roots)

    def root_value_on_t(self, coords, i: int) -> int:
        """alpha(t_i) for the root with given simple-root coefficients."""
        if self.family == "GL":
            return self.weight_of_root(coords)[i]
        return sum(coords[j] * self.cartan[i][j] for j in range(self.rank))

    def coroot_t_coords(self, coords) -> tuple:
        """The coroot of the given positive root, in t-basis coordinates."""
        if self.family == "GL":
            w = self.weight_of_root(coords)
            return tuple(w)  # e_i - e_j indicator vector
        norm2 = self.norm2_vec(coords)
        out = []
        for i in range(self.rank):
            val = Fraction(2 * coords[i] * self.d[i], norm2)
            if val.denominator != 1:
                raise InternalCheckError("coroot coefficients not integral")
            out.append(int(val))
        return tuple(out)

    def bracket(self, a, b) -> dict:
        """Lie bracket of two basis labels, as a label -> coefficient dict."""
        kind_a, ia = a
        kind_b, ib = b
        if kind_a == "t" and kind_b == "t":
            return {}
        if kind_a == "t":
            sign = 1 if kind_b == "e" else -1
            coords = self.pos_roots[ib]
            c = sign * self.root_value_on_t(coords, ia)
            return {b: c} if c else {}
        if kind_b == "t":
            return {k: -v for k, v in self.bracket(b, a).items()}
        ca = self.pos_roots[ia] if kind_a == "e" else tuple(
            -x for x in self.pos_roots[ia]
        )
        cb = self.pos_roots[ib] if kind_b == "e" else tuple(
            -x for x in self.pos_roots[ib]
        )
        s = tuple(x + y for x, y in zip(ca, cb))
        if all(x == 0 for x in s):
            # [e_k, f_k] = coroot
            sign = 1 if kind_a == "e" else -1
            h = self.coroot_t_coords(self.pos_roots[ia])
            return {("t", i): sign * c for i, c in enumerate(h) if c}
        if s not in self._all_roots:
            return {}
        n = self._n_any(ca, cb)
        if n == 0:
            return {}
        if s in self.root_index:
            return {("e", self.root_index[s]): n}
        negs = tuple(-x for x in s)
        return {("f", self.root_index[negs]): n}

    def ad_matrix(self, label) -> MatrixQ:
        """Matrix of ad(x_label) on the full Lie algebra basis."""
        basis = self.g_basis()
        index = {lab: i for i, lab in enumerate(basis)}
        cols = []
        for lab in basis:
            br = self.bracket(label, lab)
            col = [0] * len(basis)
            for tgt, c in br.items():
                col[index[tgt]] = c
            cols.append(col)
        return MatrixQ.from_rows(
            [[cols[j][i] for j in range(len(basis))] for i in range(len(basis))]
        )

    def simple_pos_index(self, i: int) -> int:
        """Positive-root index of the i-th simple root (the two orderings
        differ: positive roots sort by height then lex)."""
        return self.root_index[tuple(1 if j == i else 0 for j in range(self.rank))]

    def ad_e_on_b(self, i: int) -> MatrixQ:
        """Matrix of ad(e) for the i-th simple root, on the Borel basis."""
        basis = self.b_basis()
        index = {lab: k for k, lab in enumerate(basis)}
        cols = []
        for lab in basis:
            br = self.bracket(("e", self.simple_pos_index(i)), lab)
            col = [0] * len(basis)
            for tgt, c in br.items():
                if tgt not in index:
                    raise InternalCheckError("ad(e_i) does not preserve b")
                col[index[tgt]] = c
            cols.append(col)
        return MatrixQ.from_rows(
            [[cols[j][k] for j in range(len(basis))] for k in range(len(basis))]
        )


def build_root_datum(spec: GroupSpec) -> RootDatum:
    """Construct and sanity-check the root datum for one group factor."""
    datum = RootDatum(spec)
    expected = {
        "A": datum.rank * (datum.rank + 1) // 2,
        "GL": (datum.coord_dim) * (datum.coord_dim - 1) // 2,
        "B": datum.rank * datum.rank,
        "C": datum.rank * datum.rank,
        "D": datum.rank * (datum.rank - 1),
        "G": 6,
    }[datum.family]
    if len(datum.pos_roots) != expected:
        raise InternalCheckError("positive root count mismatch")
    return datum


def weyl_elements(datum: RootDatum, cap: int = 10_000):
    """Complete Weyl group as (lattice automorphism matrix, sign) pairs."""
    n = datum.coord_dim
    identity = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    gens = [datum.simple_reflection_matrix(i) for i in range(datum.rank)]
    seen = {identity: 1}
    frontier = [identity]
    while frontier:
        nxt = []
        for mat in frontier:
            for g in gens:
                prod = tuple(
                    tuple(sum(g[a][k] * mat[k][b] for k in range(n)) for b in range(n))
                    for a in range(n)
                )
                if prod not in seen:
                    seen[prod] = -seen[mat]
                    nxt.append(prod)
                    if len(seen) > cap:
                        raise CapExceeded(f"Weyl group larger than cap {cap}")
        frontier = nxt
    return sorted(seen.items())


def dim_gr(datum: RootDatum, mu) -> int:
    """Pairing of a dominant weight with the sum of all positive coroots."""
    if not datum.is_dominant(mu):
        raise ValueError(f"{mu} is not dominant")
    return sum(datum.coroot_pairing(mu, beta) for beta in datum.pos_roots)


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the runtime validity checks for one (group, p)."""

    group: str
    p: int
    p_good: bool
    form_nondegenerate: bool
    t_adapted_exists: bool
    p_at_least_coxeter: bool
    h_coords: Optional[tuple]
    coxeter_number: int

    @property
    def verdict(self) -> bool:
        return (
            self.p_good
            and self.form_nondegenerate
            and self.t_adapted_exists
            and self.p_at_least_coxeter
        )

    def flags(self) -> dict:
        return {
            "p_good": self.p_good,
            "form_nondegenerate": self.form_nondegenerate,
            "t_adapted_exists": self.t_adapted_exists,
            "p_at_least_coxeter": self.p_at_least_coxeter,
        }


def _defining_weight(datum: RootDatum) -> tuple:
    if datum.family == "GL":
        return tuple([1] + [0] * (datum.n - 1))
    return tuple([1] + [0] * (datum.rank - 1))


def root_vector_matrices(datum: RootDatum, e_simple, f_simple):
    """Matrices for all root vectors, from matrices of the simple ones.

    Non-simple root vectors come from the extraspecial normalization:
    x_gamma = [x_xi, x_eta] / N_{xi,eta} with xi simple, and the mirror image
    with the opposite sign on the negative side.  Returns two dicts indexed by
    positive-root index.
    """
    e_mats = {}
    f_mats = {}
    for k, coords in enumerate(datum.pos_roots):
        if sum(coords) == 1:
            e_mats[k] = e_simple[coords.index(1)]
            f_mats[k] = f_simple[coords.index(1)]
            continue
        xi, eta = datum.extraspecial_pair(k)
        n = datum._n_pos[(xi, eta)]
        comm = e_mats[xi] @ e_mats[eta] - e_mats[eta] @ e_mats[xi]
        e_mats[k] = comm.scale(Fraction(1, n))
        comm_f = f_mats[xi] @ f_mats[eta] - f_mats[eta] @ f_mats[xi]
        f_mats[k] = comm_f.scale(Fraction(1, -n))
    return e_mats, f_mats


def check_hypotheses(spec: GroupSpec) -> HypothesisReport:
    """Evaluate the validity flags for a (group, p) pair.

    The combined verdict is the artifact's own validity condition (classical
    good prime, nondegenerate defining-representation trace form mod p,
    existence of h with alpha_i(h) = 1, and p at least the Coxeter number);
    it is deliberately labelled as such rather than as a sharp theoretical
    bound.
    """
    datum = build_root_datum(spec)
    p = spec.p
    if p is None or p < 2:
        raise ValueError("check_hypotheses needs a finite prime")
    p_good = p not in _BAD_PRIMES[datum.family]

    # trace form of the defining representation on the Chevalley basis
    from .repbuild import build_irreducible_Q

    module = build_irreducible_Q(datum, _defining_weight(datum))
    e_simple = {i: module.full_matrix("e", i) for i in range(datum.rank)}
    f_simple = {i: module.full_matrix("f", i) for i in range(datum.rank)}
    e_mats, f_mats = root_vector_matrices(datum, e_simple, f_simple)
    t_mats = {}
    for i in range(datum.t_dim):
        diag = []
        for w in module.basis_weights:
            diag.append(w[i] if datum.family == "GL" else datum.pairing_simple(w, i))
        t_mats[i] = MatrixQ.from_rows(
            [
                [diag[a] if a == b else 0 for b in range(module.dimension)]
                for a in range(module.dimension)
            ]
        )
    reps = [t_mats[i] for i in range(datum.t_dim)]
    reps += [e_mats[k] for k in range(len(datum.pos_roots))]
    reps += [f_mats[k] for k in range(len(datum.pos_roots))]
    dim_g = datum.dim_g()
    gram_rows = []
    for a in range(dim_g):
        row = []
        for b in range(dim_g):
            prod = reps[a] @ reps[b]
            tr = sum(prod.entries[i][i] for i in range(prod.rows))
            if tr.denominator != 1:
                raise InternalCheckError("trace form not integral")
            row.append(int(tr))
        gram_rows.append(row)
    gram = MatrixZ.from_rows(gram_rows).to_fp(p)
    rank, _ = rank_kernel_Fp(gram)
    form_nondegenerate = rank == dim_g

    # solve alpha_i(h) = 1 over F_p in t coordinates
    rows = []
    for i in range(datum.rank):
        alpha = tuple(1 if j == i else 0 for j in range(datum.rank))
        rows.append(
            [datum.root_value_on_t(alpha, t) % p for t in range(datum.t_dim)]
        )
    sys_mat = MatrixFp.from_rows(rows, p)
    rhs = MatrixFp.from_rows([[1]] * datum.rank, p)
    sol = solve_Fp(sys_mat, rhs)
    t_adapted = sol is not None
    h_coords = tuple(sol.entries[i][0] for i in range(datum.t_dim)) if sol else None

    return HypothesisReport(
        group=spec.kind,
        p=p,
        p_good=p_good,
        form_nondegenerate=form_nondegenerate,
        t_adapted_exists=t_adapted,
        p_at_least_coxeter=p >= datum.coxeter_number,
        h_coords=h_coords,
        coxeter_number=datum.coxeter_number,
    )
