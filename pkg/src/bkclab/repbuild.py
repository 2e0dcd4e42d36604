"""Construction of highest-weight modules and their modular reductions.

The characteristic-zero module V(lambda) is built weight by weight from the
contravariant (Shapovalov) form: lowering monomials f_{i_1}...f_{i_k}.v are
generated breadth-first in height, their Gram matrix is computed through the
recursions

    <f_i u, f_j u'> = <u, f_j (e_i u')> + delta_{ij} <wt(u'), alpha_i^vee> <u, u'>
    e_j (f_i u)     = f_i (e_j u) + delta_{ij} <wt(u), alpha_j^vee> u

and a basis of each weight space is any candidate subset realizing the full
Gram rank, which must equal the Freudenthal multiplicity.  Action matrices
are solved through the (nondegenerate) Gram pairing.

The minimal admissible lattice is the span of all divided-power words
f_{i_1}^{(a_1)}...f_{i_k}^{(a_k)}.v, accumulated per weight in one pass down
the height order and certified stable by a second pass; all divided powers
e_i^{(m)}, f_i^{(m)} are then re-expressed in lattice coordinates and must be
integral.  Reduction mod p of that data gives the Weyl module with its full
divided-power action.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lcm

from .errors import CapExceeded, InternalCheckError
from .exactalg import (
    MatrixFp,
    MatrixQ,
    MatrixZ,
    hnf,
    invert_Q,
    rank_kernel_Q,
)
from .rootdata import RootDatum


# ---------------------------------------------------------------------------
# independent oracles


def dominant_conjugate(datum: RootDatum, weight):
    w = tuple(weight)
    while True:
        i = next(
            (i for i in range(datum.rank) if datum.pairing_simple(w, i) < 0), None
        )
        if i is None:
            return w
        w = datum.reflect_simple(w, i)


def _in_support(datum: RootDatum, lam, mu) -> bool:
    """Whether mu can carry a nonzero weight space of V(lam)."""
    coords = datum.root_coordinates(datum.sub_weights(lam, dominant_conjugate(datum, mu)))
    return coords is not None and all(c >= 0 for c in coords)


def freudenthal_multiplicity(datum: RootDatum, lam, mu) -> int:
    """Weight multiplicity of mu in V(lam) by Freudenthal's recursion."""
    if not datum.is_dominant(lam):
        raise ValueError("highest weight must be dominant")
    lam = tuple(lam)
    rho = datum.rho_shift()
    lam_rho = datum.add_weights(lam, rho)
    lam_norm = datum.inner(lam_rho, lam_rho)
    memo = {}

    def mult(nu) -> int:
        nu = dominant_conjugate(datum, nu)
        if nu == lam:
            return 1
        if nu in memo:
            return memo[nu]
        if not _in_support(datum, lam, nu):
            memo[nu] = 0
            return 0
        memo[nu] = 0  # guards the recursion; overwritten below
        total = Fraction(0)
        for beta in datum.pos_roots:
            bw = datum.weight_of_root(beta)
            k = 1
            while True:
                shifted = tuple(n + k * b for n, b in zip(nu, bw))
                if not _in_support(datum, lam, shifted):
                    break
                m = mult(shifted)
                if m:
                    total += m * datum.inner(shifted, bw)
                k += 1
        nu_rho = datum.add_weights(nu, rho)
        denom = lam_norm - datum.inner(nu_rho, nu_rho)
        if denom <= 0:
            raise InternalCheckError("Freudenthal denominator not positive")
        value = 2 * total / denom
        if value.denominator != 1:
            raise InternalCheckError("Freudenthal value not integral")
        memo[nu] = int(value)
        return memo[nu]

    if not _in_support(datum, lam, mu):
        return 0
    return mult(tuple(mu))


def weyl_dimension(datum: RootDatum, lam) -> int:
    """Dimension of V(lam) by the Weyl dimension formula."""
    if not datum.is_dominant(lam):
        raise ValueError("highest weight must be dominant")
    rho = datum.rho_shift()
    lam_rho = datum.add_weights(tuple(lam), rho)
    value = Fraction(1)
    for beta in datum.pos_roots:
        bw = datum.weight_of_root(beta)
        value *= Fraction(datum.inner(lam_rho, bw), datum.inner(rho, bw))
    if value.denominator != 1:
        raise InternalCheckError("Weyl dimension not integral")
    return int(value)


# ---------------------------------------------------------------------------
# characteristic-zero construction


@dataclass
class HighestWeightModuleQ:
    """V(lambda) over Q with per-weight bases of lowering monomials."""

    datum: RootDatum
    lam: tuple
    weights: list  # deterministic order: height, then lex
    basis_words: dict  # weight -> list of words (tuples of simple indices)
    gram: dict  # weight -> MatrixQ
    e_blocks: dict  # (i, weight) -> MatrixQ into basis(weight + alpha_i)
    f_blocks: dict  # (i, weight) -> MatrixQ into basis(weight - alpha_i)
    dimension: int

    def weight_multiplicity(self, mu) -> int:
        return len(self.basis_words.get(tuple(mu), ()))

    @property
    def basis_weights(self) -> list:
        out = []
        for w in self.weights:
            out.extend([w] * len(self.basis_words[w]))
        return out

    def offsets(self) -> dict:
        off = {}
        acc = 0
        for w in self.weights:
            off[w] = acc
            acc += len(self.basis_words[w])
        return off

    def full_matrix(self, kind: str, i: int) -> MatrixQ:
        """Whole-module matrix of a simple generator e_i or f_i."""
        off = self.offsets()
        n = self.dimension
        rows = [[Fraction(0)] * n for _ in range(n)]
        blocks = self.e_blocks if kind == "e" else self.f_blocks
        alpha = self.datum.simple_root_weight(i)
        sign = 1 if kind == "e" else -1
        for w in self.weights:
            blk = blocks.get((i, w))
            if blk is None:
                continue
            target = tuple(a + sign * b for a, b in zip(w, alpha))
            r0, c0 = off[target], off[w]
            for r in range(blk.rows):
                for c in range(blk.cols):
                    rows[r0 + r][c0 + c] = blk.entries[r][c]
        return MatrixQ.from_rows(rows)


def build_irreducible_Q(datum: RootDatum, lam, dim_cap: int = 5000) -> HighestWeightModuleQ:
    """Construct V(lam) over Q; see the module docstring for the procedure."""
    lam = tuple(lam)
    if not datum.is_dominant(lam):
        raise ValueError(f"{lam} is not dominant")
    basis_words = {lam: [()]}
    gram = {lam: MatrixQ.from_rows([[1]])}
    e_blocks = {}
    f_blocks = {}
    level = [lam]
    weights = [lam]
    dimension = 1
    alpha = [datum.simple_root_weight(i) for i in range(datum.rank)]

    def pair(w, i):
        return datum.pairing_simple(w, i)

    while level:
        # candidate target weights one level further from lam
        targets = sorted(
            {
                tuple(w - a for w, a in zip(mu, alpha[i]))
                for mu in level
                for i in range(datum.rank)
            }
        )
        next_level = []
        for nu in targets:
            cands = []  # (i, parent_index)
            for i in range(datum.rank):
                parent = tuple(n + a for n, a in zip(nu, alpha[i]))
                for idx in range(len(basis_words.get(parent, ()))):
                    cands.append((i, idx))
            if not cands:
                continue

            def e_of_parent_basis(j, weight):
                # e_j on the chosen basis of `weight`, as a block (or None)
                return e_blocks.get((j, weight))

            # e_j applied to each candidate, in basis(nu + alpha_j) coords
            def e_on_candidate(j, cand):
                i, idx = cand
                parent = tuple(n + a for n, a in zip(nu, alpha[i]))
                up = e_of_parent_basis(j, parent)  # parent -> parent+alpha_j
                target_w = tuple(n + a for n, a in zip(nu, alpha[j]))
                size = len(basis_words.get(target_w, ()))
                vec = [Fraction(0)] * size
                if up is not None:
                    col = up.column(idx)
                    # then f_i back down: (parent+alpha_j) -> parent+alpha_j-alpha_i
                    down = f_blocks.get((i, tuple(p + a for p, a in zip(parent, alpha[j]))))
                    if down is not None:
                        for r in range(down.rows):
                            vec[r] += sum(
                                down.entries[r][c] * col[c] for c in range(down.cols)
                            )
                if i == j:
                    vec[idx] += pair(parent, j)
                return vec

            # Gram matrix of candidates via <f_i u, c'> = <u, e_i c'>
            size = len(cands)
            gm = [[Fraction(0)] * size for _ in range(size)]
            e_cache = {}
            for b, cand_b in enumerate(cands):
                for a, cand_a in enumerate(cands):
                    i, idx = cand_a
                    parent = tuple(n + x for n, x in zip(nu, alpha[i]))
                    key = (i, b)
                    if key not in e_cache:
                        e_cache[key] = e_on_candidate(i, cands[b])
                    vec = e_cache[key]
                    g_parent = gram[parent]
                    gm[a][b] = sum(
                        g_parent.entries[idx][c] * vec[c] for c in range(len(vec))
                    )
            gram_cand = MatrixQ.from_rows(gm) if size else MatrixQ.zero(0, 0)

            # choose pivot candidates realizing the full rank
            rank, _ = rank_kernel_Q(gram_cand)
            expected = freudenthal_multiplicity(datum, lam, nu)
            if rank != expected:
                raise InternalCheckError(
                    f"Gram rank {rank} != Freudenthal {expected} at {nu}"
                )
            if rank == 0:
                continue
            chosen = _pivot_columns(gram_cand, rank)
            basis_words[nu] = [
                (cands[c][0],) + basis_words[
                    tuple(n + a for n, a in zip(nu, alpha[cands[c][0]]))
                ][cands[c][1]]
                for c in chosen
            ]
            gram[nu] = MatrixQ.from_rows(
                [[gm[a][b] for b in chosen] for a in chosen]
            )
            dimension += rank
            if dimension > dim_cap:
                raise CapExceeded(f"module dimension exceeds cap {dim_cap}")

            # f blocks into nu: coordinates of every candidate in the basis
            gram_basis_inv = invert_Q(gram[nu])
            coords_of_cand = {}
            for c_idx in range(size):
                rhs = MatrixQ.from_rows([[gm[a][c_idx]] for a in chosen])
                coords_of_cand[c_idx] = gram_basis_inv @ rhs
            for i in range(datum.rank):
                parent = tuple(n + a for n, a in zip(nu, alpha[i]))
                psize = len(basis_words.get(parent, ()))
                if psize == 0:
                    continue
                cols = []
                for idx in range(psize):
                    c_idx = cands.index((i, idx))
                    cols.append(coords_of_cand[c_idx])
                f_blocks[(i, parent)] = MatrixQ.from_rows(
                    [[cols[c].entries[r][0] for c in range(psize)] for r in range(rank)]
                )

            # e blocks out of nu
            for j in range(datum.rank):
                up_w = tuple(n + a for n, a in zip(nu, alpha[j]))
                usize = len(basis_words.get(up_w, ()))
                if usize == 0:
                    continue
                cols = []
                for c in chosen:
                    key = (j, c)
                    if key not in e_cache:
                        e_cache[key] = e_on_candidate(j, cands[c])
                    cols.append(e_cache[key])
                e_blocks[(j, nu)] = MatrixQ.from_rows(
                    [[cols[c][r] for c in range(rank)] for r in range(usize)]
                )
            next_level.append(nu)
        weights.extend(next_level)
        level = next_level

    module = HighestWeightModuleQ(
        datum=datum,
        lam=lam,
        weights=weights,
        basis_words=basis_words,
        gram=gram,
        e_blocks=e_blocks,
        f_blocks=f_blocks,
        dimension=dimension,
    )
    if dimension != weyl_dimension(datum, lam):
        raise InternalCheckError("dimension disagrees with the Weyl formula")
    _verify_sl2_relations(module)
    return module


def _pivot_columns(m: MatrixQ, rank: int) -> list:
    """Column indices whose Gram columns step up the rank, greedily."""
    work = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    chosen = []
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
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        chosen.append(c)
        r += 1
        if r == rank:
            break
    if len(chosen) != rank:
        raise InternalCheckError("pivot search failed")
    return chosen


def _verify_sl2_relations(module: HighestWeightModuleQ):
    """[e_i, f_i] = h_i and weight homogeneity, asserted exactly."""
    datum = module.datum
    for i in range(datum.rank):
        e = module.full_matrix("e", i)
        f = module.full_matrix("f", i)
        comm = e @ f - f @ e
        diag = [datum.pairing_simple(w, i) for w in module.basis_weights]
        n = module.dimension
        expected = MatrixQ.from_rows(
            [[diag[a] if a == b else 0 for b in range(n)] for a in range(n)]
        )
        if not (comm - expected).is_zero():
            raise InternalCheckError(f"[e_{i}, f_{i}] != h_{i}")


# ---------------------------------------------------------------------------
# minimal admissible lattice


@dataclass
class AdmissibleLattice:
    """Minimal divided-power-stable integer form of a HighestWeightModuleQ.

    Per weight: a column-HNF LatticeBasis together with a denominator, so the
    actual lattice in monomial coordinates is (1/denominator) * columns.
    ``ops`` holds every divided power e_i^{(m)}, f_i^{(m)} as an integral
    block in lattice coordinates.
    """

    module: HighestWeightModuleQ
    bases: dict  # weight -> (denominator, LatticeBasis)
    ops: dict  # (kind, i, m) -> dict weight -> MatrixZ
    max_power: dict  # (kind, i) -> int

    @property
    def datum(self) -> RootDatum:
        return self.module.datum

    def coordinate_matrix(self, weight) -> MatrixQ:
        den, basis = self.bases[weight]
        return basis.basis.to_q().scale(Fraction(1, den))


def _path_matrix(module: HighestWeightModuleQ, kind: str, i: int, weight, a: int):
    """Rational matrix of (x_i)^a / a! from `weight`, or None if the path
    leaves the weight support."""
    datum = module.datum
    alpha = datum.simple_root_weight(i)
    sign = 1 if kind == "e" else -1
    blocks = module.e_blocks if kind == "e" else module.f_blocks
    current = tuple(weight)
    size = len(module.basis_words.get(current, ()))
    mat = MatrixQ.identity(size)
    for _ in range(a):
        blk = blocks.get((i, current))
        if blk is None:
            return None
        mat = blk @ mat
        current = tuple(w + sign * x for w, x in zip(current, alpha))
    return mat.scale(Fraction(1, factorial(a)))


def minimal_lattice(module: HighestWeightModuleQ) -> AdmissibleLattice:
    """Span of all divided-power lowering words applied to the highest
    weight vector, with stabilization asserted by a second pass."""
    datum = module.datum

    def merged(current, vectors):
        den, cols = current
        dens = [den]
        for v in vectors:
            dens.extend(x.denominator for x in v)
        new_den = lcm(*dens) if dens else 1
        scaled = []
        for col in cols:
            scaled.append([x * (new_den // den) for x in col])
        for v in vectors:
            scaled.append([int(x * new_den) for x in v])
        keep = [c for c in scaled if any(x != 0 for x in c)]
        if not keep:
            return (1, [])
        mat = MatrixZ.from_rows(
            [[c[r] for c in keep] for r in range(len(keep[0]))]
        )
        basis = hnf(mat)
        cols_out = [list(basis.basis.column(j)) for j in range(basis.rank)]
        g = 0
        for c in cols_out:
            for x in c:
                g = gcd_int(g, x)
        g = gcd_int(g, new_den)
        if g > 1:
            cols_out = [[x // g for x in c] for c in cols_out]
            new_den //= g
        return (new_den, cols_out)

    def one_pass(lattices):
        changed = False
        for mu in module.weights:
            den, cols = lattices[mu]
            if not cols:
                continue
            vectors = [[Fraction(x, den) for x in col] for col in cols]
            for i in range(datum.rank):
                a = 1
                while True:
                    op = _path_matrix(module, "f", i, mu, a)
                    if op is None:
                        break
                    target = tuple(
                        m - a * x
                        for m, x in zip(mu, datum.simple_root_weight(i))
                    )
                    images = []
                    for v in vectors:
                        col = [
                            sum(op.entries[r][c] * v[c] for c in range(len(v)))
                            for r in range(op.rows)
                        ]
                        if any(x != 0 for x in col):
                            images.append(col)
                    if images:
                        before = lattices[target]
                        after = merged(before, images)
                        if after != before:
                            lattices[target] = after
                            changed = True
                    a += 1
        return changed

    lattices = {w: (1, []) for w in module.weights}
    lattices[module.lam] = (1, [[1]])
    one_pass(lattices)
    if one_pass(lattices):
        raise InternalCheckError("lattice generation did not stabilize")

    bases = {}
    for w in module.weights:
        den, cols = lattices[w]
        if len(cols) != len(module.basis_words[w]):
            raise InternalCheckError(f"lattice rank deficient at {w}")
        mat = MatrixZ.from_rows([[c[r] for c in cols] for r in range(len(cols[0]))])
        bases[w] = (den, hnf(mat))

    lattice = AdmissibleLattice(module=module, bases=bases, ops={}, max_power={})
    _fill_divided_powers(lattice)
    return lattice


def gcd_int(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def _fill_divided_powers(lattice: AdmissibleLattice):
    module = lattice.module
    datum = module.datum
    coord = {w: lattice.coordinate_matrix(w) for w in module.weights}
    coord_inv = {w: invert_Q(coord[w]) for w in module.weights}
    weight_set = set(module.weights)
    for kind in ("e", "f"):
        sign = 1 if kind == "e" else -1
        for i in range(datum.rank):
            alpha = datum.simple_root_weight(i)
            max_m = 0
            m = 1
            while True:
                found = False
                blocks = {}
                for mu in module.weights:
                    target = tuple(w + sign * m * a for w, a in zip(mu, alpha))
                    if target not in weight_set:
                        continue
                    op = _path_matrix(module, kind, i, mu, m)
                    if op is None:
                        continue
                    found = True
                    in_lattice = coord_inv[target] @ op @ coord[mu]
                    if not in_lattice.is_integral():
                        raise InternalCheckError(
                            f"divided power {kind}_{i}^({m}) not integral"
                        )
                    blocks[mu] = in_lattice.to_z()
                if not found:
                    break
                lattice.ops[(kind, i, m)] = blocks
                max_m = m
                m += 1
            lattice.max_power[(kind, i)] = max_m


# ---------------------------------------------------------------------------
# modular modules


@dataclass
class ModularModule:
    """A module over F_p with its full divided-power (hyperalgebra) action."""

    datum: RootDatum
    p: int
    dimension: int
    basis_weights: list  # weight tuple per basis index
    gens: dict  # (kind, i, m) -> MatrixFp, m >= 1
    provenance: tuple  # (tag, payload)
    highest_weight: tuple

    def weights(self) -> list:
        seen = []
        for w in self.basis_weights:
            if w not in seen:
                seen.append(w)
        return seen

    def weight_indices(self, mu) -> list:
        mu = tuple(mu)
        return [i for i, w in enumerate(self.basis_weights) if w == mu]

    def character(self) -> dict:
        out = {}
        for w in self.basis_weights:
            out[w] = out.get(w, 0) + 1
        return out

    def max_power(self, kind: str, i: int) -> int:
        powers = [m for (k, j, m) in self.gens if k == kind and j == i]
        return max(powers, default=0)

    def gen(self, kind: str, i: int, m: int) -> MatrixFp:
        if m == 0:
            return MatrixFp.identity(self.dimension, self.p)
        mat = self.gens.get((kind, i, m))
        if mat is None:
            return MatrixFp.zero(self.dimension, self.dimension, self.p)
        return mat

    def verify_weight_homogeneity(self):
        """Each e_i^{(m)} / f_i^{(m)} must shift weight by exactly m*alpha_i."""
        datum = self.datum
        for (kind, i, m), mat in self.gens.items():
            alpha = datum.simple_root_weight(i)
            sign = 1 if kind == "e" else -1
            for r in range(self.dimension):
                for c in range(self.dimension):
                    if mat.entries[r][c] != 0:
                        expected = tuple(
                            w + sign * m * a
                            for w, a in zip(self.basis_weights[c], alpha)
                        )
                        if self.basis_weights[r] != expected:
                            raise InternalCheckError(
                                f"{kind}_{i}^({m}) breaks the weight grading"
                            )


def reduce_mod_p(lattice: AdmissibleLattice, p: int) -> ModularModule:
    """Reduce an admissible lattice mod p, keeping all divided powers."""
    module = lattice.module
    datum = module.datum
    off = module.offsets()
    dim = module.dimension
    gens = {}
    weight_set = set(module.weights)
    for (kind, i, m), blocks in lattice.ops.items():
        sign = 1 if kind == "e" else -1
        alpha = datum.simple_root_weight(i)
        rows = [[0] * dim for _ in range(dim)]
        nonzero = False
        for mu, blk in blocks.items():
            target = tuple(w + sign * m * a for w, a in zip(mu, alpha))
            if target not in weight_set:
                continue
            r0, c0 = off[target], off[mu]
            for r in range(blk.rows):
                for c in range(blk.cols):
                    v = blk.entries[r][c] % p
                    if v:
                        rows[r0 + r][c0 + c] = v
                        nonzero = True
        if nonzero:
            gens[(kind, i, m)] = MatrixFp.from_rows(rows, p)
    mod = ModularModule(
        datum=datum,
        p=p,
        dimension=dim,
        basis_weights=list(module.basis_weights),
        gens=gens,
        provenance=("weyl-reduction", {"lam": module.lam, "lattice": lattice}),
        highest_weight=module.lam,
    )
    mod.verify_weight_homogeneity()
    return mod


def tensor(a: ModularModule, b: ModularModule) -> ModularModule:
    """Tensor product with the comultiplied divided-power action."""
    if a.p != b.p or a.datum.kind != b.datum.kind:
        raise ValueError("tensor factors disagree in prime or group")
    p = a.p
    datum = a.datum
    dim = a.dimension * b.dimension
    basis_weights = [
        datum.add_weights(wa, wb) for wa in a.basis_weights for wb in b.basis_weights
    ]
    gens = {}
    for kind in ("e", "f"):
        for i in range(datum.rank):
            cap = a.max_power(kind, i) + b.max_power(kind, i)
            for m in range(1, cap + 1):
                rows = [[0] * dim for _ in range(dim)]
                nonzero = False
                for r in range(m + 1):
                    s = m - r
                    ma = a.gen(kind, i, r)
                    mb = b.gen(kind, i, s)
                    if ma.is_zero() or mb.is_zero():
                        continue
                    for ra in range(a.dimension):
                        for ca in range(a.dimension):
                            va = ma.entries[ra][ca]
                            if not va:
                                continue
                            for rb in range(b.dimension):
                                for cb in range(b.dimension):
                                    vb = mb.entries[rb][cb]
                                    if not vb:
                                        continue
                                    rr = ra * b.dimension + rb
                                    cc = ca * b.dimension + cb
                                    rows[rr][cc] = (rows[rr][cc] + va * vb) % p
                                    nonzero = True
                if nonzero:
                    gens[(kind, i, m)] = MatrixFp.from_rows(rows, p)
    out = ModularModule(
        datum=datum,
        p=p,
        dimension=dim,
        basis_weights=basis_weights,
        gens=gens,
        provenance=("tensor", (a, b)),
        highest_weight=datum.add_weights(a.highest_weight, b.highest_weight),
    )
    out.verify_weight_homogeneity()
    # character of the product is the convolution of the characters
    ca, cb, cab = a.character(), b.character(), out.character()
    conv = {}
    for wa, ma in ca.items():
        for wb, mb in cb.items():
            key = datum.add_weights(wa, wb)
            conv[key] = conv.get(key, 0) + ma * mb
    if conv != cab:
        raise InternalCheckError("tensor character is not the convolution")
    return out


def weyl_module_mod_p(datum: RootDatum, lam, p: int, dim_cap: int = 5000) -> ModularModule:
    """Convenience composition: V_Q(lam) -> minimal lattice -> mod p."""
    return reduce_mod_p(minimal_lattice(build_irreducible_Q(datum, lam, dim_cap)), p)
