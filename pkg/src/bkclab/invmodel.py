"""Algebraic model of the filtration through B-invariant polynomial maps.

The model computes, for each degree n, the dimension of

    (T(lam) (x) k_{-mu} (x) k[functions of degree <= n on the affine chart])^B

with the chart centered at the adapted Cartan element h, so the evaluation
map is constant-term extraction.  Invariance splits into a torus condition
(total integral weight zero) and unipotent conditions: the group is generated
by the simple root subgroups x_i(t), whose action on every leg is polynomial
in t, so invariance means every positive t-power coefficient operator kills
the vector.

Conventions recorded once:

* chart coordinates are the Chevalley dual basis of the nilpotent radical
  translated to base point h, so h itself is the origin and alpha_i(h) = 1;
* group elements act on functions by (g.f)(z) = f(g^{-1} z), so the x_i(t)
  substitution uses Ad(x_i(-t));
* the dual twist enters as the character -mu, trivially under the unipotent
  part.

The degree-n invariant dimensions must reproduce the filtration level
dimensions computed from the divided-power family; that equality is the
cross-check this module exists for, and the evaluation map must be a
bijection onto the weight space once the degree stabilizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import CapExceeded, InternalCheckError
from .exactalg import MatrixFp, MatrixQ, binomial, p_integral_reduce, rank_kernel_Fp
from .repbuild import ModularModule
from .rootdata import RootDatum


@dataclass
class BorelModule:
    """T-graded space with each simple root subgroup acting polynomially.

    ``ops[i][m]`` is the coefficient of t^m in the action of x_i(t); the
    zeroth coefficient must be the identity and the coefficients must satisfy
    the binomial convolution identity expressing x_i(s) x_i(t) = x_i(s+t).
    """

    datum: RootDatum
    p: int
    weights: list  # weight tuple per basis index
    ops: dict  # i -> list of MatrixFp

    @property
    def dimension(self) -> int:
        return len(self.weights)

    def op(self, i: int, m: int) -> MatrixFp:
        seq = self.ops[i]
        if m < len(seq):
            return seq[m]
        return MatrixFp.zero(self.dimension, self.dimension, self.p)

    def verify(self):
        ident = MatrixFp.identity(self.dimension, self.p)
        for i, seq in self.ops.items():
            if seq[0].entries != ident.entries:
                raise InternalCheckError("x_i(0) is not the identity")
            alpha = self.datum.simple_root_weight(i)
            top = len(seq) - 1
            for a in range(top + 1):
                for b in range(top + 1 - a):
                    prod = seq[a] @ seq[b]
                    expected = self.op(i, a + b).scale(binomial(a + b, a))
                    if prod.entries != expected.entries:
                        raise InternalCheckError(
                            "x_i(s) x_i(t) != x_i(s+t) on coefficients"
                        )
            for m, mat in enumerate(seq):
                for r in range(mat.rows):
                    for c in range(mat.cols):
                        if mat.entries[r][c] != 0:
                            expected = tuple(
                                w + m * a
                                for w, a in zip(self.weights[c], alpha)
                            )
                            if self.weights[r] != expected:
                                raise InternalCheckError(
                                    "t-degree m does not shift weight by m*alpha"
                                )


def borel_from_modular(module: ModularModule) -> BorelModule:
    """x_i(t) = sum_m t^m e_i^{(m)} on a module with divided powers."""
    ops = {}
    for i in range(module.datum.rank):
        top = module.max_power("e", i)
        ops[i] = [module.gen("e", i, m) for m in range(top + 1)]
    borel = BorelModule(
        datum=module.datum, p=module.p, weights=list(module.basis_weights), ops=ops
    )
    borel.verify()
    return borel


# ---------------------------------------------------------------------------
# adjoint action and the coordinate module


def adjoint_action_polynomials(datum: RootDatum, p: int):
    """Coefficient matrices of Ad(x_i(t)) on the Borel subalgebra, mod p.

    The divided powers (ad e_i)^m / m! are integral on the Chevalley basis;
    non-integrality is an internal error, not a prime condition.
    """
    out = []
    for i in range(datum.rank):
        ad = datum.ad_e_on_b(i)
        size = ad.rows
        coeffs = []
        power = MatrixQ.identity(size)
        m = 0
        while not power.is_zero():
            scaled = power.scale(Fraction(1, factorial(m)))
            if not scaled.is_integral():
                raise InternalCheckError("ad divided power not integral on b")
            coeffs.append(p_integral_reduce(scaled, p))
            power = power @ ad
            m += 1
        out.append(coeffs)
    _verify_adjoint_family(datum, p, out)
    return out


def _verify_adjoint_family(datum: RootDatum, p: int, families):
    for i, seq in enumerate(families):
        size = seq[0].rows
        if seq[0].entries != MatrixFp.identity(size, p).entries:
            raise InternalCheckError("Ad(x_i(0)) != id")
        for a in range(len(seq)):
            for b in range(len(seq) - a):
                prod = seq[a] @ seq[b]
                expect = (
                    seq[a + b].scale(binomial(a + b, a))
                    if a + b < len(seq)
                    else MatrixFp.zero(size, size, p)
                )
                if prod.entries != expect.entries:
                    raise InternalCheckError("adjoint family fails convolution")


@dataclass
class AffineCoordinateModule:
    """Polynomial functions of bounded degree on the chart through h.

    Monomials in the dual coordinates of the nilpotent radical; the
    substitution action of each x_i(t) is stored as t-coefficient operators
    and preserves the degree filtration.
    """

    datum: RootDatum
    p: int
    degree_bound: int
    monomials: list  # exponent tuples over positive roots
    degrees: list
    weights: list  # T-weight of each monomial
    ops: dict  # i -> list of MatrixFp

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def op(self, i: int, m: int) -> MatrixFp:
        seq = self.ops[i]
        if m < len(seq):
            return seq[m]
        return MatrixFp.zero(self.dimension, self.dimension, self.p)

    def max_power(self, i: int) -> int:
        return len(self.ops[i]) - 1

    def borel(self) -> BorelModule:
        b = BorelModule(
            datum=self.datum, p=self.p, weights=list(self.weights), ops=self.ops
        )
        b.verify()
        return b


def coordinate_module(datum: RootDatum, p: int, d: int) -> AffineCoordinateModule:
    """Degree <= d functions on h + (nilpotent radical), chart centered at h.

    Uses the adapted normalization alpha_i(h) = 1, which is the only way h
    enters the substitution.
    """
    if d < 0:
        raise ValueError("degree bound must be nonnegative")
    n_roots = len(datum.pos_roots)
    monomials = [
        mono
        for mono in itertools.product(range(d + 1), repeat=n_roots)
        if sum(mono) <= d
    ]
    monomials.sort(key=lambda mo: (sum(mo), mo))
    if len(monomials) != comb(n_roots + d, d):
        raise InternalCheckError("monomial count disagrees with the binomial")
    mono_index = {mo: k for k, mo in enumerate(monomials)}
    degrees = [sum(mo) for mo in monomials]
    weights = []
    for mo in monomials:
        acc = tuple([0] * datum.coord_dim)
        for k, exp in enumerate(mo):
            if exp:
                w = datum.weight_of_root(datum.pos_roots[k])
                acc = tuple(a - exp * b for a, b in zip(acc, w))
        weights.append(acc)

    adjoint = adjoint_action_polynomials(datum, p)
    n_offset = datum.t_dim  # the nilpotent block starts after the t part

    ops = {}
    for i in range(datum.rank):
        seq = adjoint[i]
        # substituted coordinate: y_gamma(z') as a polynomial in t and y
        # z' = z + t e_i + sum_{m>=1} (-1)^m t^m L_m z on the chart
        simple_idx = datum.simple_pos_index(i)
        coord_images = []
        for gidx in range(n_roots):
            terms = {}  # (t_power, delta_index or None) -> coeff
            terms[(0, gidx)] = 1
            if gidx == simple_idx:
                terms[(1, None)] = (terms.get((1, None), 0) + 1) % p
            for m in range(1, len(seq)):
                lm = seq[m]
                sign = 1 if m % 2 == 0 else p - 1
                for didx in range(n_roots):
                    v = lm.entries[n_offset + gidx][n_offset + didx]
                    if v:
                        key = (m, didx)
                        terms[key] = (terms.get(key, 0) + sign * v) % p
            coord_images.append({k: v for k, v in terms.items() if v})

        max_t = 0
        columns = {}
        for src_k, mono in enumerate(monomials):
            # product over coordinates of image polynomials
            poly = {(0, tuple([0] * n_roots)): 1}
            for gidx, exp in enumerate(mono):
                for _ in range(exp):
                    new = {}
                    for (tp, mo), c in poly.items():
                        for (tq, delta), c2 in coord_images[gidx].items():
                            if delta is None:
                                key = (tp + tq, mo)
                            else:
                                lifted = list(mo)
                                lifted[delta] += 1
                                key = (tp + tq, tuple(lifted))
                            new[key] = (new.get(key, 0) + c * c2) % p
                    poly = {k: v for k, v in new.items() if v}
            for (tp, mo), c in poly.items():
                if sum(mo) > d:
                    raise InternalCheckError("substitution raised the degree")
                max_t = max(max_t, tp)
                columns.setdefault(tp, {}).setdefault(src_k, {})[
                    mono_index[mo]
                ] = c
        mats = []
        for tp in range(max_t + 1):
            rows = [[0] * len(monomials) for _ in range(len(monomials))]
            for src_k, col in columns.get(tp, {}).items():
                for tgt_k, c in col.items():
                    rows[tgt_k][src_k] = c
            mats.append(MatrixFp.from_rows(rows, p))
        ops[i] = mats

    module = AffineCoordinateModule(
        datum=datum,
        p=p,
        degree_bound=d,
        monomials=monomials,
        degrees=degrees,
        weights=weights,
        ops=ops,
    )
    _verify_coordinate_module(module)
    return module


def _verify_coordinate_module(module: AffineCoordinateModule):
    module.borel()  # runs the full one-parameter family verification
    # substitution must preserve the degree filtration
    for i, seq in module.ops.items():
        for mat in seq:
            for r in range(mat.rows):
                for c in range(mat.cols):
                    if mat.entries[r][c] and module.degrees[r] > module.degrees[c]:
                        raise InternalCheckError("degree filtration broken")


# ---------------------------------------------------------------------------
# B-invariants of the triple tensor


@dataclass
class BInvariantReport:
    """Per-degree invariant dimensions plus the stabilized invariant basis."""

    mu: tuple
    degree_bound: int
    dims: list  # n = 0 .. degree_bound
    pair_basis: list  # (module index, monomial index)
    pair_degrees: list
    invariant_basis: list  # vectors over pair_basis, at n = degree_bound
    module: ModularModule
    coord: AffineCoordinateModule

    def evaluation_matrix(self) -> MatrixFp:
        """Constant-term extraction into the mu weight space, one column per
        stabilized invariant."""
        p = self.module.p
        mu_indices = self.module.weight_indices(self.mu)
        zero_mono = 0  # monomials are sorted with the constant first
        rows = []
        for a in mu_indices:
            try:
                pos = self.pair_basis.index((a, zero_mono))
            except ValueError:
                pos = None
            rows.append(
                [
                    vec[pos] if pos is not None else 0
                    for vec in self.invariant_basis
                ]
            )
        return MatrixFp.from_rows(rows, p) if rows else MatrixFp.zero(0, 0, p)


def b_invariant_filtration(
    module: ModularModule, mu, d: int = None
) -> BInvariantReport:
    """Invariant dimensions of the twisted triple tensor per degree <= d.

    The default degree bound is one beyond the height of lam - mu; failure to
    stabilize at the bound is an error rather than a silent truncation.
    """
    datum = module.datum
    p = module.p
    mu = tuple(mu)
    lam = module.highest_weight
    coords = datum.root_coordinates(datum.sub_weights(lam, mu))
    if coords is None or any(c < 0 for c in coords):
        raise ValueError(f"{mu} is not below the highest weight")
    height = sum(coords)
    if d is None:
        d = height + 1
    if d < height:
        raise CapExceeded(f"degree bound {d} below the height {height}")
    coord = coordinate_module(datum, p, d)

    # basis of the total-weight-zero part: wt(a) - mu + wt(mono) = 0
    pair_basis = []
    pair_degrees = []
    for a, wa in enumerate(module.basis_weights):
        for k, wm in enumerate(coord.weights):
            total = datum.sub_weights(datum.add_weights(wa, wm), mu)
            if all(x == 0 for x in total):
                pair_basis.append((a, k))
                pair_degrees.append(coord.degrees[k])
    pair_index = {pk: t for t, pk in enumerate(pair_basis)}

    # constraint rows: for every simple root and t-power, the operator
    # sum_{r+s=m} e_i^{(r)} (x) S_s from weight 0 into weight m*alpha_i
    constraint_rows = []
    row_degrees = []
    for i in range(datum.rank):
        alpha = datum.simple_root_weight(i)
        max_m = module.max_power("e", i) + coord.max_power(i)
        for m in range(1, max_m + 1):
            # target pair basis at total weight m*alpha
            targets = {}
            for a, wa in enumerate(module.basis_weights):
                for k, wm in enumerate(coord.weights):
                    total = datum.sub_weights(datum.add_weights(wa, wm), mu)
                    if total == tuple(m * x for x in alpha):
                        targets[(a, k)] = len(targets)
            if not targets:
                continue
            rows = [[0] * len(pair_basis) for _ in range(len(targets))]
            row_deg = [0] * len(targets)
            for (a, k), key in targets.items():
                row_deg[key] = coord.degrees[k]
            filled = False
            for r in range(m + 1):
                s = m - r
                e_mat = module.gen("e", i, r)
                s_mat = coord.op(i, s)
                if e_mat.is_zero() or s_mat.is_zero():
                    continue
                for t_col, (a, k) in enumerate(pair_basis):
                    for a2 in range(module.dimension):
                        va = e_mat.entries[a2][a]
                        if not va:
                            continue
                        for k2 in range(coord.dimension):
                            vs = s_mat.entries[k2][k]
                            if not vs:
                                continue
                            key = targets.get((a2, k2))
                            if key is None:
                                continue
                            rows[key][t_col] = (rows[key][t_col] + va * vs) % p
                            filled = True
            if filled:
                constraint_rows.extend(rows)
                row_degrees.extend(row_deg)

    dims = []
    for n in range(d + 1):
        cols = [t for t, deg in enumerate(pair_degrees) if deg <= n]
        if not cols:
            dims.append(0)
            continue
        if constraint_rows:
            sub = [[row[c] for c in cols] for row in constraint_rows]
            sub = [r for r in sub if any(r)]
            if sub:
                rank, _ = rank_kernel_Fp(MatrixFp.from_rows(sub, p))
            else:
                rank = 0
        else:
            rank = 0
        dims.append(len(cols) - rank)

    if d > 0 and dims[d] != dims[d - 1]:
        raise CapExceeded(
            f"invariant dimensions not stabilized at degree {d}; raise the bound"
        )

    # invariant basis at the full degree bound
    if constraint_rows:
        full = [r for r in constraint_rows if any(r)]
        if full:
            _, kernel = rank_kernel_Fp(MatrixFp.from_rows(full, p))
            invariant_basis = [kernel.column(j) for j in range(kernel.cols)]
        else:
            invariant_basis = [
                tuple(1 if t == j else 0 for t in range(len(pair_basis)))
                for j in range(len(pair_basis))
            ]
    else:
        invariant_basis = [
            tuple(1 if t == j else 0 for t in range(len(pair_basis)))
            for j in range(len(pair_basis))
        ]
    if len(invariant_basis) != dims[d]:
        raise InternalCheckError("kernel size disagrees with the dimension table")

    return BInvariantReport(
        mu=mu,
        degree_bound=d,
        dims=dims,
        pair_basis=pair_basis,
        pair_degrees=pair_degrees,
        invariant_basis=invariant_basis,
        module=module,
        coord=coord,
    )


def evaluation_lambda(report: BInvariantReport, vector) -> tuple:
    """Evaluate an invariant at the base point h: the chart is centered at h,
    so this reads off the constant-monomial component in T(lam)_mu."""
    module = report.module
    p = module.p
    mu_indices = module.weight_indices(report.mu)
    out = []
    for a in mu_indices:
        try:
            pos = report.pair_basis.index((a, 0))
        except ValueError:
            pos = None
        out.append(vector[pos] % p if pos is not None else 0)
    return tuple(out)


def lambda_bijective(report: BInvariantReport) -> bool:
    """The stabilized evaluation map is injective onto the weight space."""
    mult = len(report.module.weight_indices(report.mu))
    k = len(report.invariant_basis)
    if k != mult:
        return False
    if mult == 0:
        return True
    mat = report.evaluation_matrix()
    rank, _ = rank_kernel_Fp(mat)
    return rank == mult


def regularity_check(datum: RootDatum, p: int, h_coords) -> bool:
    """ad(h) invertible on the nilpotent radical mod p: certifies that the
    unipotent orbit of h is open (hence dense) in the chart."""
    for beta in datum.pos_roots:
        val = sum(
            h_coords[t] * datum.root_value_on_t(beta, t)
            for t in range(datum.t_dim)
        )
        if val % p == 0:
            return False
    return True
