"""Divided powers of the adapted principal nilpotent and the graded
dimensions of the filtration they cut out on each weight space.

The nilpotent is e = sum of the simple Chevalley generators.  Its divided
powers in characteristic p are realized as the mod-p reductions of E^j / j!
computed on a divided-power-stable lattice of a characteristic-zero lift;
over Q that family is the unique additive one-parameter subgroup with
derivative e, and the one-parameter-subgroup axioms

    X_0 = 1,   X_a X_b = C(a+b, a) X_{a+b},   X_j homogeneous of height j

are asserted on every constructed family rather than assumed.  Tensor
products convolve families; direct summands restrict them along projectors.

The filtration level n of a weight space is the joint kernel of all X_j with
j >= n+1 (not just of X_{n+1}: in characteristic p, X_{n+1} v = 0 does not
force X_{n+2} v = 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import (
    DividedPowerUndefined,
    InternalCheckError,
    NonIntegral,
    RegimeViolation,
)
from .exactalg import (
    MatrixFp,
    MatrixQ,
    binomial,
    p_integral_reduce,
    rank_kernel_Fp,
)
from .qanalogue import QPolynomial
from .repbuild import AdmissibleLattice, ModularModule, reduce_mod_p
from .rootdata import HypothesisReport, RootDatum, dim_gr


@dataclass(frozen=True)
class PrincipalPair:
    """The adapted principal nilpotent e = sum_i c_i e_{alpha_i} together
    with the Cartan element h solving alpha_i(h) = 1 over F_p."""

    datum: RootDatum
    p: int
    h_coords: tuple
    coefficients: tuple  # one unit per simple root; all 1 by default

    def root_value_h(self, coords) -> int:
        """beta(h) mod p for a root given by simple-root coefficients."""
        return (
            sum(
                self.h_coords[t] * self.datum.root_value_on_t(coords, t)
                for t in range(self.datum.t_dim)
            )
            % self.p
        )


def build_principal_pair(
    datum: RootDatum, report: HypothesisReport, coefficients=None
) -> PrincipalPair:
    """Assemble and certify the (e, h) pair from a hypothesis report."""
    if report.h_coords is None:
        raise RegimeViolation("no adapted Cartan element exists at this prime")
    p = report.p
    if coefficients is None:
        coefficients = tuple([1] * datum.rank)
    coefficients = tuple(c % p for c in coefficients)
    if any(c == 0 for c in coefficients):
        raise ValueError("principal nilpotent needs unit coefficients")
    pair = PrincipalPair(
        datum=datum, p=p, h_coords=tuple(report.h_coords), coefficients=coefficients
    )
    # [h, e] = e on the adjoint basis: alpha_i(h) = 1 for every simple root
    for i in range(datum.rank):
        alpha = tuple(1 if j == i else 0 for j in range(datum.rank))
        if pair.root_value_h(alpha) != 1:
            raise InternalCheckError("[h, e] != e for the reported h")
    # principality proxy: ad(e) mod p has corank exactly the reductive rank
    ad_e = None
    for i in range(datum.rank):
        mat = datum.ad_matrix(("e", datum.simple_pos_index(i))).scale(
            coefficients[i]
        )
        ad_e = mat if ad_e is None else ad_e + mat
    ad_e_p = p_integral_reduce(ad_e, p)
    rank, _ = rank_kernel_Fp(ad_e_p)
    if rank != datum.dim_g() - datum.t_dim:
        raise InternalCheckError("ad(e) does not have minimal centralizer mod p")
    return pair


@dataclass
class DividedPowerFamily:
    """Operators X_0..X_N over F_p realizing the divided powers of e."""

    module: ModularModule
    pair: PrincipalPair
    matrices: list
    provenance: str  # lattice-lift | tensor-convolution | summand-restriction

    @property
    def bound(self) -> int:
        return len(self.matrices) - 1

    def verify(self):
        """One-parameter-subgroup axioms, exact; raises on any failure."""
        n = self.bound
        p = self.module.p
        dim = self.module.dimension
        if self.matrices[0].entries != MatrixFp.identity(dim, p).entries:
            raise InternalCheckError("X_0 is not the identity")
        if n >= 1:
            x1 = MatrixFp.zero(dim, dim, p)
            for i in range(self.module.datum.rank):
                x1 = x1 + self.module.gen("e", i, 1).scale(
                    self.pair.coefficients[i]
                )
            if self.matrices[1].entries != x1.entries:
                raise InternalCheckError("X_1 is not the matrix of e")
        for a in range(n + 1):
            for b in range(n + 1 - a):
                prod = self.matrices[a] @ self.matrices[b]
                expected = self.matrices[a + b].scale(binomial(a + b, a))
                if prod.entries != expected.entries:
                    raise InternalCheckError(
                        f"X_{a} X_{b} != C({a + b},{a}) X_{a + b}"
                    )
        self._verify_height_homogeneity()

    def _verify_height_homogeneity(self):
        datum = self.module.datum
        weights = self.module.basis_weights
        for j, mat in enumerate(self.matrices):
            for r in range(mat.rows):
                for c in range(mat.cols):
                    if mat.entries[r][c] != 0:
                        diff = datum.sub_weights(weights[r], weights[c])
                        coords = datum.root_coordinates(diff)
                        if coords is None or sum(coords) != j or any(
                            x < 0 for x in coords
                        ):
                            raise InternalCheckError(
                                f"X_{j} is not height-homogeneous"
                            )


def family_bound(datum: RootDatum, lam) -> int:
    """Height of lam - w0(lam): the largest exponent the family can need."""
    w0lam = datum.act(datum.w0_matrix(), tuple(lam))
    coords = datum.root_coordinates(datum.sub_weights(tuple(lam), w0lam))
    if coords is None:
        raise InternalCheckError("lam - w0(lam) not in the root lattice")
    return sum(coords)


def divided_family_from_lattice(
    lattice: AdmissibleLattice,
    p: int,
    pair: PrincipalPair,
    module: ModularModule = None,
    enforce_regime: bool = True,
) -> DividedPowerFamily:
    """Family X_j = (E^j / j!) mod p on the lattice coordinates.

    Refuses p below the Coxeter number unless the caller explicitly bypasses
    the regime check; with the check bypassed, a denominator divisible by p
    surfaces as DividedPowerUndefined.
    """
    datum = lattice.datum
    if enforce_regime and p < datum.coxeter_number:
        raise RegimeViolation(
            f"p = {p} below the Coxeter number {datum.coxeter_number}"
        )
    if module is None:
        module = reduce_mod_p(lattice, p)
    e_full = None
    for i in range(datum.rank):
        mat = _full_rational_generator(lattice, "e", i).scale(pair.coefficients[i])
        e_full = mat if e_full is None else e_full + mat
    n_bound = family_bound(datum, module.highest_weight)
    matrices = [MatrixFp.identity(module.dimension, p)]
    power = MatrixQ.identity(module.dimension)
    for j in range(1, n_bound + 1):
        power = power @ e_full
        try:
            matrices.append(p_integral_reduce(power.scale(Fraction(1, factorial(j))), p))
        except NonIntegral as exc:
            raise DividedPowerUndefined(p, j) from exc
    if not (power @ e_full).is_zero():
        raise InternalCheckError("E does not vanish beyond the height bound")
    family = DividedPowerFamily(
        module=module, pair=pair, matrices=matrices, provenance="lattice-lift"
    )
    family.verify()
    return family


def _full_rational_generator(lattice: AdmissibleLattice, kind: str, i: int) -> MatrixQ:
    module = lattice.module
    datum = module.datum
    off = module.offsets()
    dim = module.dimension
    rows = [[Fraction(0)] * dim for _ in range(dim)]
    blocks = lattice.ops.get((kind, i, 1), {})
    sign = 1 if kind == "e" else -1
    alpha = datum.simple_root_weight(i)
    for mu, blk in blocks.items():
        target = tuple(w + sign * a for w, a in zip(mu, alpha))
        r0, c0 = off[target], off[mu]
        for r in range(blk.rows):
            for c in range(blk.cols):
                rows[r0 + r][c0 + c] = Fraction(blk.entries[r][c])
    return MatrixQ.from_rows(rows)


def divided_family_tensor(
    a: DividedPowerFamily, b: DividedPowerFamily, module: ModularModule
) -> DividedPowerFamily:
    """Convolution family on a tensor product module."""
    if a.module.p != b.module.p or a.pair is not b.pair:
        raise ValueError("tensor factors disagree in prime or principal pair")
    p = a.module.p
    dim_a, dim_b = a.module.dimension, b.module.dimension
    if module.dimension != dim_a * dim_b:
        raise ValueError("module is not the tensor of the factors")
    matrices = []
    for n in range(a.bound + b.bound + 1):
        rows = [[0] * (dim_a * dim_b) for _ in range(dim_a * dim_b)]
        for r in range(n + 1):
            s = n - r
            if r > a.bound or s > b.bound:
                continue
            ma, mb = a.matrices[r], b.matrices[s]
            for ra in range(dim_a):
                for ca in range(dim_a):
                    va = ma.entries[ra][ca]
                    if not va:
                        continue
                    for rb in range(dim_b):
                        for cb in range(dim_b):
                            vb = mb.entries[rb][cb]
                            if not vb:
                                continue
                            rr, cc = ra * dim_b + rb, ca * dim_b + cb
                            rows[rr][cc] = (rows[rr][cc] + va * vb) % p
        matrices.append(MatrixFp.from_rows(rows, p))
    family = DividedPowerFamily(
        module=module, pair=a.pair, matrices=matrices, provenance="tensor-convolution"
    )
    family.verify()
    return family


def restrict_family(
    family: DividedPowerFamily,
    projector: MatrixFp,
    inclusion: MatrixFp,
    restriction: MatrixFp,
    summand: ModularModule,
) -> DividedPowerFamily:
    """Family on a direct summand cut out by a generator-commuting projector.

    The commutation pi X_j = X_j pi is asserted for every j; a failure means
    the decomposition was not actually module-theoretic.
    """
    matrices = []
    for j, mat in enumerate(family.matrices):
        left = projector @ mat
        right = mat @ projector
        if left.entries != right.entries:
            raise InternalCheckError(f"projector does not commute with X_{j}")
        matrices.append(restriction @ mat @ inclusion)
    bound = family_bound(summand.datum, summand.highest_weight)
    matrices = matrices[: bound + 1]
    for j in range(len(matrices), bound + 1):
        matrices.append(
            MatrixFp.zero(summand.dimension, summand.dimension, summand.p)
        )
    family = DividedPowerFamily(
        module=summand,
        pair=family.pair,
        matrices=matrices,
        provenance="summand-restriction",
    )
    family.verify()
    return family


def divided_family(module: ModularModule, pair: PrincipalPair) -> DividedPowerFamily:
    """Family for a module, following its construction provenance."""
    tag, payload = module.provenance
    if tag == "weyl-reduction":
        lattice = payload.get("lattice")
        if lattice is None:
            raise InternalCheckError("weyl-reduction provenance lost its lattice")
        return divided_family_from_lattice(
            lattice, module.p, pair, module=module
        )
    if tag == "tensor":
        a, b = payload
        fam_a = divided_family(a, pair)
        fam_b = divided_family(b, pair)
        return divided_family_tensor(fam_a, fam_b, module)
    if tag == "summand":
        parent_family = divided_family(payload["parent"], pair)
        return restrict_family(
            parent_family,
            payload["projector"],
            payload["inclusion"],
            payload["restriction"],
            module,
        )
    raise InternalCheckError(f"unknown provenance {tag}")


# ---------------------------------------------------------------------------
# the filtration report


@dataclass
class FiltrationReport:
    """Filtration dimensions of one weight space and what they predict."""

    lam: tuple
    mu: tuple
    p: int
    dims: list  # dim of level n for n = -1 .. bound
    graded: list  # jumps, exponent 0 .. bound
    jump: QPolynomial
    costalk: list  # [(cohomological degree, dimension)] or None
    multiplicity: int
    flags: dict = field(default_factory=dict)

    def level_dim(self, n: int) -> int:
        if n < -1:
            return 0
        n = min(n, len(self.dims) - 2)
        return self.dims[n + 1]


def bk_filtration(family: DividedPowerFamily, mu) -> FiltrationReport:
    """Filtration level dimensions on the mu weight space.

    Level n is the joint kernel of every X_j with j >= n+1, intersected over
    the full range up to the per-weight height bound.
    """
    module = family.module
    datum = module.datum
    mu = tuple(mu)
    indices = module.weight_indices(mu)
    if not indices:
        raise ValueError(f"{mu} is not a weight of the module")
    mult = len(indices)
    lam = module.highest_weight
    coords = datum.root_coordinates(datum.sub_weights(lam, mu))
    if coords is None or any(c < 0 for c in coords):
        raise InternalCheckError("weight outside the cone under the top weight")
    per_weight_bound = sum(coords)
    top = min(family.bound, per_weight_bound)
    p = module.p

    columns = {}
    for j in range(0, family.bound + 1):
        mat = family.matrices[j]
        cols = [[mat.entries[r][c] for c in indices] for r in range(mat.rows)]
        if j > per_weight_bound and any(any(row) for row in cols):
            raise InternalCheckError("X_j nonzero beyond the per-weight bound")
        columns[j] = cols

    dims = []
    for n in range(-1, family.bound + 1):
        stacked = []
        for j in range(n + 1, top + 1):
            stacked.extend(columns[j])
        if not stacked:
            dims.append(mult)
            continue
        mat = MatrixFp.from_rows(stacked, p)
        rank, _ = rank_kernel_Fp(mat)
        dims.append(mult - rank)
    if dims[0] != 0:
        raise InternalCheckError("level -1 not zero")
    if dims[-1] != mult:
        raise InternalCheckError("filtration does not exhaust the weight space")
    if any(dims[i] > dims[i + 1] for i in range(len(dims) - 1)):
        raise InternalCheckError("filtration dimensions not monotone")

    graded = [dims[i + 1] - dims[i] for i in range(len(dims) - 1)]
    jump = QPolynomial.make(graded)
    if jump.evaluate(1) != mult:
        raise InternalCheckError("graded dimensions do not sum to multiplicity")
    costalk = None
    if datum.is_dominant(mu):
        costalk = _costalk_table(datum, mu, graded)
    return FiltrationReport(
        lam=lam,
        mu=mu,
        p=p,
        dims=dims,
        graded=graded,
        jump=jump,
        costalk=costalk,
        multiplicity=mult,
    )


def _costalk_table(datum: RootDatum, mu, graded):
    d = dim_gr(datum, mu)
    table = []
    for n, g in enumerate(graded):
        if g:
            degree = 2 * n - d
            if (degree - d) % 2 != 0:
                raise InternalCheckError("costalk degree parity broken")
            table.append((degree, g))
    return table


def costalk_prediction(report: FiltrationReport, datum: RootDatum):
    """Predicted costalk dimensions by cohomological degree, for dominant mu."""
    return _costalk_table(datum, report.mu, report.graded)
