import random

import pytest

from bkclab.bkfilt import bk_filtration, build_principal_pair, divided_family
from bkclab.errors import CapExceeded
from bkclab.exactalg import MatrixQ, rank_kernel_Fp
from bkclab.invmodel import (
    adjoint_action_polynomials,
    b_invariant_filtration,
    borel_from_modular,
    coordinate_module,
    evaluation_lambda,
    lambda_bijective,
    regularity_check,
)
from bkclab.repbuild import weyl_module_mod_p
from bkclab.rootdata import GroupSpec, build_root_datum, check_hypotheses
from bkclab.tilting import tilting_module


def test_adjoint_polynomials_gl2():
    datum = build_root_datum(GroupSpec("GL2"))
    fams = adjoint_action_polynomials(datum, 5)
    seq = fams[0]
    # x(0) = identity
    assert seq[0].entries == tuple(
        tuple(1 if i == j else 0 for j in range(3)) for i in range(3)
    )
    # Ad(x(t)) fixes e: the e-column (last basis label) is constant
    for m in range(1, len(seq)):
        assert all(seq[m].entries[r][2] == 0 for r in range(3))
    # nilpotency on the Borel subalgebra: ad(e)^2 = 0 there
    assert len(seq) == 2


def test_adjoint_on_g_matches_hand_gl2():
    # on the full Lie algebra: Ad(x(t)) f = f + t(E11 - E22) - t^2 e
    from fractions import Fraction

    datum = build_root_datum(GroupSpec("GL2"))
    ad = datum.ad_matrix(("e", 0))
    # basis order: t0, t1, e, f
    sq = (ad @ ad).scale(Fraction(1, 2))
    f_col = 3
    assert ad.column(f_col) == (1, -1, 0, 0)  # [e, f] = E11 - E22
    assert sq.column(f_col) == (0, 0, -1, 0)  # (ad e)^2/2 . f = -e
    assert all(x == 0 for x in (ad @ ad @ ad).column(f_col))  # (ad e)^3 f = 0


def test_coordinate_module_small():
    datum = build_root_datum(GroupSpec("GL2"))
    c0 = coordinate_module(datum, 5, 0)
    assert c0.dimension == 1
    c1 = coordinate_module(datum, 5, 1)
    assert c1.dimension == 2
    c2 = coordinate_module(datum, 5, 2)
    assert c2.dimension == 3
    # degree filtration sizes 1, 2, 3
    for n in range(3):
        assert sum(1 for deg in c2.degrees if deg <= n) == n + 1


def test_coordinate_module_gl3():
    datum = build_root_datum(GroupSpec("GL3"))
    c2 = coordinate_module(datum, 7, 2)
    assert c2.dimension == 10  # C(3+2, 2)
    c2.borel()  # re-run the one-parameter verification explicitly


def test_regularity():
    gl2 = build_root_datum(GroupSpec("GL2"))
    assert regularity_check(gl2, 2, (1, 0))
    gl3 = build_root_datum(GroupSpec("GL3"))
    assert regularity_check(gl3, 3, (2, 1, 0))
    # alpha_1(h) = 0 kills regularity
    assert not regularity_check(gl2, 2, (0, 0))


def test_invariants_gl2_p5():
    datum = build_root_datum(GroupSpec("GL2"))
    rng = random.Random(3)
    mod, _ = tilting_module(datum, 5, (2, 0), rng)
    report = b_invariant_filtration(mod, (1, 1), d=2)
    assert report.dims == [0, 1, 1]
    assert lambda_bijective(report)
    vec = report.invariant_basis[0]
    image = evaluation_lambda(report, vec)
    assert any(x != 0 for x in image)


def test_invariants_gl2_p2_tensor():
    datum = build_root_datum(GroupSpec("GL2"))
    rng = random.Random(3)
    mod, route = tilting_module(datum, 2, (2, 0), rng)
    assert route == "tensor-split"
    report = b_invariant_filtration(mod, (1, 1), d=2)
    assert report.dims == [1, 2, 2]
    assert lambda_bijective(report)


def test_invariants_highest_weight_line():
    datum = build_root_datum(GroupSpec("GL2"))
    rng = random.Random(3)
    mod, _ = tilting_module(datum, 5, (2, 0), rng)
    report = b_invariant_filtration(mod, (2, 0), d=1)
    assert report.dims == [1, 1]
    vec = report.invariant_basis[0]
    image = evaluation_lambda(report, vec)
    assert any(x != 0 for x in image)


def test_invariants_match_filtration():
    cases = [
        ("GL2", 5, (2, 0)),
        ("GL2", 5, (3, 0)),
        ("GL3", 7, (1, 1, 0)),
        ("A2", 7, (1, 1)),
    ]
    rng = random.Random(9)
    for kind, p, lam in cases:
        datum = build_root_datum(GroupSpec(kind))
        hyp = check_hypotheses(GroupSpec(kind, p))
        pair = build_principal_pair(datum, hyp)
        mod, _ = tilting_module(datum, p, lam, rng)
        fam = divided_family(mod, pair)
        for mu in sorted(set(mod.basis_weights)):
            if not datum.is_dominant(mu):
                continue
            filt = bk_filtration(fam, mu)
            inv = b_invariant_filtration(mod, mu)
            for n in range(inv.degree_bound + 1):
                assert inv.dims[n] == filt.level_dim(n), (kind, p, lam, mu, n)
            assert lambda_bijective(inv)


def test_degree_too_small():
    datum = build_root_datum(GroupSpec("GL2"))
    rng = random.Random(3)
    mod, _ = tilting_module(datum, 5, (3, 0), rng)
    with pytest.raises(CapExceeded):
        b_invariant_filtration(mod, (0, 3), d=1)


def test_borel_from_modular_verifies():
    datum = build_root_datum(GroupSpec("GL2"))
    mod = weyl_module_mod_p(datum, (2, 0), 5)
    borel = borel_from_modular(mod)
    assert borel.dimension == 3


def test_invariants_b2_and_g2():
    # non-simply-laced coordinate modules: several root coordinates, longer
    # substitution polynomials
    cases = [("B2", 5, (1, 0)), ("B2", 5, (0, 1)), ("G2", 7, (1, 0))]
    rng = random.Random(21)
    for kind, p, lam in cases:
        datum = build_root_datum(GroupSpec(kind))
        hyp = check_hypotheses(GroupSpec(kind, p))
        pair = build_principal_pair(datum, hyp)
        mod, _ = tilting_module(datum, p, lam, rng)
        fam = divided_family(mod, pair)
        # highest weight line is cheap for every type; deeper weights where
        # the monomial count stays small
        mus = [lam]
        if kind == "B2":
            mus += [
                mu
                for mu in sorted(set(mod.basis_weights))
                if datum.is_dominant(mu) and mu != lam
            ]
        for mu in mus:
            inv = b_invariant_filtration(mod, mu)
            filt = bk_filtration(fam, mu)
            assert all(
                inv.dims[n] == filt.level_dim(n)
                for n in range(inv.degree_bound + 1)
            ), (kind, p, lam, mu)
            assert lambda_bijective(inv)
