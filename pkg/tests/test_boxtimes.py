"""Tests for twisted products: frames, builders, equivalences, functor."""

import numpy as np
import pytest

from qtwist.abgroup import (
    Bicharacter,
    FinAbGroup,
    GroupHom,
    dual_bicharacter,
    hom_h_to_dual_g,
    pullback,
    regular_bicharacter,
)
from qtwist.boxtimes import (
    CrossedProduct,
    build_via_covariant,
    build_via_heisenberg,
    coords_product,
    coords_star,
    coords_to_matrix,
    equivalent,
    functor_map,
    graded_morphism,
    leg_frames,
    matrix_to_coords,
    morphism_from_pairs,
    podles_span_check,
    pure_coords,
    qgr_morphism_reparametrize,
    symmetry,
    z_commutation_residual,
    z_unitary,
)
from qtwist.coact import (
    CovariantRep,
    ad_grading,
    canonical_covariant_rep,
    delta_grading,
    direct_sum_grading,
    hilbert_grading,
    trivial_grading,
)
from qtwist.heis import (
    amplify_pair,
    canonical_heisenberg,
    composite_heisenberg,
    conjugate_pair,
)
from qtwist.matspan import (
    center,
    expand_in_rows,
    find_generator_isomorphism,
    internal_unit,
    multiplicative_closure,
)
from qtwist.qgroup import translations

Z2 = FinAbGroup((2,))
Z3 = FinAbGroup((3,))
Z4 = FinAbGroup((4,))

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SZ = np.diag([1.0, -1.0]).astype(np.complex128)

CHI2 = Bicharacter(Z2, Z2, ((1,),))  # chi(1,1) = -1
CHI3 = Bicharacter(Z3, Z3, ((1,),))  # chi(1,1) = exp(2 pi i / 3)
CHI4 = Bicharacter(Z4, Z4, ((1,),))  # chi(1,1) = i


def m2_units():
    es = []
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=np.complex128)
            e[i, j] = 1.0
            es.append(e)
    return es


def golden_m2():
    c = delta_grading(Z2)
    d = delta_grading(Z2)
    return build_via_heisenberg(c, d, CHI2)


# ---------------------------------------------------------------------------
# coordinate frames against dense oracles


def test_leg_frames_tables_certified():
    legs = leg_frames([m2_units(), [I2, SZ]])
    assert legs.dims == (4, 2)
    assert legs.sizes == (2, 2)
    assert legs.ambient_dim == 4
    assert legs.residual < 1e-12


def test_coords_arithmetic_matches_dense():
    rng = np.random.default_rng(7)
    legs = leg_frames([m2_units(), [I2, SX, SZ, SX @ SZ]])
    x = rng.standard_normal(legs.dims) + 1j * rng.standard_normal(legs.dims)
    y = rng.standard_normal(legs.dims) + 1j * rng.standard_normal(legs.dims)
    mx, my = coords_to_matrix(x, legs), coords_to_matrix(y, legs)
    assert np.linalg.norm(coords_to_matrix(coords_product(x, y, legs), legs) - mx @ my) < 1e-10
    assert np.linalg.norm(coords_to_matrix(coords_star(x, legs), legs) - mx.conj().T) < 1e-10
    back, res = matrix_to_coords(mx, legs)
    assert res < 1e-10
    assert np.linalg.norm(back - x) < 1e-10


def test_pure_coords_is_kron():
    legs = leg_frames([m2_units(), [I2, SX, SZ, SX @ SZ]])
    a = np.array([[1.0, 2.0], [0.5j, -1.0]])
    b = SZ + 0.25 * SX
    coords = pure_coords(legs, [a, b])
    assert np.linalg.norm(coords_to_matrix(coords, legs) - np.kron(a, b)) < 1e-12
    with pytest.raises(RuntimeError):  # b falls outside a scalars-only leg
        pure_coords(leg_frames([m2_units(), [I2]]), [a, b])


# ---------------------------------------------------------------------------
# the golden example: C*(Z/2) boxtimes C*(Z/2) at chi = -1 is M_2


def test_golden_m2_report():
    x = golden_m2()
    assert x.report["passed"]
    assert x.dim == 4
    assert x.report["dim_law_ok"]
    assert x.report["commutation_law"] < 1e-12
    assert x.report["cstar_equality"] < 1e-12
    assert x.provenance["route"] == "heisenberg"


def test_golden_m2_generators_anticommute():
    x = golden_m2()
    lam = translations(Z2)
    u = coords_to_matrix(x.iota_c_apply(lam[(1,)]), x.legs)
    v = coords_to_matrix(x.iota_d_apply(lam[(1,)]), x.legs)
    n = x.ambient_dim
    for w in (u, v):
        assert np.linalg.norm(w @ w.conj().T - np.eye(n)) < 1e-12
        assert np.linalg.norm(w - w.conj().T) < 1e-12
    assert np.linalg.norm(u @ v + v @ u) < 1e-12


def test_golden_m2_is_full_matrix_algebra():
    x = golden_m2()
    assert x.algebra is not None
    assert center(x.algebra).dim == 1
    assert np.linalg.norm(internal_unit(x.algebra) - np.eye(x.ambient_dim)) < 1e-12
    lam = translations(Z2)
    gens = [
        coords_to_matrix(x.iota_c_apply(lam[(1,)]), x.legs),
        coords_to_matrix(x.iota_d_apply(lam[(1,)]), x.legs),
    ]
    m2 = multiplicative_closure([I2, SX, SZ])
    iso = find_generator_isomorphism(x.algebra, gens, m2, [SZ, SX])
    assert iso is not None


def test_trivial_twist_is_plain_tensor():
    c = delta_grading(Z2)
    d = delta_grading(Z3)
    x = build_via_heisenberg(c, d, Bicharacter.trivial(Z2, Z3))
    assert x.report["passed"]
    # in the untwisted case the two markings commute entrywise
    lam2, lam3 = translations(Z2), translations(Z3)
    a = coords_to_matrix(x.iota_c_apply(lam2[(1,)]), x.legs)
    b = coords_to_matrix(x.iota_d_apply(lam3[(1,)]), x.legs)
    assert np.linalg.norm(a @ b - b @ a) < 1e-12
    # structure constants factor as the product of the factor tensors,
    # derived densely from the factor bases as an independent oracle
    def struct(graded):
        basis = graded.ambient.basis
        m = len(basis)
        prods = np.einsum("iab,jbc->ijac", basis, basis).reshape(m * m, -1)
        coeffs, res = expand_in_rows(prods, graded.ambient.space.coords())
        assert np.max(res) < 1e-12
        return coeffs.reshape(m, m, m)

    mu = x.structure
    assert mu is not None
    m_c, m_d = c.dim, d.dim
    want = np.einsum("ikp,jlq->ijklpq", struct(c), struct(d))
    got = mu.reshape(m_c, m_d, m_c, m_d, m_c, m_d)
    assert np.linalg.norm((got - want).reshape(-1)) < 1e-12


def test_untwisted_center_is_full_for_abelian_factors():
    x = build_via_heisenberg(delta_grading(Z2), delta_grading(Z2), Bicharacter.trivial(Z2, Z2))
    assert center(x.algebra).dim == 4  # abelian
    y = golden_m2()
    assert center(y.algebra).dim == 1  # twisting kills the center


# ---------------------------------------------------------------------------
# dimension law across factor types


DIM_CASES = [
    (delta_grading(Z2), delta_grading(Z2), CHI2),
    (delta_grading(Z3), delta_grading(Z3), CHI3),
    (delta_grading(Z4), delta_grading(Z4), CHI4),
    (delta_grading(Z2), delta_grading(Z4), Bicharacter(Z2, Z4, ((1,),))),
    (ad_grading(Z2, [(0,), (1,)]), delta_grading(Z2), CHI2),
    (ad_grading(Z3, [(0,), (1,), (2,)]), delta_grading(Z3), CHI3),
    (direct_sum_grading(delta_grading(Z2), delta_grading(Z2)), delta_grading(Z2), CHI2),
]


@pytest.mark.parametrize("c,d,chi", DIM_CASES)
def test_dimension_law(c, d, chi):
    x = build_via_heisenberg(c, d, chi)
    assert x.report["passed"]
    assert x.dim == c.dim * d.dim
    assert x.report["invariant_commutators"] < 1e-12


# ---------------------------------------------------------------------------
# independence of the representation witness


@pytest.mark.parametrize("chi", [CHI2, CHI3, Bicharacter(Z2, Z4, ((1,),))])
def test_witness_independence(chi):
    c = delta_grading(chi.group_g)
    d = delta_grading(chi.group_h)
    base = build_via_heisenberg(c, d, chi)
    others = [
        build_via_heisenberg(c, d, chi, pair=composite_heisenberg(chi), label="composite"),
        build_via_heisenberg(c, d, chi, pair=amplify_pair(canonical_heisenberg(chi), 2), label="amplified"),
        build_via_covariant(canonical_covariant_rep(c), canonical_covariant_rep(d), chi),
    ]
    for other in others:
        assert other.report["passed"]
        assert other.dim == base.dim
        pm = equivalent(base, other)
        assert pm is not None
        assert pm.report["passed"]
        assert pm.report["markings"] < 1e-10


def test_equivalence_transports_elements():
    chi = CHI2
    c, d = delta_grading(Z2), delta_grading(Z2)
    x1 = build_via_heisenberg(c, d, chi)
    x2 = build_via_heisenberg(c, d, chi, pair=composite_heisenberg(chi))
    pm = equivalent(x1, x2)
    lam = translations(Z2)
    m1 = coords_to_matrix(x1.iota_c_apply(lam[(1,)]), x1.legs)
    assert np.linalg.norm(
        pm.apply_matrix(m1) - coords_to_matrix(x2.iota_c_apply(lam[(1,)]), x2.legs)
    ) < 1e-10


def test_different_twists_not_equivalent():
    c, d = delta_grading(Z2), delta_grading(Z2)
    x = build_via_heisenberg(c, d, CHI2)
    y = build_via_heisenberg(c, d, Bicharacter.trivial(Z2, Z2))
    assert equivalent(x, y) is None


def test_equivalent_rejects_foreign_factors():
    x = golden_m2()
    y = build_via_heisenberg(delta_grading(Z3), delta_grading(Z3), CHI3)
    with pytest.raises(ValueError):
        equivalent(x, y)


# ---------------------------------------------------------------------------
# the covariant route and its unitary


def test_z_unitary_oracle_z2():
    grading = hilbert_grading(Z2, [(0,), (1,)])
    z = z_unitary(grading, grading, CHI2)
    assert z.report["unitary"] < 1e-12
    assert np.linalg.norm(z.matrix - np.diag([1.0, 1.0, 1.0, -1.0])) < 1e-12


def test_z_commutation_characterization():
    grading4 = hilbert_grading(Z4, [(0,), (1,), (2,), (3,)])
    z = z_unitary(grading4, grading4, CHI4)
    good = canonical_heisenberg(CHI4)
    assert z_commutation_residual(z, good) < 1e-12
    # an anti-Heisenberg pair fails the identity for a non-real twist
    assert z_commutation_residual(z, conjugate_pair(good)) > 0.1
    # and the identity detects a wrong block-scalar
    z_triv = z_unitary(grading4, grading4, Bicharacter.trivial(Z4, Z4))
    assert z_commutation_residual(z_triv, good) > 0.1


def test_two_routes_agree():
    for chi in (CHI2, CHI3):
        c = delta_grading(chi.group_g)
        d = delta_grading(chi.group_h)
        xh = build_via_heisenberg(c, d, chi)
        xc = build_via_covariant(
            canonical_covariant_rep(c), canonical_covariant_rep(d), chi
        )
        assert xc.report["passed"]
        assert xc.provenance["route"] == "covariant"
        pm = equivalent(xh, xc)
        assert pm is not None and pm.report["passed"]


def test_covariant_requires_faithful():
    c = delta_grading(Z2)
    rep = canonical_covariant_rep(c)
    broken = CovariantRep(
        graded=c,
        grading=rep.grading,
        images=np.zeros_like(rep.images),
        report={"passed": False, "faithful": False},
    )
    with pytest.raises(ValueError):
        build_via_covariant(broken, canonical_covariant_rep(c), CHI2)


# ---------------------------------------------------------------------------
# symmetry and the Podles span


def test_symmetry_golden():
    x = golden_m2()
    y, pm = symmetry(x)
    assert y.report["passed"]
    assert y.chi.value((1,), (1,)) == pytest.approx(-1.0)
    assert pm.report["passed"]
    assert pm.report["markings"] < 1e-10


def test_symmetry_nonreal_twist():
    x = build_via_heisenberg(delta_grading(Z3), delta_grading(Z3), CHI3)
    y, pm = symmetry(x)
    # the flipped product carries the conjugate value
    assert y.chi.value((1,), (1,)) == pytest.approx(np.conj(CHI3.value((1,), (1,))))
    assert pm.report["passed"]


def test_podles_span():
    x = golden_m2()
    ok, dim = podles_span_check(x)
    k = x.legs.sizes[2]
    assert ok
    assert dim == x.c_graded.dim * x.d_graded.dim * k * k
    xc = build_via_covariant(
        canonical_covariant_rep(delta_grading(Z2)),
        canonical_covariant_rep(delta_grading(Z2)),
        CHI2,
    )
    with pytest.raises(ValueError):
        podles_span_check(xc)


# ---------------------------------------------------------------------------
# builder validation


def test_builder_rejects_nonunital_factor():
    e11 = np.diag([1.0, 0.0]).astype(np.complex128)
    nonunital = trivial_grading(Z2, [e11])
    assert not nonunital.ambient.contains_identity
    with pytest.raises(ValueError):
        build_via_heisenberg(nonunital, delta_grading(Z2), CHI2)


def test_builder_rejects_bad_pair():
    c, d = delta_grading(Z2), delta_grading(Z2)
    wrong = canonical_heisenberg(Bicharacter.trivial(Z2, Z2))
    with pytest.raises(ValueError):
        build_via_heisenberg(c, d, CHI2, pair=wrong)


def test_builder_rejects_wrong_group():
    with pytest.raises(ValueError):
        build_via_heisenberg(delta_grading(Z3), delta_grading(Z2), CHI2)


# ---------------------------------------------------------------------------
# graded morphisms and functoriality


def test_graded_morphism_reports():
    c = delta_grading(Z2)
    m2 = ad_grading(Z2, [(0,), (1,)])
    lam = translations(Z2)
    f = morphism_from_pairs(c, m2, [(I2, I2), (lam[(1,)], SX)])
    assert f.report["passed"]
    assert f.report["injective"] and not f.report["surjective"]
    assert np.linalg.norm(f.apply(lam[(1,)]) - SX) < 1e-12
    # sigma_z sits in degree zero, so lambda_1 -> sigma_z is not equivariant
    bad = morphism_from_pairs(c, m2, [(I2, I2), (lam[(1,)], SZ)])
    assert bad.report["equivariance"] > 0.5
    assert not bad.report["passed"]
    # scaling the image breaks multiplicativity
    bad2 = morphism_from_pairs(c, m2, [(I2, I2), (lam[(1,)], 2 * SX)])
    assert bad2.report["homomorphism"] > 0.5
    assert not bad2.report["passed"]
    with pytest.raises(ValueError):  # a single pair cannot pin the map
        morphism_from_pairs(c, m2, [(I2, I2)])
    with pytest.raises(ValueError):  # sigma_x is not in the group algebra
        morphism_from_pairs(c, m2, [(SX, SX), (lam[(1,)], SX)])


def test_functor_identity():
    x = golden_m2()
    c = x.c_graded
    ident = graded_morphism(c, c, list(c.ambient.basis))
    pm = functor_map(ident, ident, x, x)
    assert pm.report["passed"]
    assert pm.report["injective"] and pm.report["surjective"]
    assert pm.report["injectivity_matches"] and pm.report["surjectivity_matches"]


def test_functor_embedding():
    c = delta_grading(Z2)
    d = delta_grading(Z2)
    m2 = ad_grading(Z2, [(0,), (1,)])
    x1 = build_via_heisenberg(c, d, CHI2)
    x2 = build_via_heisenberg(m2, d, CHI2)
    f = morphism_from_pairs(c, m2, [(I2, I2), (translations(Z2)[(1,)], SX)])
    ident = graded_morphism(d, d, list(d.ambient.basis))
    pm = functor_map(f, ident, x1, x2)
    assert pm.report["passed"]
    assert pm.report["injective"] and not pm.report["surjective"]
    assert pm.report["injectivity_matches"] and pm.report["surjectivity_matches"]
    # markings are respected pointwise on generators
    lam = translations(Z2)
    got = pm.apply_coords(x1.iota_c_apply(lam[(1,)]))
    want = x2.iota_c_apply(SX)
    assert np.linalg.norm(got - want) < 1e-10


def test_functor_quotient():
    two = direct_sum_grading(
        trivial_grading(Z2, [np.eye(1)]), trivial_grading(Z2, [np.eye(1)])
    )
    one = trivial_grading(Z2, [np.eye(1)])
    d = delta_grading(Z2)
    chi = Bicharacter.trivial(Z2, Z2)
    x1 = build_via_heisenberg(two, d, chi)
    x2 = build_via_heisenberg(one, d, chi)
    # project onto the first summand
    f = graded_morphism(two, one, [b[:1, :1] for b in two.ambient.basis])
    ident = graded_morphism(d, d, list(d.ambient.basis))
    pm = functor_map(f, ident, x1, x2)
    assert pm.report["passed"]
    assert not pm.report["injective"] and pm.report["surjective"]
    assert pm.report["injectivity_matches"] and pm.report["surjectivity_matches"]


def test_functor_rejects_uncertified_morphism():
    x = golden_m2()
    c = x.c_graded
    bad = graded_morphism(c, c, [np.eye(2) / np.sqrt(2), 3 * SX])
    ident = graded_morphism(c, c, list(c.ambient.basis))
    with pytest.raises(ValueError):
        functor_map(bad, ident, x, x)


# ---------------------------------------------------------------------------
# regrading along group homomorphisms


def test_reparametrize_identity_homs():
    c, d = delta_grading(Z2), delta_grading(Z2)
    ident = GroupHom(Z2, Z2, ((1,),))
    xa, xb, pm = qgr_morphism_reparametrize(c, d, ident, ident, CHI2)
    assert pm is not None and pm.report["passed"]
    assert xa.dim == xb.dim == 4


def test_reparametrize_quotient():
    c, d = delta_grading(Z4), delta_grading(Z4)
    q = GroupHom(Z4, Z2, ((1,),))
    xa, xb, pm = qgr_morphism_reparametrize(c, d, q, q, CHI2)
    # pulled-back twist is (-1)^{gh} on Z/4 x Z/4
    assert xa.chi.value((1,), (1,)) == pytest.approx(-1.0)
    assert xa.dim == xb.dim == 16
    assert pm is not None and pm.report["passed"]


def test_reparametrize_reduce_to_regular():
    chi = CHI3
    c, d = delta_grading(Z3), delta_grading(Z3)
    ident = GroupHom(Z3, Z3, ((1,),))
    g = hom_h_to_dual_g(chi)
    reg = regular_bicharacter(Z3)
    assert pullback(reg, ident, g).exponents == chi.exponents
    xa, xb, pm = qgr_morphism_reparametrize(c, d, ident, g, reg)
    assert pm is not None and pm.report["passed"]
    assert xb.chi is reg


def test_reparametrize_rejects_mismatched_homs():
    c, d = delta_grading(Z2), delta_grading(Z2)
    with pytest.raises(ValueError):
        qgr_morphism_reparametrize(c, d, GroupHom(Z4, Z2, ((1,),)), GroupHom(Z2, Z2, ((1,),)), CHI2)
