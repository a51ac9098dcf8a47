import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from equipart.algebra import FScalar, fmul
from equipart.averages import (
    AverageReport,
    CheckError,
    character_sums,
    check_coset,
    check_full_equipartition,
    check_mod_k,
    check_opposite_pairs,
    coset_average,
    g_average,
    zm_average,
)
from equipart.groups import (
    binary_dihedral,
    binary_polyhedral,
    cosets,
    cyclic,
    cyclic_automorphism,
    identity_automorphism,
    validate_automorphism,
)
from equipart.measures import RegionMeasures


def rm_of(G, values):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = np.column_stack([values] + [np.zeros_like(values)] * (G.d - 1))
    return RegionMeasures(G, values, np.zeros(G.d))


def test_constant_values_average_to_zero():
    for G in (cyclic(3), binary_dihedral(2), binary_polyhedral("I*")):
        avg = g_average(rm_of(G, np.full(G.order, 2.5)), identity_automorphism(G))
        assert avg.norm() <= 1e-12


def test_c2_average_is_difference():
    G = cyclic(2, "R")
    assert g_average(rm_of(G, [3.0, 1.25]), identity_automorphism(G)).real == 1.75


def test_identity_term_only():
    G = cyclic(3)
    assert g_average(rm_of(G, [1, 0, 0]), identity_automorphism(G)).isclose(FScalar.one("C"))


def test_zm_examples():
    assert zm_average(rm_of(cyclic(4), [1, 1, 1, 1]), 1).norm() <= 1e-15
    assert zm_average(rm_of(cyclic(2), [5, 2]), 1).isclose(FScalar.of("C", 3))
    assert zm_average(rm_of(cyclic(3), [2, 1, 1]), 1).isclose(FScalar.one("C"), tol=1e-15)
    with pytest.raises(ValueError):
        zm_average(rm_of(cyclic(4), [1, 2, 3, 4]), 2)


def test_zm_matches_complex_formula(rng):
    for m in (3, 5, 7, 8):
        vals = rng.standard_normal((m, 2))
        G = cyclic(m)
        for r in range(1, m):
            if math.gcd(r, m) != 1:
                continue
            want = sum(cmath.exp(-2j * math.pi * r * k / m) * complex(*vals[k]) for k in range(m))
            got = zm_average(rm_of(G, vals), r)
            assert abs(complex(*got.coords) - want) <= 1e-12


def test_quaternion_average_multiplies_on_the_left(rng):
    G = binary_dihedral(2)
    vals = rng.standard_normal((8, 4))
    phi = identity_automorphism(G)
    want = sum(fmul(G.elements[G.inv(g)], vals[g]) for g in range(8))
    np.testing.assert_allclose(g_average(rm_of(G, vals), phi).array, want, atol=1e-13)
    wrong = sum(fmul(vals[g], G.elements[G.inv(g)]) for g in range(8))
    assert np.abs(want - wrong).max() > 1e-3


@given(st.floats(-5, 5), st.integers(0, 10**6))
def test_average_is_linear_in_real_scalars(alpha, seed):
    rng = np.random.default_rng(seed)
    G = binary_polyhedral("T*")
    a, b = rm_of(G, rng.standard_normal((24, 4))), rm_of(G, rng.standard_normal((24, 4)))
    phi = identity_automorphism(G)
    lhs = g_average(a + b.scaled(alpha), phi)
    rhs = g_average(a, phi) + g_average(b, phi).array * alpha
    assert lhs.isclose(rhs, tol=1e-11)


def test_group_mismatch_rejected():
    with pytest.raises(CheckError):
        g_average(rm_of(cyclic(3), [1, 2, 3]), identity_automorphism(cyclic(3)))


def test_coset_examples():
    C6 = cyclic(6)
    dec = cosets(C6, [0, 2, 4])
    H = dec.subgroup
    avgs = coset_average(rm_of(C6, [1, 5, 1, 5, 1, 5]), dec, [identity_automorphism(H)] * 2)
    assert all(a.norm() <= 1e-14 for a in avgs)
    C4 = cyclic(4)
    dec4 = cosets(C4, [0, 2])
    avgs = coset_average(rm_of(C4, [1, 2, 3, 4]), dec4, [identity_automorphism(dec4.subgroup)] * 2)
    assert [a.real for a in avgs] == [-2.0, -2.0]


def test_coset_with_whole_group_is_g_average(rng):
    for G in (cyclic(5), binary_polyhedral("T*")):
        dec = cosets(G, range(G.order))
        vals = rm_of(G, rng.standard_normal((G.order, G.d)))
        for r in (1, 2) if G.kind == "cyclic" else (1,):
            phi_G = cyclic_automorphism(G, r) if G.kind == "cyclic" else identity_automorphism(G)
            phi_H = type(phi_G)(dec.subgroup, phi_G.perm)
            assert coset_average(vals, dec, [phi_H])[0].isclose(g_average(vals, phi_G), tol=1e-13)


def test_coset_requires_one_automorphism_per_coset():
    C4 = cyclic(4)
    dec = cosets(C4, [0, 2])
    with pytest.raises(CheckError):
        coset_average(rm_of(C4, [1, 2, 3, 4]), dec, [identity_automorphism(dec.subgroup)])


def test_full_equipartition_examples():
    G3 = cyclic(3)
    assert check_full_equipartition([rm_of(G3, [2, 2, 2])], tau=1e-15).passed
    res = check_full_equipartition([rm_of(G3, [1, 1, 0])], tau=1e-6)
    assert not res.passed and res.max_deviation == pytest.approx(2 / 3)
    with pytest.raises(CheckError):
        check_full_equipartition([rm_of(G3, [[1, 1], [0, 0], [0, 0]])])


def _constraint_matrix(p):
    k = np.arange(p)
    r = np.arange(1, (p - 1) // 2 + 1)[:, None]
    ang = 2 * np.pi * r * k / p
    return np.vstack([np.cos(ang), np.sin(ang)])


@pytest.mark.parametrize("p", [3, 5, 7])
def test_dft_inversion(p, rng):
    G = cyclic(p)
    A = _constraint_matrix(p)
    P = np.eye(p) - np.linalg.pinv(A) @ A
    for _ in range(200):
        v = P @ rng.standard_normal(p)
        rm = rm_of(G, v)
        for r in range(1, (p - 1) // 2 + 1):
            assert zm_average(rm, r).norm() <= 1e-12
        assert np.abs(character_sums(v, p)).max() <= 1e-12
        assert check_full_equipartition([rm], tau=1e-10 * np.linalg.norm(v) + 1e-15).passed


def test_mod_k_examples():
    G6 = cyclic(6)
    assert check_mod_k([rm_of(G6, [1, 2, 1, 2, 1, 2])], 2, tau=0).passed
    res = check_mod_k([rm_of(cyclic(4), [1, 2, 3, 4])], 2, tau=1e-6)
    assert not res.passed and set(res.deviations) == {2.0}
    assert check_mod_k([rm_of(cyclic(4), [3, 7, 3, 7])], 2, tau=0).passed
    with pytest.raises(CheckError):
        check_mod_k([rm_of(cyclic(4), [1, 2, 3, 4])], 3)


def test_opposite_pairs_examples():
    Q = binary_dihedral(2)
    sym = np.zeros(8)
    for g in range(8):
        sym[g] = 1 + min(g, Q.negation[g])
    assert check_opposite_pairs([rm_of(Q, sym)], tau=0).passed
    bad = np.zeros(8)
    bad[Q.index_of([0, 1, 0, 0])] = 1
    res = check_opposite_pairs([rm_of(Q, bad)], tau=1e-6)
    assert not res.passed and res.max_deviation == 1.0
    T = binary_polyhedral("T*")
    assert check_opposite_pairs([rm_of(T, np.ones(24))], tau=0).passed
    with pytest.raises(CheckError):
        check_opposite_pairs([rm_of(cyclic(3), [1, 1, 1])])


def test_q8_average_zero_forces_opposite_equality(rng):
    """For real values, the Q8 average vanishes exactly when opposite regions agree."""
    Q = binary_dihedral(2)
    for _ in range(50):
        vals = rng.standard_normal(8)
        vals = vals + vals[Q.negation]
        avg = g_average(rm_of(Q, vals), identity_automorphism(Q))
        assert avg.norm() <= 1e-12
    vals = rng.standard_normal(8)
    assert g_average(rm_of(Q, vals), identity_automorphism(Q)).norm() > 1e-3


def test_check_coset_covers_every_coset():
    Q = binary_dihedral(2)
    dec = cosets(Q, [0, Q.minus_one])
    H = dec.subgroup
    phi = validate_automorphism(H, [0, 1])
    vals = rm_of(Q, np.ones(8))
    res = check_coset([vals], dec, [[phi] * dec.k], tau=1e-12)
    assert res.passed and len(res.deviations) == 4


def test_report_aggregate():
    rep = AverageReport((FScalar.of("C", 3), FScalar.of("C", 4j)), ("a", "b"))
    assert rep.aggregate == 5.0 and rep.residuals == (3.0, 4.0)
    assert rep.to_json()["aggregate"] == 5.0
