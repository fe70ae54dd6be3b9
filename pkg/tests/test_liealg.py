"""Tests for the family catalogue and bracket machinery."""

import numpy as np
import pytest

from mdlab.liealg import (
    FAMILIES,
    LieAlgebra,
    MD5Family,
    ParameterDomainError,
    ad_matrix,
    bracket,
    build_md5,
    derived_ideal,
    jacobi_residual,
    sample_family,
)

ALL_FAMILIES = list(FAMILIES)


def test_family_5_4_10_is_unipotent_jordan_block():
    blk = MD5Family("5_4_10").ad_block()
    expected = np.eye(4) + np.diag(np.ones(3), 1)
    assert np.array_equal(blk, expected)


def test_family_5_4_5_is_identity():
    assert np.array_equal(MD5Family("5_4_5").ad_block(), np.eye(4))


def test_family_5_4_14_pure_rotation_blocks():
    fam = MD5Family("5_4_14", {"lambda": 0.0, "mu": 1.0, "phi": np.pi / 2})
    blk = fam.ad_block()
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    expected = np.zeros((4, 4))
    expected[:2, :2] = j
    expected[2:, 2:] = j
    assert np.allclose(blk, expected, atol=1e-15)


def test_family_5_4_9_block_structure():
    blk = MD5Family("5_4_9", {"lambda": 2.5}).ad_block()
    expected = np.array([
        [2.5, 0, 0, 0],
        [0, 1, 1, 0],
        [0, 0, 1, 1],
        [0, 0, 0, 1],
    ], dtype=float)
    assert np.array_equal(blk, expected)


def test_family_5_4_13_rotation_plus_jordan():
    phi, lam = 1.1, -0.7
    blk = MD5Family("5_4_13", {"lambda": lam, "phi": phi}).ad_block()
    assert np.allclose(blk[:2, :2], [[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    assert np.array_equal(blk[2:, 2:], [[lam, 1.0], [0.0, lam]])
    assert np.all(blk[:2, 2:] == 0) and np.all(blk[2:, :2] == 0)


@pytest.mark.parametrize("fid,params,msg", [
    ("5_4_4", {"lambda": 1.0}, "lambda"),
    ("5_4_4", {"lambda": 0.0}, "lambda"),
    ("5_4_1", {"lambda1": 2.0, "lambda2": 2.0, "lambda3": 3.0}, "distinct"),
    ("5_4_11", {"lambda1": 1.0, "lambda2": 2.0, "phi": 0.0}, "phi"),
    ("5_4_11", {"lambda1": 1.0, "lambda2": 2.0, "phi": np.pi}, "phi"),
    ("5_4_14", {"lambda": 1.0, "mu": -1.0, "phi": 1.0}, "mu"),
    ("5_4_14", {"lambda": 1.0, "mu": 0.0, "phi": 1.0}, "mu"),
])
def test_parameter_domain_rejections(fid, params, msg):
    with pytest.raises(ParameterDomainError, match=msg):
        build_md5(fid, **params)


def test_missing_and_extra_parameters_rejected():
    with pytest.raises(ParameterDomainError, match="missing"):
        MD5Family("5_4_9", {})
    with pytest.raises(ParameterDomainError, match="unexpected"):
        MD5Family("5_4_5", {"lambda": 2.0})


def test_bracket_antisymmetry_and_self():
    alg = build_md5("5_4_8", **{"lambda": 3.0})
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y = rng.standard_normal(5), rng.standard_normal(5)
        assert np.allclose(bracket(alg, x, x), 0.0)
        assert np.allclose(bracket(alg, x, y), -bracket(alg, y, x))


def test_bracket_reads_off_matrix_columns():
    # Independent route: compare against a direct matrix-vector product.
    fam = MD5Family("5_4_6", {"lambda1": 2.0, "lambda2": -1.0})
    alg = build_md5(fam)
    e = np.eye(5)
    m = fam.ad_block()
    for j in range(4):
        expected = np.zeros(5)
        expected[1:] = m @ e[j + 1, 1:]
        assert np.allclose(bracket(alg, e[0], e[j + 1]), expected)
    # [X1, X4] = X4 and [X1, X5] = X4 + X5 for this family.
    assert np.allclose(bracket(alg, e[0], e[3]), [0, 0, 0, 1, 0])
    assert np.allclose(bracket(alg, e[0], e[4]), [0, 0, 0, 1, 1])


def test_derived_ideal_commutative_for_all_families():
    alg = build_md5("5_4_6", lambda1=2.0, lambda2=-1.0)
    e = np.eye(5)
    for i in range(1, 5):
        for j in range(1, 5):
            assert np.allclose(bracket(alg, e[i], e[j]), 0.0)


def test_jacobi_zero_for_catalogue_families():
    assert jacobi_residual(build_md5("5_4_8", **{"lambda": 2.0})) == 0.0
    assert jacobi_residual(build_md5("5_4_10")) == 0.0


def test_jacobi_positive_for_random_antisymmetric_tensor():
    rng = np.random.default_rng(7)
    c = rng.standard_normal((5, 5, 5))
    c = c - c.transpose(1, 0, 2)
    alg = LieAlgebra(c)
    assert jacobi_residual(alg) > 0.1


def test_derived_ideal_span_and_flag():
    alg = build_md5("5_4_1", lambda1=2.0, lambda2=3.0, lambda3=5.0)
    ideal = derived_ideal(alg)
    assert ideal.rank == 4
    assert ideal.commutative
    # Span equals span(X2..X5): no component along X1.
    assert np.abs(ideal.basis[:, 0]).max() < 1e-12


def test_derived_ideal_of_abelian_algebra_is_empty():
    alg = LieAlgebra(np.zeros((5, 5, 5)))
    ideal = derived_ideal(alg)
    assert ideal.rank == 0
    assert ideal.commutative


def test_derived_ideal_family_11():
    alg = build_md5("5_4_11", lambda1=1.0, lambda2=2.0, phi=np.pi / 3)
    ideal = derived_ideal(alg)
    assert ideal.rank == 4 and ideal.commutative


def test_ad_matrix_restriction_matches_block():
    fam = MD5Family("5_4_9", {"lambda": 4.0})
    alg = build_md5(fam)
    e = np.eye(5)
    ad1 = ad_matrix(alg, e[0])
    assert np.array_equal(ad1[1:, 1:], fam.ad_block())
    assert np.all(ad1[0, :] == 0) and np.all(ad1[:, 0] == 0)
    # ad of any derived-ideal element vanishes on the ideal.
    for i in range(1, 5):
        adx = ad_matrix(alg, e[i])
        assert np.all(adx[1:, 1:] == 0)


@pytest.mark.parametrize("fid", ALL_FAMILIES)
def test_random_parameter_draws_satisfy_invariants(fid):
    rng = np.random.default_rng(42)
    e = np.eye(5)
    for _ in range(100):
        fam = sample_family(fid, rng)
        alg = build_md5(fam)
        # Antisymmetry is exact by construction.
        assert np.array_equal(alg.sc, -alg.sc.transpose(1, 0, 2))
        assert jacobi_residual(alg) == 0.0
        ad1 = ad_matrix(alg, e[0])
        assert np.array_equal(ad1[1:, 1:], fam.ad_block())
        ideal = derived_ideal(alg)
        assert ideal.rank == 4 and ideal.commutative
        assert np.abs(ideal.basis[:, 0]).max() < 1e-12


def test_family_json_round_trip():
    fam = MD5Family("5_4_11", {"lambda1": 1.5, "lambda2": 2.5, "phi": 0.9})
    obj = fam.to_json()
    assert obj == {"family": "5_4_11", "params": {"lambda1": 1.5, "lambda2": 2.5, "phi": 0.9}}
    assert MD5Family.from_json(obj) == fam
