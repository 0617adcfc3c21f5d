import math

import numpy as np
import pytest
from scipy.integrate import quad

from riesz_multipliers.errors import SizeCapError
from riesz_multipliers.frame import (
    BasisMatrix,
    as_unit_vector,
    build_basis,
    evaluate_component_rotated,
    row_pair_sum,
    tprime_component,
)
from riesz_multipliers.montecarlo import (
    SamplerKind,
    estimate_from_points,
    sample_sphere,
)
from riesz_multipliers.multiplier import KernelSpec, evaluate_component_direct
from riesz_multipliers.special_functions import count_c1, count_c2


def random_unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


# ------------------------------------------------------------- build_basis

def test_basis_canonical_direction():
    basis = build_basis(np.array([1.0, 0.0, 0.0]))
    r = basis.matrix
    assert np.array_equal(r[:, 0], [1.0, 0.0, 0.0])
    # a signed-permutation variant of the identity: one unit entry per row/column
    assert np.allclose(np.abs(r).sum(axis=0), 1.0, atol=1e-15)
    assert np.allclose(np.abs(r).sum(axis=1), 1.0, atol=1e-15)
    assert basis.orthonormality_defect() < 1e-12


def test_basis_reference_direction():
    xi = np.array([-0.0054, 0.1491, 0.9888])
    xi = xi / np.linalg.norm(xi)
    basis = build_basis(xi)
    assert basis.orthonormality_defect() < 1e-12
    assert np.array_equal(basis.matrix[:, 0], xi)


def test_basis_random_n5():
    rng = np.random.default_rng(11)
    xi = random_unit(rng, 5)
    r = build_basis(xi).matrix
    # oracle: direct matrix product
    assert np.abs(r.T @ r - np.eye(5)).max() < 1e-12


@pytest.mark.parametrize("n", range(2, 7))
def test_basis_fuzz(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(100):
        xi = random_unit(rng, n)
        basis = build_basis(xi)
        r = basis.matrix
        assert np.array_equal(r[:, 0], xi)
        assert basis.orthonormality_defect() < 1e-12
        if basis.pivot is None:
            # column k vanishes above row k-1 (0-based)
            for k in range(2, n):
                assert np.all(r[:k - 1, k] == 0.0)
        # dual pairing: row vectors of the inverse against columns
        assert np.abs(np.linalg.inv(r) @ r - np.eye(n)).max() < 1e-11


def test_basis_degenerate_directions():
    for xi in ([0.0, 1.0, 0.0], [0.6, 0.8, 0.0], [1.0, 0.0, 0.0, 0.0],
               [0.0, 1.0, 0.0, 0.0]):
        v = np.asarray(xi)
        basis = build_basis(v)
        assert basis.pivot is not None
        assert np.allclose(basis.matrix[:, 0], v, atol=1e-15)
        assert basis.orthonormality_defect() < 1e-12


def test_basis_rejects_non_unit():
    with pytest.raises(ValueError):
        build_basis(np.array([1.0, 1.0, 0.0]))
    with pytest.raises(ValueError):
        as_unit_vector(np.array([0.5, 0.5]))


# ----------------------------------------------------------- row_pair_sum

def test_row_pair_sum_canonical():
    basis = build_basis(np.array([1.0, 0.0, 0.0]))
    assert row_pair_sum(basis, 1, 1) == pytest.approx(0.0, abs=1e-15)
    assert row_pair_sum(basis, 1, 2) == pytest.approx(0.0, abs=1e-15)


def test_row_pair_sum_random():
    rng = np.random.default_rng(7)
    xi = random_unit(rng, 4)
    basis = build_basis(xi)
    # direct summation oracle
    manual = sum(basis.matrix[1, i] * basis.matrix[2, i] for i in range(1, 4))
    value = row_pair_sum(basis, 2, 3)
    assert value == pytest.approx(manual, abs=1e-15)
    assert value == pytest.approx(-xi[1] * xi[2], abs=1e-12)


@pytest.mark.parametrize("n", range(2, 7))
def test_row_pair_sum_identity_fuzz(n):
    rng = np.random.default_rng(200 + n)
    for _ in range(100):
        xi = random_unit(rng, n)
        basis = build_basis(xi)
        for p in range(1, n + 1):
            for q in range(p, n + 1):
                expected = -xi[p - 1] * xi[q - 1] + (1.0 if p == q else 0.0)
                assert row_pair_sum(basis, p, q) == pytest.approx(expected, abs=1e-12)


def test_row_pair_sum_range():
    basis = build_basis(np.array([0.0, 0.6, 0.8]))
    with pytest.raises(IndexError):
        row_pair_sum(basis, 0, 1)
    with pytest.raises(IndexError):
        row_pair_sum(basis, 1, 4)


# ------------------------------------------------------- rotated components

def tprime_quadrature_n3(a, s2, s3, kernel):
    """Iterated spherical quadrature oracle for n = 3 rotated components."""
    t = a + s2 + s3
    g = (lambda x: math.copysign(1.0, x)) if kernel == "sgn" \
        else (lambda x: -math.log(abs(x)))

    def inner(p1):
        c1, s1 = math.cos(p1), math.sin(p1)
        az = quad(lambda p2: (s1 * math.cos(p2)) ** s2 * (s1 * math.sin(p2)) ** s3,
                  0, 2 * math.pi, limit=200)[0]
        return c1 ** a * g(c1) * az * s1

    return quad(inner, 0, math.pi / 2, limit=200)[0] + \
        quad(inner, math.pi / 2, math.pi, limit=200)[0]


def test_tprime_odd_rest_multiplicity_is_zero():
    assert tprime_component(3, 4, {2: 3, 3: 1}, "neglog") == 0.0
    assert tprime_component(4, 5, {1: 2, 2: 2, 3: 1}, "sgn") == 0.0


def test_tprime_against_quadrature():
    cases = [(0, 2, 0, "neglog"), (2, 2, 0, "neglog"), (0, 2, 2, "neglog"),
             (1, 2, 2, "sgn"), (3, 2, 0, "sgn"), (1, 4, 0, "sgn")]
    for a, s2, s3, kernel in cases:
        t = a + s2 + s3
        mults = {1: a, 2: s2, 3: s3}
        expected = tprime_quadrature_n3(a, s2, s3, kernel)
        assert tprime_component(3, t, mults, kernel) == pytest.approx(expected, rel=1e-8)


def test_tprime_theorem_constancy():
    # T' C1/C2 depends only on (t, n) across all-even multiplicity layouts
    for n, t in [(3, 4), (4, 6), (5, 8)]:
        values = []
        for mults in _even_partitions(t, n - 1):
            counts = {j + 2: m for j, m in enumerate(mults)}
            tp = tprime_component(n, t, counts, "neglog")
            values.append(tp * count_c1(mults) / count_c2(mults))
        ref = values[0]
        assert all(v == pytest.approx(ref, rel=1e-12) for v in values)


def _even_partitions(t, max_parts):
    import itertools
    out = []
    for k in range(1, min(max_parts, t // 2) + 1):
        for combo in itertools.combinations_with_replacement(range(2, t + 1, 2), k):
            if sum(combo) == t:
                out.append(list(combo))
    return out


def test_tprime_mismatched_sum_raises():
    with pytest.raises(ValueError):
        tprime_component(3, 4, {1: 1, 2: 2}, "neglog")


def test_rotated_matches_direct():
    rng = np.random.default_rng(31)
    for n in (2, 3):
        for t in range(1, 5):
            kernel = "sgn" if t % 2 else "neglog"
            import itertools
            for rep in itertools.combinations_with_replacement(range(1, n + 1), t):
                spec = KernelSpec(n=n, component=rep, kernel=kernel)
                xi = random_unit(rng, n)
                a = evaluate_component_rotated(spec, xi).value
                b = evaluate_component_direct(spec, xi).value
                assert a == pytest.approx(b, abs=1e-10)


def test_rotated_parity_zero():
    spec = KernelSpec(n=3, component=(1, 2, 2), kernel="sgn")
    v = evaluate_component_rotated(spec, np.array([0.0, 0.0, 1.0]))
    assert v.value == pytest.approx(0.0, abs=1e-14)


def test_rotated_against_mc():
    # n = 2 component against the all-dimension Muller sampler
    spec = KernelSpec(n=2, component=(1, 2), kernel="neglog")
    rng = np.random.default_rng(5)
    xi = random_unit(rng, 2)
    points, weights = sample_sphere(SamplerKind.MC1_MULLER, 2, 10 ** 6, seed=3)
    est = estimate_from_points(points, weights, spec, xi)
    v = evaluate_component_rotated(spec, xi).value
    assert abs(v - est.mean) < 3 * est.std_error


def test_rotated_size_cap():
    spec = KernelSpec(n=3, component=(1,) * 12, kernel="neglog")
    with pytest.raises(SizeCapError):
        evaluate_component_rotated(spec, np.array([0.0, 0.0, 1.0]), max_terms=1000)


def test_basis_matrix_is_frozen_dataclass():
    basis = build_basis(np.array([0.0, 0.6, 0.8]))
    assert isinstance(basis, BasisMatrix)
    with pytest.raises(AttributeError):
        basis.n = 5
