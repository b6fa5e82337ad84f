import numpy as np
import pytest

from circulant_manifold.connection import (christoffel_closed,
                                           christoffel_generic,
                                           covariant_derivative_02,
                                           covariant_derivative_11,
                                           metric_partials)
from circulant_manifold.corpus import builtin
from circulant_manifold.fundamental import f_closed
from circulant_manifold.manifold import (ASSOCIATED_PATTERN, METRIC_PATTERN,
                                         PointJetBundle, bundle_at, metric_at,
                                         p_matrix, parse_metric, q_matrix,
                                         relative_deviation)

from conftest import random_bundle

CONSTANT = parse_metric("A = 5\nB = 1\nC = 3")
P0 = (0.3, -1.0, 2.0, 0.5)


def _christoffel_by_differences(spec, p, h=1e-5):
    """Gamma from a metric sampled with central differences, no jets involved."""
    from circulant_manifold.expr import eval_expr

    def g_at(q):
        vals = [eval_expr(spec.coefficient(c), q) for c in "ABC"]
        return np.asarray(vals)[METRIC_PATTERN]

    dg = np.empty((4, 4, 4))
    for i in range(4):
        up = list(p)
        dn = list(p)
        up[i] += h
        dn[i] -= h
        dg[i] = (g_at(up) - g_at(dn)) / (2 * h)
    ginv = np.linalg.inv(g_at(p))
    gamma = np.empty((4, 4, 4))
    for k in range(4):
        for i in range(4):
            for j in range(4):
                gamma[k, i, j] = 0.5 * sum(ginv[k, a] * (dg[i, a, j] + dg[j, a, i] - dg[a, i, j])
                                           for a in range(4))
    return gamma


def test_metric_partials_constant():
    assert not metric_partials(CONSTANT, P0).any()


def test_metric_partials_w0():
    dg = metric_partials(builtin("w0"), (2, 3, 4, 5))
    assert dg[0, 0, 0] == 4.0  # A_1 = 2 x1
    assert np.array_equal(dg, dg.transpose(0, 2, 1))
    # d_3 g_13 = C_3 = 2 x1
    assert dg[2, 0, 2] == 4.0


def test_constant_coefficients_flat():
    assert not christoffel_generic(CONSTANT, P0).gamma.any()
    assert not christoffel_closed(CONSTANT, P0).gamma.any()


def test_generic_matches_finite_differences():
    spec = builtin("w2")
    p = (0.3, 0.2, 0.1, 0.15)
    fd = _christoffel_by_differences(spec, p)
    assert relative_deviation(christoffel_generic(spec, p).gamma, fd) < 1e-8


def test_lower_symmetry():
    rng = np.random.default_rng(7)
    for _ in range(20):
        b = random_bundle(rng)
        for G in (christoffel_generic(b).gamma, christoffel_closed(b).gamma):
            assert np.array_equal(G, G.transpose(0, 2, 1))


def test_closed_matches_generic_random_jets():
    rng = np.random.default_rng(11)
    for _ in range(200):
        b = random_bundle(rng)
        assert relative_deviation(christoffel_closed(b).gamma,
                                  christoffel_generic(b).gamma) < 1e-12


def test_closed_matches_generic_corpus(corpus_bundles):
    for bundles in corpus_bundles.values():
        for b in bundles:
            assert relative_deviation(christoffel_closed(b).gamma,
                                      christoffel_generic(b).gamma) <= 1e-9


def test_symbol_accessor_is_one_based():
    b = bundle_at(builtin("w0"), (2, 3, 4, 5))
    G = christoffel_generic(b)
    assert G.symbol(1, 2, 3) == G.gamma[0, 1, 2]


def test_metric_compatibility(corpus_bundles):
    for bundles in corpus_bundles.values():
        for b in bundles:
            nabla_g = covariant_derivative_02(METRIC_PATTERN, b)
            scale = 1 + np.max(np.abs(metric_partials(b)))
            assert np.max(np.abs(nabla_g)) <= 1e-10 * scale


def test_associated_metric_parallel_on_w0():
    spec = builtin("w0")
    for p in [(2, 3, 4, 5), (1.5, 4.0, 3.2, 1.2)]:
        assert np.max(np.abs(covariant_derivative_02(ASSOCIATED_PATTERN, spec, p))) < 1e-10


def test_associated_metric_derivative_matches_closed_f_on_w6bar():
    spec = builtin("w6bar")
    for p in [(1, 1, 1, 1), (0.3, 2.0, 0.7, 1.1)]:
        b = bundle_at(spec, p)
        assert relative_deviation(covariant_derivative_02(ASSOCIATED_PATTERN, b),
                                  f_closed(b).F) < 1e-9


def test_nabla_q_nonzero_on_w0():
    nq = covariant_derivative_11(q_matrix(), builtin("w0"), (2, 3, 4, 5))
    assert np.max(np.abs(nq)) > 1e-3


def test_nabla_p_zero_on_w0():
    b = bundle_at(builtin("w0"), (2, 3, 4, 5))
    assert np.max(np.abs(covariant_derivative_11(p_matrix(), b))) < 1e-10


def test_nabla_p_lowered_is_f(corpus_bundles):
    for bundles in corpus_bundles.values():
        for b in bundles:
            lowered = np.einsum("ija,ak->ijk", covariant_derivative_11(p_matrix(), b), metric_at(b))
            assert relative_deviation(lowered, f_closed(b).F) <= 1e-9


def test_covariant_derivative_11_nonconstant_term():
    b = random_bundle(np.random.default_rng(0))
    dS = np.random.default_rng(1).normal(size=(4, 4, 4))
    base = covariant_derivative_11(np.eye(4), b)
    # identity is parallel for any connection
    assert np.max(np.abs(base)) < 1e-14
    assert np.allclose(covariant_derivative_11(np.eye(4), b, dS=dS), dS)


def test_requires_point_with_spec():
    with pytest.raises(TypeError):
        christoffel_generic(builtin("w0"))


def test_bundle_from_arrays_roundtrip():
    b = PointJetBundle.from_arrays([5, 1, 3], np.arange(12.0).reshape(3, 4))
    assert b.d("B", 3) == 6.0
