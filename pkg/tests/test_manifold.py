import numpy as np
import pytest

from circulant_manifold.corpus import builtin
from circulant_manifold.errors import DomainViolation, MetricFileError
from circulant_manifold.manifold import (ASSOCIATED_PATTERN, associated_metric_at,
                                         bundle_at, inverse_closed,
                                         inverse_data, load_metric, metric_at,
                                         p_matrix, parse_box, parse_metric,
                                         q_matrix, relative_deviation)

I4 = np.eye(4)


def test_q_rows():
    Q = q_matrix()
    assert Q[0].tolist() == [0, 1, 0, 0]
    assert Q.tolist() == [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]]


def test_q_fourth_power_identity():
    Q = q_matrix()
    assert np.array_equal(np.linalg.matrix_power(Q, 4), I4)
    Q2 = Q @ Q
    assert not np.array_equal(Q2, I4) and not np.array_equal(Q2, -I4)


def test_p_is_q_squared():
    P = p_matrix()
    assert np.array_equal(P, q_matrix() @ q_matrix())
    assert P.tolist() == [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    assert np.array_equal(P @ P, I4)
    assert np.trace(P) == 0


def test_bundle_w0_values():
    b = bundle_at(builtin("w0"), (2, 3, 4, 5))
    assert (b.A.value, b.B.value, b.C.value) == (54.0, 14.0, 46.0)
    assert b.d("A", 1) == 4.0  # A_1 = 2 x1


def test_bundle_rejects_equal_a_and_c():
    # (2,2,2,2) is inside x^i > 1 but A = C = 16
    with pytest.raises(DomainViolation, match="A > C violated"):
        bundle_at(builtin("w0"), (2, 2, 2, 2))


def test_bundle_rejects_point_outside_domain():
    with pytest.raises(DomainViolation, match="1 < x1"):
        bundle_at(builtin("w0"), (0.5, 3, 4, 5))


def test_bundle_w6bar_values():
    b = bundle_at(builtin("w6bar", {"a": 3, "b": 1, "c": 2}), (1, 1, 1, 1))
    assert (b.A.value, b.B.value, b.C.value) == (12.0, 4.0, 8.0)


def test_metric_and_associated_rows():
    b = bundle_at(builtin("w0"), (2, 3, 4, 5))
    g = metric_at(b)
    gt = associated_metric_at(b)
    assert g[0].tolist() == [54, 14, 46, 14]
    assert g.tolist() == [[54, 14, 46, 14], [14, 54, 14, 46], [46, 14, 54, 14], [14, 46, 14, 54]]
    assert gt[0].tolist() == [46, 14, 54, 14]
    assert np.array_equal(gt, g @ p_matrix())
    assert np.array_equal(gt, p_matrix().T @ g)
    assert np.array_equal(gt, gt.T)
    assert ASSOCIATED_PATTERN.tolist() == [[2, 1, 0, 1], [1, 2, 1, 0], [0, 1, 2, 1], [1, 0, 1, 2]]


def test_metric_invariant_under_q():
    g = metric_at(bundle_at(builtin("w0"), (2, 3, 4, 5)))
    Q = q_matrix()
    assert np.array_equal(Q.T @ g @ Q, g)


def test_leading_minors_positive():
    g = metric_at(bundle_at(builtin("w0"), (2, 3, 4, 5)))
    minors = [np.linalg.det(g[:k, :k]) for k in range(1, 5)]
    assert all(m > 0 for m in minors)
    # hand values: 54, 54^2 - 14^2
    assert minors[0] == pytest.approx(54)
    assert minors[1] == pytest.approx(54 ** 2 - 14 ** 2)
    # circulant eigenvalues A+2B+C, A-C (twice), A-2B+C give det g = (A - C) * D
    assert minors[3] == pytest.approx(8 * 73728)


def test_inverse_data_hand_values():
    b = bundle_at(builtin("w0"), (2, 3, 4, 5))
    inv = inverse_data(b)
    assert (inv.Abar, inv.Bbar, inv.Cbar, inv.D) == (5008.0, -112.0, -4208.0, 73728.0)


def test_inverse_closed_is_inverse():
    b = bundle_at(builtin("w0"), (2, 3, 4, 5))
    ginv, _ = inverse_closed(b)
    g = metric_at(b)
    assert np.max(np.abs(g @ ginv - I4)) < 1e-12
    assert relative_deviation(ginv, np.linalg.inv(g)) < 1e-10


def test_invariants_over_corpus(corpus_bundles):
    Q, P = q_matrix(), p_matrix()
    for bundles in corpus_bundles.values():
        for b in bundles:
            g = metric_at(b)
            tol = 1e-10 * (1 + np.max(np.abs(g)))
            assert np.max(np.abs(Q.T @ g @ Q - g)) <= tol
            assert np.max(np.abs(P.T @ g @ P - g)) <= tol
            ginv, inv = inverse_closed(b)
            assert np.max(np.abs(g @ ginv - I4)) <= 1e-10
            assert inv.D > 0
            gt = associated_metric_at(b)
            assert np.array_equal(gt, g @ P) and np.array_equal(gt, P.T @ g)


def test_parse_metric_file(tmp_path):
    text = """
    # comment
    const a = 2
    const b = a / 4   # constant expressions allowed
    A = a*x1
    B = b
    C = 1
    domain: x1 > 1
    domain: 0 < x2 < 1
    box: 1:3 0:1 0:1 0:1
    """
    path = tmp_path / "m.mspec"
    path.write_text(text)
    spec = load_metric(path)
    assert spec.name == "m"
    assert spec.constants == {"a": 2.0, "b": 0.5}
    assert len(spec.domain) == 3
    assert spec.box == ((1, 3), (0, 1), (0, 1), (0, 1))
    assert spec.with_constants({"a": 5}).constants == {"a": 5.0, "b": 1.25}


@pytest.mark.parametrize("text, match", [
    ("A = x1\nB = 1", "missing coefficient"),
    ("A = x1\nA = x2\nB = 1\nC = 1", "defined twice"),
    ("A = x1 +\nB = 1\nC = 1", "offset"),
    ("A = x1\nB = 1\nC = q", "unknown identifier"),
    ("A = x1\nB = 1\nC = 1\nfoo bar", "line 4"),
    ("const a = x1\nA = a\nB = 1\nC = 1", "depends on coordinates"),
    ("A = x1\nB = 1\nC = 1\ndomain: x1 + 1", "line 4"),
])
def test_parse_metric_errors(text, match):
    with pytest.raises(MetricFileError, match=match):
        parse_metric(text)


def test_unknown_override_rejected():
    with pytest.raises(MetricFileError, match="unknown constant"):
        builtin("w0", {"a": 1})


def test_missing_file():
    with pytest.raises(MetricFileError, match="cannot read"):
        load_metric("does/not/exist.mspec")


def test_parse_box():
    assert parse_box("0:1") == ((0, 1),) * 4
    with pytest.raises(ValueError):
        parse_box("1:0")
    with pytest.raises(ValueError):
        parse_box(["0:1", "0:1"])
