import math

import numpy as np
import pytest

from isacrelay import (
    Alphabet,
    ConditionalKernel,
    JointDistribution,
    compose,
    conv,
    entropy,
    h2,
    h2_inverse,
    h3,
    mutual_information,
)
from isacrelay.errors import ConditioningError, DomainError, FactorizationError


# ---------------------------------------------------------------------------
# scalar helpers
# ---------------------------------------------------------------------------

def test_h2_endpoints_and_peak():
    assert h2(0.0) == 0.0
    assert h2(1.0) == 0.0
    assert h2(0.5) == 1.0
    assert h2(0.11) == pytest.approx(0.4999, abs=5e-4)


def test_h2_symmetric():
    for t in (0.1, 0.25, 0.37):
        assert h2(t) == pytest.approx(h2(1 - t), abs=1e-15)


@pytest.mark.parametrize("bad", [-0.1, 1.1, 2.0])
def test_h2_domain_error(bad):
    with pytest.raises(DomainError):
        h2(bad)


def test_h3_values():
    assert h3(0.2, 0.3) == pytest.approx(1.48548, abs=1e-5)
    assert h3(1.0, 0.0) == 0.0
    # collapses to h2 when one mass is zero
    assert h3(0.3, 0.0) == pytest.approx(h2(0.3), abs=1e-15)
    with pytest.raises(DomainError):
        h3(0.7, 0.4)
    with pytest.raises(DomainError):
        h3(-0.1, 0.5)


def test_conv():
    assert conv(0.0, 0.3) == pytest.approx(0.3)
    assert conv(0.5, 0.123) == pytest.approx(0.5)
    assert conv(0.2, 0.3) == pytest.approx(0.2 * 0.7 + 0.8 * 0.3)
    with pytest.raises(DomainError):
        conv(1.2, 0.3)


def test_h2_inverse_roundtrip():
    for t in (0.01, 0.11, 0.3):
        assert h2_inverse(h2(t)) == pytest.approx(min(t, 1 - t), abs=1e-10)
    assert h2_inverse(0.0) == pytest.approx(0.0, abs=1e-10)
    # the entropy curve is flat at 1/2, limiting attainable inverse accuracy
    assert h2_inverse(1.0) == pytest.approx(0.5, abs=1e-7)
    with pytest.raises(DomainError):
        h2_inverse(1.5)


# ---------------------------------------------------------------------------
# labeled tensors
# ---------------------------------------------------------------------------

def _pair_joint():
    a, b = Alphabet("a", 2), Alphabet("b", 3)
    probs = np.array([[0.1, 0.2, 0.3], [0.15, 0.05, 0.2]])
    return JointDistribution([a, b], probs)


def test_joint_validation():
    a = Alphabet("a", 2)
    with pytest.raises(ValueError):
        JointDistribution([a], [0.3, 0.3])          # not normalized
    with pytest.raises(ValueError):
        JointDistribution([a], [[0.5, 0.5]])        # wrong shape
    with pytest.raises(ValueError):
        JointDistribution([a], [1.5, -0.5])         # negative mass
    with pytest.raises(FactorizationError):
        JointDistribution([a, a], np.full((2, 2), 0.25))
    with pytest.raises(DomainError):
        Alphabet("z", 0)


def test_joint_is_immutable():
    j = _pair_joint()
    with pytest.raises(AttributeError):
        j.probs = None
    with pytest.raises(ValueError):
        j.probs[0, 0] = 1.0  # read-only buffer


def test_marginalize_keeps_order_and_mass():
    j = _pair_joint()
    mb = j.marginalize("b")
    assert mb.names == ("b",)
    np.testing.assert_allclose(mb.probs, [0.25, 0.25, 0.5])
    # keep order follows self, not the request
    both = j.marginalize(("b", "a"))
    assert both.names == ("a", "b")
    with pytest.raises(NameError):
        j.marginalize("zz")


def test_condition():
    j = _pair_joint()
    c = j.condition({"a": 0})
    assert c.names == ("b",)
    np.testing.assert_allclose(c.probs, np.array([0.1, 0.2, 0.3]) / 0.6)
    with pytest.raises(DomainError):
        j.condition({"b": 7})
    zero = JointDistribution([Alphabet("a", 2), Alphabet("b", 2)],
                             [[0.5, 0.5], [0.0, 0.0]])
    with pytest.raises(ConditioningError):
        zero.condition({"a": 1})


def test_tensor_transpose():
    j = _pair_joint()
    np.testing.assert_array_equal(j.tensor(("b", "a")), j.probs.T)
    with pytest.raises(NameError):
        j.tensor(("a",))


def test_split_variable_row_major():
    ab = Alphabet("ab", 4)
    c = Alphabet("c", 2)
    probs = np.arange(8, dtype=float).reshape(4, 2)
    probs /= probs.sum()
    j = JointDistribution([ab, c], probs)
    hi, lo = Alphabet("hi", 2), Alphabet("lo", 2)
    s = j.split_variable("ab", [hi, lo])
    assert s.names == ("hi", "lo", "c")
    # composite index ab = hi*2 + lo
    np.testing.assert_array_equal(s.tensor(("hi", "lo", "c")).reshape(4, 2),
                                  j.probs)
    with pytest.raises(ValueError):
        j.split_variable("ab", [hi, Alphabet("lo", 3)])


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------

def test_compose_chain():
    a, b = Alphabet("a", 2), Alphabet("b", 2)
    pa = JointDistribution([a], [0.25, 0.75])
    k = ConditionalKernel([a], [b], [[0.9, 0.1], [0.2, 0.8]])
    j = compose([pa, k])
    assert set(j.names) == {"a", "b"}
    np.testing.assert_allclose(j.tensor(("a", "b")),
                               [[0.225, 0.025], [0.15, 0.6]])


def test_compose_errors():
    a, b = Alphabet("a", 2), Alphabet("b", 2)
    pa = JointDistribution([a], [0.25, 0.75])
    k = ConditionalKernel([a], [b], [[0.9, 0.1], [0.2, 0.8]])
    dangling = ConditionalKernel([Alphabet("z", 2)], [Alphabet("w", 2)],
                                 np.full((2, 2), 0.5))
    with pytest.raises(FactorizationError):
        compose([pa, k, dangling])
    with pytest.raises(FactorizationError):
        compose([pa, pa])  # duplicate output


# ---------------------------------------------------------------------------
# entropy / mutual information
# ---------------------------------------------------------------------------

def test_entropy_of_uniform():
    a = Alphabet("a", 8)
    j = JointDistribution([a], np.full(8, 0.125))
    assert entropy(j, "a") == pytest.approx(3.0, abs=1e-12)


def test_conditional_entropy_chain():
    j = _pair_joint()
    lhs = entropy(j, ("a", "b"))
    rhs = entropy(j, "a") + entropy(j, "b", given="a")
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_bsc_mutual_information():
    """I(X;Y) of a binary symmetric channel with uniform input is 1 - h2(p)."""
    x, y = Alphabet("x", 2), Alphabet("y", 2)
    p = 0.11
    j = JointDistribution([x, y], np.array([[1 - p, p], [p, 1 - p]]) / 2)
    assert mutual_information(j, "x", "y") == pytest.approx(1 - h2(p), abs=1e-12)


def test_mi_independent_is_zero():
    j = JointDistribution([Alphabet("x", 3), Alphabet("y", 2)],
                          np.outer([0.2, 0.3, 0.5], [0.4, 0.6]))
    assert mutual_information(j, "x", "y") == pytest.approx(0.0, abs=1e-12)


def test_mi_symmetry_and_grouping():
    rng = np.random.default_rng(7)
    sizes = (2, 3, 2, 2)
    vs = [Alphabet(n, s) for n, s in zip("abcd", sizes)]
    j = JointDistribution(vs, rng.dirichlet(np.ones(math.prod(sizes))).reshape(sizes))
    assert mutual_information(j, "a", ("b", "c"), "d") == pytest.approx(
        mutual_information(j, ("b", "c"), "a", "d"), abs=1e-12)
    with pytest.raises(NameError):
        mutual_information(j, "a", "a")
