import math

import numpy as np
import pytest

from opucsum import inequalities as ineq
from opucsum.verblunsky import VerblunskySequence, power_sequence, test_sequence as make_test_sequence


def test_telescope_k1_equality():
    c = ineq.check_telescope_product([0.3 + 0.1j], [-0.2j])
    assert c.lhs == pytest.approx(c.rhs, rel=1e-15) and c.ok


def test_telescope_equal_inputs():
    z = [0.5, 0.1j, -0.7]
    assert ineq.check_telescope_product(z, z) == (0.0, 0.0, True)


def test_telescope_length_mismatch():
    with pytest.raises(ValueError):
        ineq.check_telescope_product([0.1, 0.2], [0.1])


def test_inputs_must_lie_in_disk():
    with pytest.raises(ValueError):
        ineq.check_power_mean([0.5, 1.0])


def test_power_mean_equal_and_k1():
    c = ineq.check_power_mean([0.4j] * 4)
    assert c.lhs == pytest.approx(0.0, abs=1e-16) and c.ok
    assert ineq.check_power_mean([0.7 - 0.2j]) == (0.0, 0.0, True)


def test_power_mean_known_value():
    # k = 2: |(z^2 + w^2)/2 - z w| = |z - w|^2 / 2
    z, w = 0.5, -0.1 + 0.3j
    c = ineq.check_power_mean([z, w])
    assert c.lhs == pytest.approx(abs(z - w) ** 2 / 2, rel=1e-14)
    assert c.rhs == pytest.approx(abs(z - w) ** 2, rel=1e-14)


def test_random_disk_has_adversarial_points(rng):
    z = ineq.random_disk(rng, 10**4)
    assert np.all(np.abs(z) < 1)
    assert np.count_nonzero(np.abs(z) == ineq.NEAR_BOUNDARY) > 500


def test_suites_small(rng):
    assert ineq.telescope_suite(rng, 5000).passed
    assert ineq.power_mean_suite(rng, 5000).passed


def test_suite_records_violations(rng, monkeypatch):
    # a bound that is deliberately too small must be caught and serialised
    monkeypatch.setattr(ineq, "telescope_product_batch", lambda z, zp: (np.ones(len(z)), np.zeros(len(z))))
    res = ineq.telescope_suite(rng, 10, k_max=2)
    assert res.violations == 10 and not res.passed and res.replay


def test_tuplespec_validation():
    with pytest.raises(ValueError):
        ineq.TupleSpec(2, 3, (0,) * 6)
    with pytest.raises(ValueError):
        ineq.TupleSpec(2, 1, (0, 3))
    with pytest.raises(ValueError):
        ineq.TupleSpec(2, 2, (0, 1))


def test_tuplespec_random(rng):
    for _ in range(100):
        s = ineq.TupleSpec.random(rng, 4)
        assert 1 <= s.k <= s.l <= 4 and len(s.t) == 2 * s.k


def test_product_constant_tuple_k1():
    out = ineq.check_product_comparison(make_test_sequence(1, 500), ineq.TupleSpec(1, 1, (0, 0)), 500)
    assert out.lhs == 0.0 and out.all_ok


def test_product_k1_reduces_to_half_squared_increments():
    seq = power_sequence(0.7, 0.8, 300)
    out = ineq.check_product_comparison(seq, ineq.TupleSpec(3, 1, (0, 2)), 300)
    a = seq.padded(305)
    expected = 0.5 * sum(abs(a[n] - a[n + 2]) ** 2 for n in range(300))
    assert out.lhs == pytest.approx(expected, rel=1e-12)
    assert out.all_ok


def test_product_general(rng):
    seq = make_test_sequence(1, 10**4)
    for _ in range(30):
        out = ineq.check_product_comparison(seq, ineq.TupleSpec.random(rng, 4), 10**4)
        assert out.all_ok, out


def test_product_telescoping_closed_form():
    seq = VerblunskySequence([0.5, 0.25j, -0.125])
    out = ineq.check_product_comparison(seq, ineq.TupleSpec(2, 2, (0, 2, 1, 1)), 3)
    assert out.telescope.ok
    assert out.telescope.lhs < 1e-15


def test_product_suite_small(rng):
    assert ineq.product_suite(rng, 20, N=2000).passed


def test_replay_csv(tmp_path):
    res = ineq.SuiteResult("x", 1, 1, ineq._rows("x", 2, {"z": np.array([0.1 + 0.2j])}))
    path = ineq.write_replay_csv([res], tmp_path / "r.csv")
    assert path.read_text().splitlines() == ["suite,k,extra,field,index,re,im", "x,2,,z,0,0.1,0.2"]
