"""Property-based checks over generated inputs."""

import cmath
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from opucsum import inequalities as ineq
from opucsum import pruefer, sumrule, szego
from opucsum.verblunsky import VerblunskySequence, forward_difference, lp_norm, test_sequence as make_test_sequence

from .oracles import szego_values


def disk_points(max_modulus=1.0 - 1e-6):
    modulus = st.one_of(
        st.floats(0.0, max_modulus),
        st.just(ineq.NEAR_BOUNDARY if max_modulus >= ineq.NEAR_BOUNDARY else max_modulus),
    )
    angle = st.floats(0.0, 2 * math.pi)
    return st.builds(lambda r, t: cmath.rect(r, t), modulus, angle)


def sequences(max_len=12, max_modulus=0.9):
    return st.lists(disk_points(max_modulus), min_size=1, max_size=max_len).map(VerblunskySequence)


@given(st.integers(1, 6).flatmap(lambda k: st.tuples(st.lists(disk_points(), min_size=k, max_size=k),
                                                      st.lists(disk_points(), min_size=k, max_size=k))))
def test_telescope_product_holds(pair):
    assert ineq.check_telescope_product(*pair).ok


@given(st.integers(1, 6).flatmap(lambda k: st.lists(disk_points(), min_size=k, max_size=k)))
def test_power_mean_holds(z):
    assert ineq.check_power_mean(z).ok


@given(st.lists(disk_points(0.99), max_size=30), st.floats(1, 4), st.floats(1, 4))
def test_lp_norm_monotone(values, p, q):
    p, q = min(p, q), max(p, q)
    assert lp_norm(values, q) <= lp_norm(values, p) * (1 + 1e-12)


@given(sequences(), st.floats(0, 2 * math.pi))
def test_reversed_polynomial_same_modulus(seq, theta):
    phi, phi_star = szego.evaluate_pair(szego.szego_polynomials(seq), theta)
    assert math.isclose(abs(phi), abs(phi_star), rel_tol=1e-12)


@given(sequences(max_len=40, max_modulus=0.95), st.floats(0.01, 2 * math.pi - 0.01))
def test_pruefer_matches_value_recursion(seq, eta):
    phi, _ = szego_values(seq.coeffs, np.array([cmath.exp(1j * eta)]))
    assert math.isclose(pruefer.log_r_partial(seq, eta), math.log(abs(phi[0])), abs_tol=1e-9)


@given(st.integers(0, 8), st.floats(0, 2 * math.pi))
def test_weight_poly_pointwise(m, theta):
    assert math.isclose(float(sumrule.weight_poly_coeffs(m)(theta)), (1 - math.cos(theta)) ** m, abs_tol=1e-12)


@given(st.integers(0, 6), disk_points(0.999))
def test_f_series_zero_d_is_b0_log_rho(m, a):
    ap = sumrule.SumRuleApproximant(m)
    expected = sumrule.weight_poly_coeffs(m).b0 * 0.5 * math.log1p(-abs(a) ** 2)
    assert sumrule.f_series_eval(ap, a) == expected


@given(st.integers(1, 4), st.integers(2, 3000))
def test_test_sequence_variation_bounded(m, N):
    seq = make_test_sequence(m, N)
    assert np.sum(np.abs(forward_difference(seq))) <= 2 * seq[0].real + 1e-12


@given(
    st.integers(-3, 3),
    st.floats(0, 2 * math.pi, exclude_max=True),
    st.floats(0.05, 2 * math.pi - 0.05),
    st.lists(disk_points(), min_size=0, max_size=40),
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    st.booleans(),
    st.integers(0, 2**32 - 1),
)
def test_abel_transform_identity(k, phi, eta, gamma, f, with_theta, seed):
    if k == 0 and phi == 0:
        return
    if abs(cmath.exp(-1j * (k * eta - phi)) - 1) < 1e-6:
        return
    theta = np.cumsum(np.random.default_rng(seed).normal(0, 0.3, len(gamma) + 1)) if with_theta else None
    inp = pruefer.AbelInput(k, phi, np.array(gamma, dtype=complex), f, eta, theta)
    S, bound = pruefer.abel_transform(inp)
    direct = pruefer.abel_direct(inp)
    scale = max(1.0, abs(inp.g_value()) * (1 + np.sum(np.abs(inp.gamma))))
    assert abs(S - direct) <= 1e-10 * scale
    assert abs(S) <= bound * (1 + 1e-12) + 1e-300


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(sequences(max_len=10), st.integers(0, 3))
def test_positive_part_bound(seq, m):
    est = sumrule.z_bernstein_szego(seq, m)
    assert est.positive_part <= 2.0**m


@settings(max_examples=10, deadline=None)
@given(sequences(max_len=20))
def test_z_m0_identity(seq):
    est = sumrule.z_bernstein_szego(seq, 0)
    assert abs(est.value - sumrule.szego_identity_m0(seq)) <= 1e-6


@given(st.integers(1, 4).flatmap(lambda l: st.integers(1, l).flatmap(
    lambda k: st.tuples(st.just(l), st.just(k), st.lists(st.integers(0, l), min_size=2 * k, max_size=2 * k)))),
    st.floats(0.2, 1.5), st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
@settings(deadline=None)
def test_product_comparison_holds(spec, beta, c, phase):
    l, k, t = spec
    N = 400
    a = c * (np.arange(N) + 2.0) ** -beta * cmath.exp(1j * phase)
    out = ineq.check_product_comparison(VerblunskySequence(a), ineq.TupleSpec(l, k, tuple(t)), N)
    assert out.all_ok
