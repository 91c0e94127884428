import cmath
import math

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from clarkson_mcleod_tools.core.connection import (Params, Regime, classify,
                                                   connection_constants, connection_data, kappa_star,
                                                   rho_from_kappa, stokes_representative, verify_stokes)
from clarkson_mcleod_tools.core.errors import NotSingularRegime, ParameterError, SeparatrixError

GOLDEN_B = -math.log(4.0 * math.pi ** 2 - 4.0 * math.pi) / (2.0 * math.pi)


def admissible_alpha():
    # keep alpha - 1/2 clear of the integers
    return st.floats(min_value=-3.0, max_value=3.0).filter(
        lambda a: abs((a - 0.5) - round(a - 0.5)) > 1e-6)


def test_kappa_star_examples():
    assert kappa_star(0.0) == pytest.approx(1.0 / math.pi, rel=1e-14)
    assert kappa_star(1.0) == pytest.approx(2.0 / math.pi, rel=1e-14)
    assert kappa_star(0.25) == pytest.approx(1.0 / (math.sqrt(math.pi) * math.gamma(0.75)), rel=1e-13)
    assert kappa_star(0.25) == pytest.approx(0.46040631110443725, rel=1e-13)


def test_kappa_star_sign_follows_gamma():
    # Gamma(alpha + 1/2) < 0 for alpha + 1/2 in (-1, 0)
    assert kappa_star(-1.0) < 0.0


def test_rho_examples():
    assert rho_from_kappa(Params(0.0, 0.0)) == 1 + 0j
    assert abs(rho_from_kappa(Params(0.0, 1.0 / math.pi)) - (-1.0)) <= 1e-13
    assert abs(rho_from_kappa(Params(0.0, 1.0)) - (1.0 - 2.0 * math.pi)) <= 1e-13


def test_params_reject_half_integer_alpha():
    for alpha in (0.5, 1.5, -0.5, 0.5 + 1e-10):
        with pytest.raises(ParameterError, match='hypothesis'):
            Params(alpha, 1.0)
    Params(0.5 + 1e-6, 1.0)
    with pytest.raises(ParameterError):
        Params(float('inf'), 1.0)


def test_golden_connection_constants():
    data = connection_constants(Params(0.0, 1.0))
    assert data.regime is Regime.SINGULAR
    assert data.b == pytest.approx(GOLDEN_B, abs=1e-12)
    assert data.b == pytest.approx(-0.5240294323466588, abs=1e-13)
    oracle = -float(mpmath.arg(mpmath.gamma(mpmath.mpc(0.5, -data.b)))) - math.pi
    assert data.psi == pytest.approx(oracle, abs=1e-12)
    assert data.psi == pytest.approx(-2.37067420211683, abs=1e-9)


def test_b_is_stored_exactly():
    data = connection_constants(Params(0.3, 2.0))
    assert data.b == -math.log(abs(data.rho) ** 2 - 1.0) / (2.0 * math.pi)


def test_connection_constants_regime_errors():
    with pytest.raises(NotSingularRegime):
        connection_constants(Params(0.0, 0.1))
    with pytest.raises(SeparatrixError):
        connection_constants(Params(0.0, kappa_star(0.0)))
    # a separatrix is also "not singular" for callers that only care about that
    with pytest.raises(NotSingularRegime):
        connection_constants(Params(0.0, kappa_star(0.0)))


def test_classify_examples():
    assert classify(Params(0.0, 1.0)) is Regime.SINGULAR
    assert classify(Params(0.0, 0.1)) is Regime.BOUNDED_OSCILLATORY
    assert classify(Params(0.0, 0.0)) is Regime.BOUNDED_OSCILLATORY
    assert classify(Params(0.0, -0.5)) is Regime.SINGULAR
    assert classify(Params(0.0, kappa_star(0.0))) is Regime.SEPARATRIX


def test_connection_data_does_not_raise_outside_singular_regime():
    data = connection_data(Params(0.0, 0.1))
    assert data.regime is Regime.BOUNDED_OSCILLATORY
    assert data.b is None and data.psi is None
    assert 'b' not in data.to_dict()


def test_connection_data_to_dict():
    data = connection_data(Params(0.0, 1.0))
    d = data.to_dict()
    assert set(d) == {'kappa_star', 'rho_re', 'rho_im', 'abs_rho', 'regime', 'b', 'psi'}
    assert d['regime'] == 'singular'
    assert d['abs_rho'] == pytest.approx(2.0 * math.pi - 1.0, rel=1e-13)


@given(admissible_alpha(), st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=500)
def test_regime_equivalence(alpha, kappa):
    params = Params(alpha, kappa)
    k_star = kappa_star(alpha)
    lhs = kappa * (kappa - k_star)
    rhs = abs(rho_from_kappa(params)) - 1.0
    assume(abs(lhs) > 1e-9 and abs(rhs) > 1e-9)
    assert (lhs > 0.0) == (rhs > 0.0)
    assert (classify(params) is Regime.SINGULAR) == (rhs > 0.0)


@given(admissible_alpha(), st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=200)
def test_rho_equals_s_star(alpha, kappa):
    params = Params(alpha, kappa)
    rep = stokes_representative(params)
    rho = rho_from_kappa(params)
    assert abs(rep.s_star - rho) <= 1e-13 * max(1.0, abs(rho))
    assert abs(1.0 + rep.s0 * rep.s1 - rho) <= 1e-12 * max(1.0, abs(rho))


@given(admissible_alpha(), st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=200)
def test_stokes_constraints_hold(alpha, kappa):
    rep = stokes_representative(Params(alpha, kappa))
    report = verify_stokes(rep, alpha)
    assert report.ok(1e-12 * max(1.0, abs(rep.s0)))


def test_stokes_golden():
    rep = stokes_representative(Params(0.0, 1.0))
    assert rep.s1 == 1 + 0j
    assert rep.s3 == -1 + 0j
    assert rep.s2 == 0
    assert rep.s0.real == pytest.approx(-2.0 * math.pi, rel=1e-13)
    assert rep.s0.imag == 0.0


def test_verify_stokes_flags_broken_representative():
    rep = stokes_representative(Params(0.25, 1.0))
    broken = type(rep)(rep.s0, rep.s1, 0.1 + 0j, rep.s3, rep.s_star)
    report = verify_stokes(broken, 0.25)
    assert not report.ok()
    assert 's2_zero' in report.failures()
    assert 'cyclic_relation' in report.failures()


def test_shifted_multipliers():
    alpha = 0.3
    rep = stokes_representative(Params(alpha, 1.0))
    report = verify_stokes(rep, alpha)
    assert sorted(report.shifted) == [5, 6, 7, 8]
    turn = cmath.exp(2j * math.pi * alpha)
    assert abs(report.shifted[5] + rep.s1 / turn) <= 1e-14
    assert report.shifted[6] == 0
    assert abs(report.shifted[7] + rep.s3 / turn) <= 1e-14
    assert abs(report.shifted[8] + rep.s0 * turn) <= 1e-13 * abs(rep.s0)
    assert report.residuals['s5_plus_s7'] <= 1e-15

    broken = type(rep)(rep.s0, rep.s1, rep.s2, 0.5 * rep.s3, rep.s_star)
    failures = verify_stokes(broken, alpha).failures()
    assert 's1_plus_s3' in failures and 's5_plus_s7' in failures


def test_one_minus_s_star_rotated_is_real():
    alpha = 0.37
    rep = stokes_representative(Params(alpha, 1.3))
    assert abs(((1 - rep.s_star) * cmath.exp(1j * math.pi * alpha)).imag) <= 1e-12
