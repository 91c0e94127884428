"""
Scalar special functions: parabolic cylinder D_nu on the nonnegative axis,
real gamma and the principal branch of complex log-gamma.

D_nu(z) is evaluated in two regimes split at ``Config.PCF_SWITCH_Z``:

* z >= switch: the large-z asymptotic series
  D_nu(z) ~ z^nu e^{-z^2/4} sum_s (-1)^s (-nu)_{2s} / (s! (2 z^2)^s),
  truncated at the smallest term (below 1e-16 relative for |nu| <= 7 at z = 11);
* z < switch: Taylor-series continuation of Weber's equation
  w'' = (z^2/4 - nu - 1/2) w inward from the switchover, seeded with the
  asymptotic values of D_nu and D_nu'. D_nu is the dominant solution in that
  direction, so the continuation keeps its relative accuracy.
"""

import cmath
import math
from functools import lru_cache
from typing import Tuple

from ..config import Config
from .errors import DomainError, PoleError

EPS = 2.220446049250313e-16

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

_MAX_SERIES_TERMS = 400
_MAX_TAYLOR_TERMS = 120


def _sinpi(x: float) -> float:
    """sin(pi x) about the nearest integer n, so zeros of the sine stay exact."""
    n = round(x)
    s = math.sin(math.pi * (x - n))
    return -s if n % 2 else s


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _lanczos_sum(z):
    total = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        total += LANCZOS_COEFFS[i] / (z + i)
    return total


def gamma_real(x: float) -> float:
    """
    Gamma function of a real argument; reflection below 1/2.

    Raises DomainError where |Gamma(x)| leaves the double range, or where the
    reflection needs a value that does, rather than returning inf.
    """
    if not math.isfinite(x):
        raise DomainError(f"gamma_real needs a finite argument, got {x}")
    if _is_nonpositive_integer(x):
        raise PoleError(f"Gamma has a pole at {x}")
    try:
        if x < 0.5:
            value = math.pi / (_sinpi(x) * gamma_real(1.0 - x))
        else:
            z = x - 1.0
            t = z + LANCZOS_G + 0.5
            value = math.sqrt(2.0 * math.pi) * math.exp((z + 0.5) * math.log(t) - t) * _lanczos_sum(z)
    except (OverflowError, ZeroDivisionError):
        value = math.inf
    if not math.isfinite(value):
        raise DomainError(f"Gamma({x:.17g}) exceeds the double range")
    return value


def _log_gamma_lanczos(z: complex) -> complex:
    z -= 1.0
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(_lanczos_sum(z))


def log_gamma_complex(z: complex) -> complex:
    """
    Principal branch of log Gamma(z), analytic off the negative real axis.

    Arguments with Re z < 1/2 are shifted up by the recurrence
    log Gamma(z) = log Gamma(z + n) - sum_k log(z + k), which preserves the branch.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"log_gamma_complex needs a finite argument, got {z}")
    if z.imag == 0.0 and _is_nonpositive_integer(z.real):
        raise PoleError(f"Gamma has a pole at {z.real}")
    if z.real >= 0.5:
        return _log_gamma_lanczos(z)

    n = int(math.ceil(0.5 - z.real))
    shift = sum(cmath.log(z + k) for k in range(n))
    return _log_gamma_lanczos(z + n) - shift


def arg_gamma(z: complex) -> float:
    """Continuous argument of Gamma(z): the imaginary part of log_gamma_complex."""
    return log_gamma_complex(z).imag


def _check_pcf_domain(nu: float, z: float) -> None:
    if not (math.isfinite(nu) and math.isfinite(z)):
        raise DomainError(f"non-finite input nu={nu}, z={z}")
    if z < 0.0:
        raise DomainError(f"D_nu(z) is only provided for z >= 0, got z={z}")
    if abs(nu) > Config.PCF_NU_LIMIT:
        raise DomainError(f"order nu={nu} outside the validated range [-{Config.PCF_NU_LIMIT:g}, {Config.PCF_NU_LIMIT:g}]")


def _pcf_asymptotic(nu: float, z: float) -> float:
    """Large-z series, stopped at the first term that fails to decrease."""
    two_z2 = 2.0 * z * z
    total = 1.0
    term = 1.0
    for s in range(_MAX_SERIES_TERMS):
        nxt = -term * (2 * s - nu) * (2 * s + 1 - nu) / ((s + 1) * two_z2)
        if abs(nxt) > abs(term):
            break
        total += nxt
        term = nxt
        if abs(term) <= EPS * abs(total):
            break
    return math.exp(nu * math.log(z) - 0.25 * z * z) * total


def _taylor_step(z0: float, w: float, wp: float, h: float, c: float) -> Tuple[float, float]:
    """Advance (w, w') of w'' = (z^2/4 - c) w from z0 to z0 + h by its Taylor series."""
    p0 = 0.25 * z0 * z0 - c
    p1 = 0.5 * z0
    coeffs = [w, wp]
    value = w + wp * h
    deriv = wp
    hpow = h  # h^(j-1) for j = 2
    quiet = 0
    for k in range(_MAX_TAYLOR_TERMS):
        nxt = p0 * coeffs[k]
        if k >= 1:
            nxt += p1 * coeffs[k - 1]
        if k >= 2:
            nxt += 0.25 * coeffs[k - 2]
        nxt /= (k + 2) * (k + 1)
        coeffs.append(nxt)

        j = k + 2
        term_d = j * nxt * hpow
        hpow *= h
        term_v = nxt * hpow
        value += term_v
        deriv += term_d

        scale = abs(value) + abs(deriv * h)
        if abs(term_v) <= EPS * scale and abs(term_d * h) <= EPS * scale:
            quiet += 1
            if quiet >= 2:
                break
        else:
            quiet = 0
    return value, deriv


@lru_cache(maxsize=4096)
def _pcf_value(nu: float, z: float) -> float:
    switch = Config.PCF_SWITCH_Z
    if z >= switch:
        return _pcf_asymptotic(nu, z)

    w = _pcf_asymptotic(nu, switch)
    wp = 0.5 * switch * w - _pcf_asymptotic(nu + 1.0, switch)
    n_steps = max(1, int(math.ceil((switch - z) / Config.PCF_TAYLOR_STEP)))
    h = (z - switch) / n_steps
    c = nu + 0.5
    for i in range(n_steps):
        w, wp = _taylor_step(switch + i * h, w, wp, h, c)
    return w


def pcf_d(nu: float, z: float) -> float:
    """Parabolic cylinder function D_nu(z) for z >= 0 and |nu| <= 6."""
    _check_pcf_domain(nu, z)
    return _pcf_value(float(nu), float(z))


def pcf_d_prime(nu: float, z: float) -> float:
    """D_nu'(z) from the recurrence D_nu' = (z/2) D_nu - D_{nu+1}."""
    _check_pcf_domain(nu, z)
    nu, z = float(nu), float(z)
    return 0.5 * z * _pcf_value(nu, z) - _pcf_value(nu + 1.0, z)
