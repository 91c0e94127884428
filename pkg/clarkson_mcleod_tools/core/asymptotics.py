"""
Singular-regime asymptotics of the Clarkson-McLeod solutions as x -> -infinity.

    q(x) = -2x/3 + 2x / (2 cos theta(x) + 1) + O(1/x)
    theta(x) = x^2/sqrt3 - b ln(2 sqrt3 x^2) + psi

Poles sit where 2 cos theta + 1 = 0, i.e. theta(a_n^+-) = 2 pi n +- 2 pi/3. The
implicit equations of the monodromy construction (written with phi = -theta and
the auxiliary c(phi)) reduce to this theta form, so a single phase function
serves every predictor here.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Union

from scipy.optimize import brentq

from .connection import ConnectionData
from .errors import DomainError, NonConvergence, NotSingularRegime, ParameterError
from .piv_ode import POLE, Branch, Marker, PoleMethod, PoleRecord

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
SQRT_TWO_THIRDS = math.sqrt(2.0 / 3.0)
# (2 pi)^(1/2) 3^(1/4)
EXPANSION_PREFACTOR = math.sqrt(2.0 * math.pi) * 3.0 ** 0.25
MARKER_TOL = 1e-12
MAX_NEWTON = 50


@dataclass(frozen=True)
class PhaseData:
    b: float
    psi: float

    def __post_init__(self):
        if not (math.isfinite(self.b) and math.isfinite(self.psi)):
            raise ParameterError(f"phase constants must be finite, got b={self.b}, psi={self.psi}")

    @classmethod
    def from_connection(cls, data: ConnectionData) -> 'PhaseData':
        if data.b is None or data.psi is None:
            raise NotSingularRegime(f"no phase constants outside the singular regime (regime: {data.regime.value})")
        return cls(data.b, data.psi)


def _check_negative(x: float) -> None:
    if not x < 0.0:
        raise DomainError(f"the x -> -infinity asymptotics need x < 0, got x={x}")


def theta(x: float, phase: PhaseData) -> float:
    _check_negative(x)
    x2 = x * x
    return x2 / SQRT3 - phase.b * math.log(2.0 * SQRT3 * x2) + phase.psi


def theta_prime(x: float, phase: PhaseData) -> float:
    _check_negative(x)
    return 2.0 * x / SQRT3 - 2.0 * phase.b / x


def q_asymptotic(x: float, phase: PhaseData) -> Union[float, Marker]:
    """Leading-order singular asymptotics; the pole marker where 2 cos theta + 1 vanishes."""
    denom = 2.0 * math.cos(theta(x, phase)) + 1.0
    if abs(denom) < MARKER_TOL:
        return POLE
    return -2.0 * x / 3.0 + 2.0 * x / denom


def q_asymptotic_reciprocal(x: float, phase: PhaseData) -> Union[float, Marker]:
    """x/q in the same approximation, (3/4)(2 cos theta + 1)/(1 - cos theta); finite at the poles of q."""
    c = math.cos(theta(x, phase))
    if abs(1.0 - c) < MARKER_TOL:
        return POLE
    return 0.75 * (2.0 * c + 1.0) / (1.0 - c)


def q_asymptotic_reciprocal_prime(x: float, phase: PhaseData) -> float:
    t = theta(x, phase)
    c = math.cos(t)
    return -2.25 * math.sin(t) / (1.0 - c) ** 2 * theta_prime(x, phase)


def _target(n: int, branch: Branch) -> float:
    return 2.0 * math.pi * n + branch.sign * 2.0 * math.pi / 3.0


def _check_index(n: int) -> None:
    if n < 1:
        raise ParameterError(f"pole index n must be >= 1, got {n}")


def pole_implicit(n: int, branch: Branch, phase: PhaseData) -> float:
    """
    Root of theta(x) = 2 pi n +- 2 pi/3 on the negative axis.

    Newton from the b = 0 closed form; falls back to brentq on
    [x0 (1 + 1/n), x0 (1 - 1/n)] when an iterate leaves that bracket.
    """
    _check_index(n)
    target = _target(n, branch)
    tol = 1e-12 * max(1.0, abs(target))
    x0 = -math.sqrt(SQRT3 * max(target - phase.psi, 1.0))
    lo, hi = x0 * (1.0 + 1.0 / n), x0 * (1.0 - 1.0 / n)

    def f(x):
        return theta(x, phase) - target

    x = x0
    for _ in range(MAX_NEWTON):
        fx = f(x)
        if abs(fx) <= tol:
            return x
        step = fx / theta_prime(x, phase)
        x_new = x - step
        if not lo <= x_new <= hi:
            if f(lo) * f(hi) < 0.0:
                logger.debug("Newton left the bracket for n=%d (%s); bisecting", n, branch.value)
                return brentq(f, lo, hi, xtol=1e-14 * abs(x0), maxiter=200)
            if x_new >= 0.0:
                x_new = 0.5 * x
        if abs(x_new - x) <= 2.0 * 2.220446049250313e-16 * abs(x):
            return x_new
        x = x_new
    raise NonConvergence(f"pole_implicit did not converge for n={n} ({branch.value}) in {MAX_NEWTON} iterations", x=x)


def pole_expansion(n: int, branch: Branch, phase: PhaseData) -> float:
    """Three-term large-n expansion of the pole a_n^+-."""
    _check_index(n)
    root_n = math.sqrt(n)
    bracket = (
        root_n
        + phase.b * math.log(n) / (4.0 * math.pi * root_n)
        + (phase.b * math.log(12.0 * math.pi) - phase.psi + branch.sign * 2.0 * math.pi / 3.0)
        / (4.0 * math.pi * root_n)
    )
    return -EXPANSION_PREFACTOR * bracket


def predicted_residue_sign(branch: Branch) -> int:
    """Residue of the model pole: 2 cos theta + 1 falls through zero on the plus branch."""
    return -1 if branch is Branch.PLUS else 1


def predicted_poles(phase: PhaseData, x_min: float,
                    method: PoleMethod = PoleMethod.IMPLICIT_PHASE) -> List[PoleRecord]:
    """Predicted poles in [x_min, 0), ordered by decreasing x."""
    if method is PoleMethod.ODE_DETECTED:
        raise ParameterError("predicted_poles only covers the implicit-phase and expansion predictors")
    locate = pole_implicit if method is PoleMethod.IMPLICIT_PHASE else pole_expansion

    records = []
    n = 1
    while True:
        below = 0
        for branch in (Branch.MINUS, Branch.PLUS):
            try:
                x = locate(n, branch, phase)
            except NonConvergence as e:
                # low-index roots may not exist when b ln x^2 competes with x^2
                logger.debug("skipping n=%d (%s): %s", n, branch.value, e)
                continue
            if x < x_min:
                below += 1
                continue
            if x < 0.0:
                sign = predicted_residue_sign(branch)
                records.append(PoleRecord(x, sign, float(sign), method, n, branch))
        if below == 2:
            break
        n += 1
    records.sort(key=lambda r: -r.x_pole)
    return records


def phi(x: float, phase: PhaseData) -> float:
    return -theta(x, phase)


def c_of_phi(angle: float) -> complex:
    e = cmath.exp(1j * angle)
    return -1j * SQRT6 * e / (2.0 + e)


def q_from_c(x: float, c: complex) -> complex:
    """q in terms of c, before the reduction to cosines; real along the real phase."""
    return -2.0 * x - 4j * SQRT_TWO_THIRDS * (c - 1j * SQRT_TWO_THIRDS) / (c * c - 2.0) * x


def reduction_lhs(angle: float) -> complex:
    c = c_of_phi(angle)
    return (c - 1j * SQRT_TWO_THIRDS) / (c * c - 2.0)


def reduction_rhs(angle: float) -> complex:
    e = cmath.exp(1j * angle)
    return 1j * math.sqrt(2.0) / (4.0 * SQRT3) * (2.0 + e) * (1.0 + 2.0 * e) / (1.0 + e + e * e)
