import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from ..config import Config
from .errors import NotSingularRegime, ParameterError, SeparatrixError
from .specfun import arg_gamma, gamma_real

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)


class Regime(str, Enum):
    """Classification of kappa against kappa_star (equivalently |rho| against 1)."""
    BOUNDED_OSCILLATORY = 'bounded-oscillatory'
    SEPARATRIX = 'separatrix'
    SINGULAR = 'singular'


@dataclass(frozen=True)
class Params:
    """PIV parameter alpha (beta is fixed to 0) and boundary amplitude kappa."""
    alpha: float
    kappa: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.kappa)):
            raise ParameterError(f"alpha and kappa must be finite, got alpha={self.alpha}, kappa={self.kappa}")
        shifted = self.alpha - 0.5
        if abs(shifted - round(shifted)) < Config.HALF_INTEGER_GAP:
            raise ParameterError(
                f"alpha={self.alpha:g} violates the hypothesis alpha - 1/2 not an integer "
                f"(the connection formulas are derived for alpha - 1/2 outside Z)"
            )


@dataclass(frozen=True)
class ConnectionData:
    kappa_star: float
    rho: complex
    regime: Regime
    b: Optional[float] = None
    psi: Optional[float] = None

    @property
    def abs_rho(self) -> float:
        return abs(self.rho)

    def to_dict(self) -> Dict[str, object]:
        """Flat JSON-ready mapping; b and psi are omitted outside the singular regime."""
        data = {
            'kappa_star': self.kappa_star,
            'rho_re': self.rho.real,
            'rho_im': self.rho.imag,
            'abs_rho': self.abs_rho,
            'regime': self.regime.value,
        }
        if self.b is not None:
            data['b'] = self.b
            data['psi'] = self.psi
        return data


@dataclass(frozen=True)
class StokesRep:
    """Stokes multipliers s0..s3 (s2 = 0, s3 = -s1) and s_star = 1 + s0 s1."""
    s0: complex
    s1: complex
    s2: complex
    s3: complex
    s_star: complex


@dataclass
class StokesReport:
    residuals: Dict[str, float] = field(default_factory=dict)
    shifted: Dict[int, complex] = field(default_factory=dict)

    def failures(self, tol: float = 1e-12) -> List[str]:
        return [name for name, value in self.residuals.items() if not value <= tol]

    def ok(self, tol: float = 1e-12) -> bool:
        return not self.failures(tol)


def kappa_star(alpha: float) -> float:
    """Threshold kappa* = 1 / (sqrt(pi) Gamma(alpha + 1/2)); negative when the gamma value is."""
    return 1.0 / (SQRT_PI * gamma_real(alpha + 0.5))


def rho_from_kappa(params: Params) -> complex:
    """rho = 1 - 2 pi^{3/2} kappa / (e^{i pi alpha} Gamma(1/2 - alpha)); equals s_star."""
    amplitude = 2.0 * math.pi ** 1.5 * params.kappa / gamma_real(0.5 - params.alpha)
    return 1.0 - amplitude * cmath.exp(-1j * math.pi * params.alpha)


def _arg(z: complex) -> float:
    """Principal argument in (-pi, pi]; the negative real axis maps to +pi."""
    angle = math.atan2(z.imag, z.real)
    return math.pi if angle == -math.pi else angle


def classify(params: Params) -> Regime:
    k_star = kappa_star(params.alpha)
    kappa = params.kappa
    if kappa == 0.0:
        return Regime.BOUNDED_OSCILLATORY
    if abs(kappa - k_star) <= Config.SEPARATRIX_RTOL * max(1.0, abs(k_star)):
        return Regime.SEPARATRIX
    if kappa * (kappa - k_star) > 0.0:
        return Regime.SINGULAR
    return Regime.BOUNDED_OSCILLATORY


def _phase_constants(alpha: float, rho: complex):
    b = -math.log(abs(rho) ** 2 - 1.0) / (2.0 * math.pi)
    psi = -2.0 * math.pi * alpha / 3.0 - arg_gamma(complex(0.5, -b)) - _arg(rho)
    return b, psi


def connection_data(params: Params) -> ConnectionData:
    """Connection data for any regime; b and psi are only filled in the singular one."""
    rho = rho_from_kappa(params)
    regime = classify(params)
    k_star = kappa_star(params.alpha)
    if regime is Regime.SINGULAR and abs(rho) > 1.0:
        b, psi = _phase_constants(params.alpha, rho)
        return ConnectionData(k_star, rho, regime, b, psi)
    return ConnectionData(k_star, rho, regime)


def connection_constants(params: Params) -> ConnectionData:
    """
    Connection data with b and psi, valid only in the singular regime.

    Raises SeparatrixError when ||rho| - 1| <= 1e-12 and NotSingularRegime when
    |rho| < 1.
    """
    rho = rho_from_kappa(params)
    abs_rho = abs(rho)
    if abs(abs_rho - 1.0) <= 1e-12 or classify(params) is Regime.SEPARATRIX:
        raise SeparatrixError(
            f"|rho| = 1 for alpha={params.alpha:g}, kappa={params.kappa:g}: "
            "kappa(kappa - kappa*) > 0 is required"
        )
    if abs_rho < 1.0:
        raise NotSingularRegime(
            f"|rho| = {abs_rho:.6g} < 1 for alpha={params.alpha:g}, kappa={params.kappa:g}: "
            "kappa(kappa - kappa*) > 0 is required"
        )

    b, psi = _phase_constants(params.alpha, rho)
    logger.debug("connection constants alpha=%g kappa=%g: rho=%s b=%.17g psi=%.17g",
                 params.alpha, params.kappa, rho, b, psi)
    return ConnectionData(kappa_star(params.alpha), rho, Regime.SINGULAR, b, psi)


def stokes_representative(params: Params) -> StokesRep:
    """Canonical multipliers s1 = e^{-i pi alpha}, s3 = -s1, s2 = 0, s0 = (s* - 1) e^{i pi alpha}."""
    s_star = rho_from_kappa(params)
    rotation = cmath.exp(1j * math.pi * params.alpha)
    s1 = 1.0 / rotation
    s0 = complex(((s_star - 1.0) * rotation).real, 0.0)
    return StokesRep(s0=s0, s1=s1, s2=0j, s3=-s1, s_star=s_star)


def shifted_multipliers(rep: StokesRep, alpha: float) -> Dict[int, complex]:
    """s5..s8 from s_{k+4} = -s_k e^{(-1)^k 2 pi i alpha} (beta = 0), with s4 taken as s0."""
    base = {1: rep.s1, 2: rep.s2, 3: rep.s3, 4: rep.s0}
    return {k + 4: -s * cmath.exp((1 if k % 2 == 0 else -1) * 2j * math.pi * alpha)
            for k, s in base.items()}


def verify_stokes(rep: StokesRep, alpha: float) -> StokesReport:
    """
    Residuals of every constraint the representative must satisfy.

    The cyclic relation is evaluated in full with beta = 0 and s4 taken as s0;
    s4 drops out whenever s2 = 0 and s1 + s3 = 0. The shifted multipliers
    s5..s8 inherit s6 = 0 and s5 + s7 = 0 from those two.
    """
    e_plus = cmath.exp(1j * math.pi * alpha)
    e_minus = cmath.exp(-1j * math.pi * alpha)
    s0, s1, s2, s3 = rep.s0, rep.s1, rep.s2, rep.s3
    s4 = s0

    cyclic = ((1 + s1 * s2) * (1 + s3 * s4) + s1 * s4) * e_minus - (1 + s2 * s3) * e_plus
    cyclic_residual = abs(cyclic + 2j * math.sin(math.pi * alpha))
    shifted = shifted_multipliers(rep, alpha)

    report = StokesReport({
        's2_zero': abs(s2),
        's6_zero': abs(shifted[6]),
        's1_plus_s3': abs(s1 + s3),
        's5_plus_s7': abs(shifted[5] + shifted[7]),
        's_star_definition': abs(rep.s_star - (1 + s0 * s1)),
        's0_real': abs(s0.imag),
        's1_reality': abs(s1.conjugate() + s3 * e_plus * e_plus),
        'one_minus_s_star_real': abs(((1 - rep.s_star) * e_plus).imag),
        'cyclic_relation': cyclic_residual,
    }, shifted)
    if not report.ok():
        logger.info("Stokes constraints violated: %s", ", ".join(report.failures()))
    return report
