"""
Backward integration of PIV (beta = 0) for the Clarkson-McLeod solutions.

The state lives in one of two charts:

* Direct:      (q, q')            q'' = q'^2/(2q) + 3/2 q^3 + 4x q^2 + (2x^2 - 4 alpha) q
* Reciprocal:  (u, w) = (1/q, u') u'' = 3(w^2 - 1)/(2u) - 4x - (2x^2 - 4 alpha) u

Poles of q are simple zeros of u with u' = +-1. Samples are reported in these
two charts, but integrate() steps regular first-order forms of each: sqrt|q|
in the direct chart and a polynomial pole chart built on the PIV Hamiltonian
in the reciprocal one. The second-order reciprocal field carries the pole's
free Laurent coefficient at order (x - a)^3 and loses it to rounding on the way
through u = 0.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..config import Config
from .connection import Params
from .errors import (ParameterError, OutOfSpanError, SingularBreakdown,
                     SingularStateError, StepFailure, UnderflowError)
from .specfun import pcf_d, pcf_d_prime
from . import utils

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
TINY = 1e-300


class Chart(str, Enum):
    DIRECT = 'd'
    RECIPROCAL = 'r'


class Marker(Enum):
    """Returned in place of a value at a pole of q."""
    POLE = 'pole'


POLE = Marker.POLE
MaybePole = Union[float, Marker]


class PoleMethod(str, Enum):
    ODE_DETECTED = 'ode'
    IMPLICIT_PHASE = 'implicit'
    EXPANSION = 'expansion'


class Branch(str, Enum):
    PLUS = 'plus'
    MINUS = 'minus'

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1


@dataclass(frozen=True)
class OdeSettings:
    rtol: float = Config.RTOL
    atol: float = Config.ATOL
    x_start: float = Config.X_START
    chart_switch_q: float = Config.CHART_SWITCH_Q
    max_step: float = Config.MAX_STEP
    pole_refine_tol: float = Config.POLE_REFINE_TOL

    def __post_init__(self):
        if not 1e-13 <= self.rtol <= 1e-6:
            raise ParameterError(f"rtol={self.rtol:g} outside [1e-13, 1e-6]")
        if not self.atol > 0.0:
            raise ParameterError(f"atol must be positive, got {self.atol:g}")
        if not 4.0 <= self.x_start <= 8.0:
            raise ParameterError(f"x_start={self.x_start:g} outside [4, 8]")
        if not self.chart_switch_q > 1.0:
            raise ParameterError(f"chart_switch_q must exceed 1, got {self.chart_switch_q:g}")
        if not self.max_step > 0.0:
            raise ParameterError(f"max_step must be positive, got {self.max_step:g}")
        if not 0.0 < self.pole_refine_tol <= 1e-9:
            raise ParameterError(f"pole_refine_tol={self.pole_refine_tol:g} must lie in (0, 1e-9]")

    @property
    def reciprocal_exit(self) -> float:
        """|u| at which the reciprocal chart hands back to the direct one."""
        return Config.CHART_HYSTERESIS / self.chart_switch_q


@dataclass(frozen=True)
class ChartState:
    x: float
    chart: Chart
    y1: float
    y2: float

    def to_direct(self) -> Tuple[MaybePole, MaybePole]:
        """(q, q') of this state, or the pole marker at u = 0."""
        if self.chart is Chart.DIRECT:
            return self.y1, self.y2
        if self.y1 == 0.0:
            return POLE, POLE
        return 1.0 / self.y1, -self.y2 / (self.y1 * self.y1)

    def switched(self) -> 'ChartState':
        """Same point expressed in the other chart (u = 1/q, w = -q'/q^2 and back)."""
        if self.y1 == 0.0:
            raise SingularBreakdown("cannot switch charts at a zero of the chart variable", x=self.x)
        other = Chart.RECIPROCAL if self.chart is Chart.DIRECT else Chart.DIRECT
        return ChartState(self.x, other, 1.0 / self.y1, -self.y2 / (self.y1 * self.y1))


@dataclass(frozen=True)
class PoleRecord:
    x_pole: float
    residue_sign: int
    slope: float
    method: PoleMethod
    index_n: Optional[int] = None
    branch: Optional[Branch] = None

    TSV_HEADER = ('x_pole', 'residue_sign', 'slope', 'method', 'n', 'branch')

    def to_row(self) -> List[str]:
        return [
            utils.format_float(self.x_pole),
            str(self.residue_sign),
            utils.format_float(self.slope),
            self.method.value,
            '' if self.index_n is None else str(self.index_n),
            '' if self.branch is None else self.branch.value,
        ]

    def to_dict(self) -> Dict[str, object]:
        return {
            'x_pole': self.x_pole,
            'residue_sign': self.residue_sign,
            'slope': self.slope,
            'method': self.method.value,
            'n': self.index_n,
            'branch': None if self.branch is None else self.branch.value,
        }


@dataclass(frozen=True)
class Trajectory:
    samples: Tuple[ChartState, ...]
    poles: Tuple[PoleRecord, ...]
    params: Params
    settings: OdeSettings
    segments: Tuple['_Segment', ...] = field(default=(), repr=False, compare=False)

    @property
    def x_start(self) -> float:
        return self.samples[0].x

    @property
    def x_end(self) -> float:
        return self.samples[-1].x

    @cached_property
    def _sample_index(self) -> Dict[float, ChartState]:
        return {s.x: s for s in self.samples}

    @cached_property
    def _pole_abscissae(self) -> np.ndarray:
        return np.array([p.x_pole for p in self.poles])

    def near_pole(self, x: float) -> bool:
        if not len(self.poles):
            return False
        window = 10.0 * self.settings.pole_refine_tol
        return bool(np.min(np.abs(self._pole_abscissae - x)) <= window)

    def to_tsv(self) -> str:
        rows = []
        for s in self.samples:
            q, qp = (POLE, POLE) if self.near_pole(s.x) else s.to_direct()
            rows.append([
                utils.format_float(s.x),
                s.chart.value,
                '' if q is POLE else utils.format_float(q),
                '' if qp is POLE else utils.format_float(qp),
            ])
        samples = utils.tsv_document(('x', 'chart', 'q', 'qp'), rows)
        poles = utils.tsv_document(PoleRecord.TSV_HEADER, [p.to_row() for p in self.poles])
        return samples + '\n' + poles

    def to_dict(self) -> Dict[str, object]:
        samples = []
        for s in self.samples:
            q, qp = (POLE, POLE) if self.near_pole(s.x) else s.to_direct()
            samples.append({
                'x': s.x,
                'chart': s.chart.value,
                'q': None if q is POLE else q,
                'qp': None if qp is POLE else qp,
            })
        return {
            'alpha': self.params.alpha,
            'kappa': self.params.kappa,
            'x_start': self.x_start,
            'x_end': self.x_end,
            'samples': samples,
            'poles': [p.to_dict() for p in self.poles],
        }


def rhs_direct(x: float, q: float, qp: float, alpha: float) -> float:
    """q'' of PIV with beta = 0."""
    if abs(q) < TINY:
        raise SingularStateError("direct chart evaluated at q = 0", x=x)
    return qp * qp / (2.0 * q) + 1.5 * q ** 3 + 4.0 * x * q * q + (2.0 * x * x - 4.0 * alpha) * q


def rhs_reciprocal(x: float, u: float, w: float, alpha: float) -> float:
    """
    u'' for u = 1/q; finite at a simple pole where w^2 -> 1 with u.

    Exactly at u = 0 the Laurent expansion about a pole fixes
    lim (w^2 - 1)/u = 4x, so u'' = 6x - 4x = 2x whatever the residue sign.
    """
    gap = w * w - 1.0
    if abs(u) < TINY:
        if abs(gap) > 1e-6:
            raise SingularStateError("reciprocal chart evaluated at u = 0 with |u'| != 1", x=x)
        return 2.0 * x
    return 1.5 * gap / u - 4.0 * x - (2.0 * x * x - 4.0 * alpha) * u


def seed_boundary(params: Params, x_start: float) -> ChartState:
    """Direct-chart state kappa D^2(sqrt2 x), 2 sqrt2 kappa D D' at x_start."""
    if params.kappa == 0.0:
        raise ParameterError("kappa = 0 is the trivial solution q = 0 and has no boundary seed")
    if not 4.0 <= x_start <= 8.0:
        raise ParameterError(f"x_start={x_start:g} outside [4, 8]")

    nu = params.alpha - 0.5
    z = SQRT2 * x_start
    d = pcf_d(nu, z)
    dp = pcf_d_prime(nu, z)
    q = params.kappa * d * d
    if abs(q) < 1e-250:
        raise UnderflowError(f"boundary value |q| = {abs(q):.3g} underflows", x=x_start)
    return ChartState(x_start, Chart.DIRECT, q, 2.0 * SQRT2 * params.kappa * d * dp)


def _vector_field(chart: Chart, alpha: float):
    rhs = rhs_direct if chart is Chart.DIRECT else rhs_reciprocal

    def fun(x, y):
        return np.array([y[1], rhs(x, y[0], y[1], alpha)])
    return fun


def _solve(fun, x0: float, y0, x_end: float, settings: OdeSettings, atol,
           events: Optional[Sequence] = None, label: str = 'direct'):
    try:
        sol = solve_ivp(
            fun,
            (x0, x_end),
            y0,
            method='DOP853',
            rtol=settings.rtol,
            atol=atol,
            max_step=settings.max_step,
            dense_output=True,
            events=events,
        )
    except SingularStateError as e:
        raise SingularBreakdown(f"singular state in the {label} chart", x=e.x) from e

    if sol.status == -1:
        raise StepFailure(f"integration failed: {sol.message}", x=float(sol.t[-1]))
    return sol


def propagate(state: ChartState, x_end: float, alpha: float,
              settings: Optional[OdeSettings] = None) -> ChartState:
    """
    Integrate the second-order equation of the state's own chart up to x_end,
    without switching. Only meaningful away from zeros and poles of q.
    """
    settings = settings or OdeSettings()
    sol = _solve(_vector_field(state.chart, alpha), state.x, [state.y1, state.y2], x_end, settings,
                 settings.atol, label=state.chart.name.lower())
    return ChartState(float(sol.t[-1]), state.chart, float(sol.y[0, -1]), float(sol.y[1, -1]))


@dataclass(frozen=True)
class _RootForm:
    """
    q = sigma s^2 with s'' = 3/4 s^5 + 2 sigma x s^3 + (x^2 - 2 alpha) s.

    Regular through the double zeros of q; sigma only flips across a pole.
    Samples are stored in the direct chart.
    """
    sigma: int
    alpha: float

    chart = Chart.DIRECT

    @classmethod
    def enter(cls, state: ChartState, alpha: float) -> Tuple['_RootForm', np.ndarray]:
        q, qp = state.to_direct()
        if q is POLE or q == 0.0:
            raise SingularBreakdown("cannot enter the direct chart at a zero or pole of q", x=state.x)
        sigma = 1 if q > 0.0 else -1
        s = math.sqrt(abs(q))
        return cls(sigma, alpha), np.array([s, sigma * qp / (2.0 * s)])

    def fun(self, x, y):
        s, sp = y
        return np.array([sp, s * (0.75 * s ** 4 + 2.0 * self.sigma * x * s * s + x * x - 2.0 * self.alpha)])

    def state(self, x: float, y) -> ChartState:
        s, sp = float(y[0]), float(y[1])
        return ChartState(x, Chart.DIRECT, self.sigma * s * s, 2.0 * self.sigma * s * sp)

    def events(self, settings: OdeSettings) -> list:
        threshold = settings.chart_switch_q

        def leave(x, y):
            return y[0] * y[0] - threshold
        leave.terminal = True
        leave.direction = 1
        return [leave]


@dataclass(frozen=True)
class _PoleForm:
    """
    Polynomial chart through the poles of residue sign eps.

    u = 1/q and w is the blow-up coordinate of the PIV Hamiltonian momentum,
    p = u (v0 + u w):

        u' = eps (1 + 2x u) - 4 u^2 v      v = v0 + u w
        w' = 2 v^2 - 2 eps x w + 4 u v w

    with v0 = nu for eps = +1 and -(nu + 1) for eps = -1, nu = alpha - 1/2.
    The free Laurent coefficient of the pole is w itself, so a pole costs no
    more accuracy than any other point. w blows up only at a pole of the
    opposite sign, which the turn event keeps out of reach.
    """
    eps: int
    alpha: float

    chart = Chart.RECIPROCAL

    @property
    def v0(self) -> float:
        nu = self.alpha - 0.5
        return nu if self.eps > 0 else -(nu + 1.0)

    @classmethod
    def enter(cls, state: ChartState, alpha: float, eps: Optional[int] = None) -> Tuple['_PoleForm', np.ndarray]:
        recip = state if state.chart is Chart.RECIPROCAL else state.switched()
        x, u, up = recip.x, recip.y1, recip.y2
        if u == 0.0:
            raise SingularBreakdown("cannot enter a pole chart exactly at a pole", x=x)
        if eps is None:
            eps = 1 if up > 0.0 else -1
        form = cls(eps, alpha)
        v = (eps * (1.0 + 2.0 * x * u) - up) / (4.0 * u * u)
        return form, np.array([u, (v - form.v0) / u])

    def slope(self, x: float, y) -> float:
        u, w = y
        v = self.v0 + u * w
        return self.eps * (1.0 + 2.0 * x * u) - 4.0 * u * u * v

    def fun(self, x, y):
        u, w = y
        v = self.v0 + u * w
        return np.array([self.eps * (1.0 + 2.0 * x * u) - 4.0 * u * u * v,
                         2.0 * v * v - 2.0 * self.eps * x * w + 4.0 * u * v * w])

    def state(self, x: float, y) -> ChartState:
        return ChartState(x, Chart.RECIPROCAL, float(y[0]), float(self.slope(x, y)))

    def events(self, settings: OdeSettings) -> list:
        threshold = settings.reciprocal_exit

        def leave(x, y):
            return abs(y[0]) - threshold
        leave.terminal = True
        leave.direction = 1

        # eps u' falls through zero at the extremum of q before a pole of the other sign
        def turn(x, y):
            return self.eps * self.slope(x, y)
        turn.terminal = True
        turn.direction = -1
        return [leave, turn]


_Form = Union[_RootForm, _PoleForm]


@dataclass(frozen=True)
class _Segment:
    form: _Form
    x_hi: float
    x_lo: float
    dense: object = field(repr=False)

    @property
    def chart(self) -> Chart:
        return self.form.chart

    def contains(self, x: float) -> bool:
        return self.x_lo <= x <= self.x_hi

    def state_at(self, x: float) -> ChartState:
        return self.form.state(x, self.dense(x))


def _seed_atol(y: np.ndarray, atol: float) -> np.ndarray:
    # the decaying tail is ~1e-9 in s at the seed and the linearised equation is scale-invariant
    return atol * np.minimum(1.0, np.abs(y))


def _locate_poles(sol, form: _PoleForm, settings: OdeSettings) -> List[PoleRecord]:
    """Sign changes of u between accepted steps, refined on the dense output."""
    poles = []
    xs, u = sol.t, sol.y[0]
    for i in range(len(xs) - 1):
        if u[i + 1] == 0.0:
            root = float(xs[i + 1])
        elif u[i] * u[i + 1] < 0.0:
            root = brentq(lambda x: sol.sol(x)[0], xs[i + 1], xs[i],
                          xtol=settings.pole_refine_tol, maxiter=200)
        else:
            continue
        slope = float(form.slope(root, sol.sol(root)))
        sign = 1 if slope > 0.0 else -1
        if abs(abs(slope) - 1.0) > Config.RESIDUE_TOL:
            logger.warning("pole at x=%.12g has |u'| = %.12g, expected 1", root, abs(slope))
        poles.append(PoleRecord(root, sign, slope, PoleMethod.ODE_DETECTED))
    return poles


def _next_form(form: _Form, state: ChartState, fired: int, alpha: float) -> Tuple[_Form, np.ndarray]:
    if isinstance(form, _RootForm):
        return _PoleForm.enter(state, alpha)
    if fired == 0:
        return _RootForm.enter(state, alpha)
    return _PoleForm.enter(state, alpha, eps=-form.eps)


def _trivial_trajectory(params: Params, settings: OdeSettings, x_end: float) -> Trajectory:
    count = int(math.ceil((settings.x_start - x_end) / settings.max_step)) + 1
    grid = np.linspace(settings.x_start, x_end, count)
    samples = tuple(ChartState(float(x), Chart.DIRECT, 0.0, 0.0) for x in grid)
    return Trajectory(samples, (), params, settings)


def integrate(params: Params, settings: Optional[OdeSettings] = None,
              x_end: float = Config.X_END) -> Trajectory:
    """
    Integrate from the parabolic-cylinder seed at settings.x_start down to x_end.

    The direct chart is left when |q| reaches chart_switch_q and re-entered when
    |u| reaches 1.5/chart_switch_q. Inside the reciprocal chart the pole form
    is swapped for its opposite-residue twin whenever q' vanishes. Every sign
    change of u is recorded as an OdeDetected pole.
    """
    settings = settings or OdeSettings()
    if not x_end < settings.x_start:
        raise ParameterError(f"x_end={x_end:g} must lie below x_start={settings.x_start:g}")
    if params.kappa == 0.0:
        return _trivial_trajectory(params, settings, x_end)

    seed = seed_boundary(params, settings.x_start)
    logger.debug("seed at x=%g: q=%.17g q'=%.17g", seed.x, seed.y1, seed.y2)

    samples = [seed]
    poles: List[PoleRecord] = []
    segments = []
    form, y = _RootForm.enter(seed, params.alpha)
    x = seed.x
    atol = _seed_atol(y, settings.atol)
    for _ in range(Config.MAX_SEGMENTS):
        label = 'direct' if form.chart is Chart.DIRECT else 'reciprocal'
        sol = _solve(form.fun, x, y, x_end, settings, atol, form.events(settings), label)
        segments.append(_Segment(form, x, float(sol.t[-1]), sol.sol))
        for xi, yi in zip(sol.t[1:], sol.y.T[1:]):
            samples.append(form.state(float(xi), yi))
        if isinstance(form, _PoleForm):
            poles.extend(_locate_poles(sol, form, settings))

        if sol.status != 1:
            break
        fired = next(i for i, te in enumerate(sol.t_events) if len(te))
        x = float(sol.t[-1])
        form, y = _next_form(form, samples[-1], fired, params.alpha)
        atol = settings.atol
    else:
        raise StepFailure("too many chart switches", x=x)

    logger.info("integrated alpha=%g kappa=%g to x=%g: %d samples, %d segments, %d poles",
                params.alpha, params.kappa, samples[-1].x, len(samples), len(segments), len(poles))
    return Trajectory(tuple(samples), tuple(poles), params, settings, tuple(segments))


def evaluate(traj: Trajectory, x: float) -> Tuple[MaybePole, MaybePole]:
    """Dense-output (q, q') at x, or the pole marker within 10*pole_refine_tol of a pole."""
    slack = 1e-12 * max(1.0, abs(x))
    if not traj.x_end - slack <= x <= traj.x_start + slack:
        raise OutOfSpanError(f"x={x:.17g} outside the trajectory span [{traj.x_end:g}, {traj.x_start:g}]")
    if traj.near_pole(x):
        return POLE, POLE

    sample = traj._sample_index.get(x)
    if sample is not None:
        return sample.to_direct()
    if not traj.segments:
        return 0.0, 0.0

    for segment in traj.segments:
        if segment.contains(x):
            return segment.state_at(x).to_direct()

    # inside the slack at an end point
    edge = traj.samples[0] if x >= traj.x_start else traj.samples[-1]
    return edge.to_direct()
