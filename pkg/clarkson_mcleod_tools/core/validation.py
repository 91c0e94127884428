"""
Cross-checks of the integrated solution against the singular asymptotics
and its predicted pole field.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Config
from . import utils
from .asymptotics import (PhaseData, pole_expansion, pole_implicit, predicted_poles,
                          predicted_residue_sign, q_asymptotic, q_asymptotic_reciprocal,
                          q_asymptotic_reciprocal_prime, theta)
from .connection import Params, connection_constants
from .errors import MatchFailure, ParameterError
from .piv_ode import POLE, Branch, OdeSettings, PoleRecord, Trajectory, evaluate, integrate

logger = logging.getLogger(__name__)

ZERO_BOUND_SAMPLES = 41
NEAR_BOUNDARY = 0.05


@dataclass(frozen=True)
class Checkpoint:
    x: float
    excluded: bool
    q_ode: Optional[float] = None
    q_asym: Optional[float] = None
    residual: Optional[float] = None
    scaled_residual: Optional[float] = None


@dataclass(frozen=True)
class ResidualReport:
    checkpoints: Tuple[Checkpoint, ...]
    exclusion_band: float
    cos_band: float = Config.COS_BAND

    TSV_HEADER = ('x', 'excluded', 'q_ode', 'q_asym', 'residual', 'scaled_residual')

    @property
    def included(self) -> List[Checkpoint]:
        return [c for c in self.checkpoints if not c.excluded]

    def max_scaled_residual(self) -> float:
        return max((c.scaled_residual for c in self.included), default=0.0)

    def window_max(self, center: float, half_width: float = 0.5) -> Optional[float]:
        """Largest scaled residual among included checkpoints within half_width of center."""
        values = [c.scaled_residual for c in self.included if abs(c.x - center) <= half_width]
        return max(values) if values else None

    def passes(self, bound: float = Config.RESIDUAL_BOUND) -> bool:
        return self.max_scaled_residual() <= bound

    def to_tsv(self) -> str:
        rows = [[utils.format_float(c.x), utils.optional_cell(c.excluded), utils.optional_cell(c.q_ode),
                 utils.optional_cell(c.q_asym), utils.optional_cell(c.residual),
                 utils.optional_cell(c.scaled_residual)]
                for c in self.checkpoints]
        return utils.tsv_document(self.TSV_HEADER, rows)

    def to_dict(self) -> Dict[str, object]:
        return {
            'exclusion_band': self.exclusion_band,
            'cos_band': self.cos_band,
            'max_scaled_residual': self.max_scaled_residual(),
            'checkpoints': [dict(zip(self.TSV_HEADER, (c.x, c.excluded, c.q_ode, c.q_asym,
                                                        c.residual, c.scaled_residual)))
                            for c in self.checkpoints],
        }


@dataclass(frozen=True)
class ZeroBound:
    """Zero-perturbation bookkeeping on [center - radius, center + radius]."""
    center: float
    radius: float
    sup_error: float
    min_slope: float
    hypothesis_holds: bool

    @property
    def bound(self) -> float:
        return self.sup_error / self.min_slope if self.min_slope > 0.0 else math.inf


@dataclass(frozen=True)
class PoleComparisonRow:
    n: int
    branch: Branch
    x_implicit: float
    x_expansion: float
    half_spacing: float
    ode_pole: Optional[PoleRecord] = None
    zero_bound: Optional[ZeroBound] = None

    @property
    def x_ode(self) -> Optional[float]:
        return None if self.ode_pole is None else self.ode_pole.x_pole

    @property
    def ode_residue_sign(self) -> Optional[int]:
        return None if self.ode_pole is None else self.ode_pole.residue_sign

    @property
    def d_oi(self) -> Optional[float]:
        return None if self.x_ode is None else abs(self.x_ode - self.x_implicit)

    @property
    def d_ie(self) -> float:
        return abs(self.x_implicit - self.x_expansion)

    @property
    def bound_holds(self) -> Optional[bool]:
        if self.zero_bound is None or self.d_oi is None:
            return None
        return self.zero_bound.hypothesis_holds and self.d_oi <= self.zero_bound.bound

    @property
    def sign_agrees(self) -> Optional[bool]:
        if self.ode_residue_sign is None:
            return None
        return self.ode_residue_sign == predicted_residue_sign(self.branch)


@dataclass(frozen=True)
class PoleComparison:
    rows: Tuple[PoleComparisonRow, ...]
    with_ode: bool

    TSV_HEADER = ('n', 'branch', 'x_ode', 'x_implicit', 'x_expansion', 'd_oi', 'd_ie',
                  'half_spacing', 'bound', 'bound_holds', 'sign_agrees')

    def row(self, n: int, branch: Branch) -> PoleComparisonRow:
        for r in self.rows:
            if r.n == n and r.branch is branch:
                return r
        raise KeyError((n, branch))

    def max_d_oi(self) -> Optional[float]:
        values = [r.d_oi for r in self.rows if r.d_oi is not None]
        return max(values) if values else None

    def _cells(self, r: PoleComparisonRow) -> tuple:
        bound = None if r.zero_bound is None else r.zero_bound.bound
        return (r.n, r.branch.value, r.x_ode, r.x_implicit, r.x_expansion, r.d_oi, r.d_ie,
                r.half_spacing, bound, r.bound_holds, r.sign_agrees)

    def to_tsv(self) -> str:
        return utils.tsv_document(self.TSV_HEADER,
                                  [[utils.optional_cell(v) for v in self._cells(r)] for r in self.rows])

    def to_dict(self) -> Dict[str, object]:
        rows = []
        for r in self.rows:
            cells = dict(zip(self.TSV_HEADER, self._cells(r)))
            if cells['bound'] is not None and not math.isfinite(cells['bound']):
                cells['bound'] = None
            rows.append(cells)
        return {'with_ode': self.with_ode, 'rows': rows}


@dataclass
class ResidueReport:
    n_poles: int = 0
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {'n_poles': self.n_poles, 'passed': self.passed, 'violations': list(self.violations)}


def _phase(params: Params) -> PhaseData:
    data = connection_constants(params)
    if data.abs_rho - 1.0 < NEAR_BOUNDARY:
        logger.warning("|rho| - 1 = %.3g: close to the regime boundary, residual constants may be large",
                       data.abs_rho - 1.0)
    return PhaseData.from_connection(data)


def residual_scan(params: Params, x_grid: Sequence[float], settings: Optional[OdeSettings] = None,
                  trajectory: Optional[Trajectory] = None,
                  exclusion_band: float = Config.EXCLUSION_BAND) -> ResidualReport:
    """
    Compare the integrated q with the leading-order asymptotics on x_grid.

    A point is excluded when it lies within exclusion_band of a predicted pole or
    where |2 cos theta + 1| < 0.3; no residual is computed there.
    """
    phase = _phase(params)
    grid = [float(x) for x in x_grid]
    if not grid:
        return ResidualReport((), exclusion_band)
    if max(grid) >= 0.0:
        raise ParameterError("residual grid must lie on the negative axis")

    x_min = min(grid)
    if trajectory is None:
        trajectory = integrate(params, settings, x_end=x_min)
    poles = np.array([p.x_pole for p in predicted_poles(phase, x_min - exclusion_band - 1.0)])

    checkpoints = []
    for x in grid:
        near = poles.size > 0 and float(np.min(np.abs(poles - x))) < exclusion_band
        if near or abs(2.0 * math.cos(theta(x, phase)) + 1.0) < Config.COS_BAND:
            checkpoints.append(Checkpoint(x, True))
            continue
        q_ode, _ = evaluate(trajectory, x)
        q_asym = q_asymptotic(x, phase)
        if q_ode is POLE or q_asym is POLE:
            checkpoints.append(Checkpoint(x, True))
            continue
        residual = abs(q_ode - q_asym)
        checkpoints.append(Checkpoint(x, False, q_ode, q_asym, residual, abs(x) * residual))

    report = ResidualReport(tuple(checkpoints), exclusion_band)
    logger.info("residual scan: %d/%d checkpoints included, max scaled residual %.3g",
                len(report.included), len(checkpoints), report.max_scaled_residual())
    return report


def zero_bound(traj: Trajectory, phase: PhaseData, center: float, radius: float) -> ZeroBound:
    """
    Sampled sup |x/q_ode - h| and min |h'| around a zero of the model h = x/q_asym.

    When the error stays below |h| at both ends, the ODE zero lies within
    sup_error / min_slope of the model zero.
    """
    xs = np.linspace(center - radius, center + radius, ZERO_BOUND_SAMPLES)
    sup_error = 0.0
    min_slope = math.inf
    for x in xs:
        x = float(x)
        q, _ = evaluate(traj, x)
        f = 0.0 if q is POLE else x / q
        h = q_asymptotic_reciprocal(x, phase)
        sup_error = max(sup_error, abs(f - h))
        min_slope = min(min_slope, abs(q_asymptotic_reciprocal_prime(x, phase)))
    ends = min(abs(q_asymptotic_reciprocal(float(xs[0]), phase)),
               abs(q_asymptotic_reciprocal(float(xs[-1]), phase)))
    return ZeroBound(center, radius, sup_error, min_slope, sup_error < ends)


def _half_spacings(predicted: Dict[Tuple[int, Branch], float]) -> Dict[Tuple[int, Branch], float]:
    ordered = sorted(predicted.items(), key=lambda item: item[1])
    spacing = {}
    for i, (key, x) in enumerate(ordered):
        gaps = [abs(x - ordered[j][1]) for j in (i - 1, i + 1) if 0 <= j < len(ordered)]
        spacing[key] = 0.5 * min(gaps) if gaps else math.inf
    return spacing


def compare_poles(params: Params, n_range: Tuple[int, int], settings: Optional[OdeSettings] = None,
                  with_ode: bool = True, trajectory: Optional[Trajectory] = None) -> PoleComparison:
    """
    Pole table for n in n_range (inclusive), both branches.

    ODE poles are matched to the nearest implicit-phase root; a match must lie
    within half the local spacing of the predicted roots, and every ODE pole
    inside the table's span must be claimed by some row.
    """
    n_min, n_max = n_range
    if not 1 <= n_min <= n_max:
        raise ParameterError(f"invalid pole index range [{n_min}, {n_max}]")
    phase = _phase(params)

    predicted = {(n, br): pole_implicit(n, br, phase)
                 for n in range(max(1, n_min - 1), n_max + 2) for br in (Branch.PLUS, Branch.MINUS)}
    half = _half_spacings(predicted)
    keys = [(n, br) for n in range(n_min, n_max + 1) for br in (Branch.PLUS, Branch.MINUS)]

    ode_poles = []
    if with_ode:
        if trajectory is None:
            trajectory = integrate(params, settings, x_end=predicted[(n_max, Branch.PLUS)] - 0.5)
        ode_poles = list(trajectory.poles)

    rows = []
    claimed = set()
    for n, br in keys:
        x_imp = predicted[(n, br)]
        x_exp = pole_expansion(n, br, phase)
        if not with_ode:
            rows.append(PoleComparisonRow(n, br, x_imp, x_exp, half[(n, br)]))
            continue

        nearest = min(range(len(ode_poles)), key=lambda i: abs(ode_poles[i].x_pole - x_imp), default=None)
        if nearest is None or abs(ode_poles[nearest].x_pole - x_imp) >= half[(n, br)]:
            raise MatchFailure(f"no ODE pole within {half[(n, br)]:.3g} of predicted a_{n}^{br.value}", x=x_imp)
        claimed.add(nearest)
        pole = ode_poles[nearest]
        radius = 0.5 * half[(n, br)]
        rows.append(PoleComparisonRow(n, br, x_imp, x_exp, half[(n, br)], pole,
                                      zero_bound(trajectory, phase, x_imp, radius)))

    if with_ode:
        lo = predicted[(n_max, Branch.PLUS)] - half[(n_max, Branch.PLUS)]
        hi = predicted[(n_min, Branch.MINUS)] + half[(n_min, Branch.MINUS)]
        for i, pole in enumerate(ode_poles):
            if lo < pole.x_pole < hi and i not in claimed:
                raise MatchFailure("ODE pole has no predicted partner", x=pole.x_pole)

    rows.sort(key=lambda r: (r.n, 0 if r.branch is Branch.PLUS else 1))
    logger.info("compared %d predicted poles (ODE: %s)", len(rows), with_ode)
    return PoleComparison(tuple(rows), with_ode)


def residue_audit(traj: Trajectory) -> ResidueReport:
    """Residue +-1 and sign alternation of the recorded ODE poles."""
    report = ResidueReport(n_poles=len(traj.poles))
    previous = None
    for pole in traj.poles:
        deviation = abs(abs(pole.slope) - 1.0)
        if deviation > Config.RESIDUE_TOL:
            report.violations.append(f"pole at x={pole.x_pole:.12g}: |slope| - 1 = {deviation:.3g}")
        if previous is not None and previous.residue_sign == pole.residue_sign:
            report.violations.append(
                f"poles at x={previous.x_pole:.12g} and x={pole.x_pole:.12g} share residue sign {pole.residue_sign:+d}"
            )
        previous = pole
    return report
