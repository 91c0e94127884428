from .connection import Params, ConnectionData, StokesRep, Regime
from .piv_ode import OdeSettings, ChartState, Trajectory, PoleRecord, POLE
from .asymptotics import PhaseData
from .validation import ResidualReport, PoleComparison, ResidueReport
from . import errors
from . import utils

__all__ = [
    'Params',
    'ConnectionData',
    'StokesRep',
    'Regime',
    'OdeSettings',
    'ChartState',
    'Trajectory',
    'PoleRecord',
    'POLE',
    'PhaseData',
    'ResidualReport',
    'PoleComparison',
    'ResidueReport',
    'errors',
    'utils'
]
