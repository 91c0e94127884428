"""
Clarkson-McLeod Tools Package
Numerical solutions of Painleve IV (beta = 0) decaying like kappa D^2(sqrt2 x),
their connection constants and their pole fields on the negative axis
"""

from .core.connection import Params, ConnectionData, Regime, classify, connection_constants
from .core.piv_ode import OdeSettings, Trajectory, integrate, evaluate
from .core.asymptotics import PhaseData
from .config import Config
from . import core

__version__ = Config.VERSION

# Define what's available when using 'from clarkson_mcleod_tools import *'
__all__ = [
    'Params',
    'ConnectionData',
    'Regime',
    'classify',
    'connection_constants',
    'OdeSettings',
    'Trajectory',
    'integrate',
    'evaluate',
    'PhaseData',
    'Config',
    'core',
    '__version__'
]
