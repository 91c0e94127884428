import os
from dataclasses import dataclass, fields
from typing import Any, Dict, Optional


class Config:
    VERSION = "1.0.0"

    # Integration defaults
    X_START = 6.0
    X_END = -12.0
    RTOL = 1e-11
    ATOL = 1e-13
    MAX_STEP = 0.05
    CHART_SWITCH_Q = 10.0
    CHART_HYSTERESIS = 1.5
    POLE_REFINE_TOL = 1e-11
    MAX_SEGMENTS = 20000

    # Special functions
    PCF_SWITCH_Z = 11.0
    PCF_TAYLOR_STEP = 0.5
    PCF_NU_LIMIT = 6.0

    # Regime / validation
    SEPARATRIX_RTOL = 1e-12
    HALF_INTEGER_GAP = 1e-9
    EXCLUSION_BAND = 0.15
    COS_BAND = 0.3
    RESIDUAL_BOUND = 2.0
    RESIDUE_TOL = 1e-5
    VALIDATE_X_MAX = -6.0
    VALIDATE_GRID_STEP = 0.02

    LOG_ENV = "CLARKSON_MCLEOD_LOG"
    LOG_LEVELS = {
        'error': 'ERROR',
        'warn': 'WARNING',
        'info': 'INFO',
        'debug': 'DEBUG'
    }

    # Colors for console output
    COLORS = {
        'success': 'green',
        'error': 'red',
        'info': 'cyan',
        'warning': 'yellow'
    }


def log_level_from_env(default: str = 'warn') -> str:
    """Map the log-level environment variable onto a logging level name."""
    name = os.environ.get(Config.LOG_ENV, default).strip().lower()
    return Config.LOG_LEVELS.get(name, Config.LOG_LEVELS[default])


@dataclass
class CliConfig:
    """Parameters shared by all subcommands after flags and config file are merged."""
    alpha: float = 0.0
    kappa: float = 0.0
    x_start: float = Config.X_START
    x_end: float = Config.X_END
    rtol: float = Config.RTOL
    atol: float = Config.ATOL
    output_format: str = 'tsv'
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.output_format not in ('tsv', 'json'):
            raise ValueError(f"Unknown output format: {self.output_format}")

    @classmethod
    def merge(cls, flags: Dict[str, Any], file_values: Optional[Dict[str, str]] = None) -> 'CliConfig':
        """Build a config from defaults < config file < command-line flags."""
        known = {f.name: f for f in fields(cls)}
        values: Dict[str, Any] = {}

        for key, raw in (file_values or {}).items():
            if key not in known:
                raise ValueError(f"Unknown config key: {key}")
            values[key] = raw if key in ('output_format', 'output_path') else float(raw)

        for key, value in flags.items():
            if key in known and value is not None:
                values[key] = value

        return cls(**values)


def load_config_file(path: str) -> Dict[str, str]:
    """Read a key=value config file; '#' starts a comment."""
    values = {}
    with open(path, 'r', encoding='utf-8') as f:
        for lineno, line in enumerate(f, 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = line.split('=', 1)
            values[key.strip().replace('-', '_')] = value.strip()
    return values
