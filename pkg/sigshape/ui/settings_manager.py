# Settings management for SigShape
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional, Tuple

from sigshape.core.analysis import DistanceParams, Method, default_workers
from sigshape.core.errors import InvalidParameter, UsageError
from sigshape.core.file_handler import FileHandler
from sigshape.core.reparam import DEFAULT_GRID_SIZE, DEFAULT_MAX_STEP
from sigshape.core.tensor import DEFAULT_LEVEL, MAX_LEVEL

# Get logger for this module
logger = logging.getLogger('SigShape.settings_manager')

FORMATS = ('csv', 'json')


@dataclass
class RunConfig:
    """Everything a subcommand needs; flags > config file > these defaults."""

    method: str = Method.SIGNATURE.value
    level: int = DEFAULT_LEVEL
    grid: int = DEFAULT_GRID_SIZE
    max_step: int = DEFAULT_MAX_STEP
    penalty: float = 0.0
    symmetric: bool = True
    per_joint: bool = False
    joints: Optional[List[str]] = None
    weights: Optional[List[float]] = None
    seed: int = 0
    out: Optional[str] = None
    format: str = 'csv'
    parallel: bool = True
    workers: int = field(default_factory=default_workers)
    svg: Optional[str] = None
    k: int = 1
    dim: int = 2

    def distance_params(self) -> DistanceParams:
        return DistanceParams(
            level=self.level,
            grid=self.grid,
            max_step=self.max_step,
            penalty=self.penalty,
            symmetric=self.symmetric,
            per_joint=self.per_joint,
            joint_weights=tuple(self.weights) if self.weights else None,
        )


def _split_list(value: Any) -> List[str]:
    if isinstance(value, (list, tuple)):
        return [str(v).strip() for v in value if str(v).strip()]
    return [v.strip() for v in str(value).split(',') if v.strip()]


def _to_bool(value: Any, name: str) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    raise UsageError(f"{name}: expected a boolean, got {value!r}")


def _coerce(name: str, value: Any) -> Any:
    """Convert a raw config value (INI strings or JSON scalars) to the field type."""
    if value is None or value == '':
        return None if name in ('joints', 'weights', 'out', 'svg') else value
    try:
        if name in ('level', 'grid', 'max_step', 'seed', 'workers', 'k', 'dim'):
            return int(value)
        if name == 'penalty':
            return float(value)
        if name in ('symmetric', 'per_joint', 'parallel'):
            return _to_bool(value, name)
        if name == 'joints':
            return _split_list(value)
        if name == 'weights':
            return [float(v) for v in _split_list(value)]
    except ValueError:
        raise UsageError(f"{name}: invalid value {value!r}") from None
    return str(value)


class SettingsManager:
    """Builds and validates a RunConfig from defaults, a config file and flags."""

    def __init__(self, file_handler: Optional[FileHandler] = None):
        self.file_handler = file_handler or FileHandler()
        self.field_names = {f.name for f in fields(RunConfig)}

    def load_file(self, path: str) -> Dict[str, Any]:
        """
        Reads and type-converts a config file.

        Args:
            path (str): JSON or INI file

        Returns:
            Dict[str, Any]: RunConfig field values found in the file
        """
        raw = self.file_handler.read_settings(path)
        values = {}
        for key, value in raw.items():
            name = key.strip().lower().replace('-', '_')
            if name not in self.field_names:
                raise UsageError(f"{path}: unknown setting {key!r}")
            values[name] = _coerce(name, value)
        logger.info(f"Loaded {len(values)} settings from {path}")
        return values

    def build(self, flags: Dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
        """
        Merges the three layers; flags left at None do not override.

        Args:
            flags (Dict[str, Any]): Parsed command-line values by field name
            config_path (str): Optional config file

        Returns:
            RunConfig: Validated configuration
        """
        config = RunConfig()
        if config_path:
            config = replace(config, **self.load_file(config_path))
        overrides = {k: v for k, v in flags.items() if k in self.field_names and v is not None}
        config = replace(config, **overrides)
        self.validate(config)
        logger.info(f"Run configuration: {config}")
        return config

    def validate(self, config: RunConfig):
        """Range checks that do not depend on the data."""
        config.method = Method.parse(config.method).value
        checks: List[Tuple[bool, str]] = [
            (1 <= config.level <= MAX_LEVEL, f"--level must be in 1..{MAX_LEVEL}, got {config.level}"),
            (config.grid >= 2, f"--grid must be at least 2, got {config.grid}"),
            (config.max_step >= 1, f"--max-step must be at least 1, got {config.max_step}"),
            (config.penalty >= 0, f"--penalty must be non-negative, got {config.penalty}"),
            (config.workers >= 1, f"--workers must be at least 1, got {config.workers}"),
            (config.k >= 1, f"--k must be at least 1, got {config.k}"),
            (config.dim >= 1, f"--dim must be at least 1, got {config.dim}"),
            (config.format in FORMATS, f"--format must be one of {', '.join(FORMATS)}, got {config.format!r}"),
            (not config.weights or all(w > 0 for w in config.weights),
             f"--weights must be positive, got {config.weights}"),
        ]
        for ok, message in checks:
            if not ok:
                raise InvalidParameter(message)
        if config.weights and config.joints and len(config.weights) != len(config.joints):
            raise InvalidParameter(
                f"--weights has {len(config.weights)} entries for {len(config.joints)} --joints"
            )
