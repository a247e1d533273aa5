"""Physical parameters of the driven cavity + two-level atom model.

All rates (g, kappa, epsilon, gamma_c) are dimensionless multiples of an
arbitrary time unit; nothing in the package depends on a choice of units.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import DomainError

__all__ = [
    "ModelParams",
    "TruncationSpec",
    "RegimeLabel",
    "validate_params",
    "regime_report",
    "parse_config",
    "load_config",
]


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``g``, cavity damping ``kappa`` and drive amplitude ``epsilon``.

    The drive amplitude is the product of the drive coupling and the real
    c-number amplitude of the driving field; those two never appear apart.
    ``gamma_c`` is derived on access and is not a constructor argument.
    """

    g: float
    kappa: float
    epsilon: float

    def __post_init__(self) -> None:
        for name in ("g", "kappa", "epsilon"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise DomainError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.kappa <= 0.0:
            raise DomainError(f"kappa must be > 0, got {self.kappa}")
        if self.g < 0.0:
            raise DomainError(f"g must be >= 0, got {self.g}")
        if self.epsilon < 0.0:
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")

    @property
    def gamma_c(self) -> float:
        """Cavity-induced atomic decay constant 4 g^2 / kappa."""
        return 4.0 * self.g * self.g / self.kappa

    def replace(self, **changes: float) -> "ModelParams":
        values = {"g": self.g, "kappa": self.kappa, "epsilon": self.epsilon}
        values.update(changes)
        return ModelParams(**values)


@dataclass(frozen=True)
class TruncationSpec:
    """Fock-space cutoff for the exact oracle.

    ``n_max`` is the highest retained photon number. ``edge_tolerance`` bounds
    the population allowed on that level before results are rejected.
    """

    n_max: int = 24
    edge_tolerance: float = 1e-8

    def __post_init__(self) -> None:
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, int):
            raise DomainError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < 2:
            raise DomainError(f"n_max must be >= 2, got {self.n_max}")
        tol = self.edge_tolerance
        if not isinstance(tol, (int, float)) or not (0.0 < tol < 1.0):
            raise DomainError(f"edge_tolerance must lie in (0, 1), got {tol!r}")

    @property
    def cavity_dim(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)


class RegimeLabel(enum.Enum):
    FREE_MODE = "FreeMode"
    VACUUM_COUPLED = "VacuumCoupled"
    DRIVEN_COUPLED = "DrivenCoupled"


def validate_params(g: float, kappa: float, epsilon: float) -> ModelParams:
    """Build a validated :class:`ModelParams`; raises :class:`DomainError`."""
    return ModelParams(g=g, kappa=kappa, epsilon=epsilon)


def regime_report(p: ModelParams) -> RegimeLabel:
    if p.g == 0.0:
        return RegimeLabel.FREE_MODE
    if p.epsilon == 0.0:
        return RegimeLabel.VACUUM_COUPLED
    return RegimeLabel.DRIVEN_COUPLED


_REQUIRED_KEYS = ("g", "kappa", "epsilon")
_TRUNCATION_KEYS = ("n_max", "edge_tolerance")


@dataclass(frozen=True)
class Config:
    params: ModelParams
    truncation: TruncationSpec = field(default_factory=TruncationSpec)
    extra: Mapping[str, Any] = field(default_factory=dict)


def parse_config(
    obj: Any, allowed_extra: tuple[str, ...] = ()
) -> Config:
    """Strictly parse a config mapping.

    Keys ``g``, ``kappa``, ``epsilon`` are required; ``n_max`` and
    ``edge_tolerance`` are optional. Any other key must be listed in
    ``allowed_extra`` (used by CLI subcommands), otherwise it is an error.
    """
    if not isinstance(obj, Mapping):
        raise DomainError("config must be a JSON object")
    unknown = sorted(set(obj) - set(_REQUIRED_KEYS) - set(_TRUNCATION_KEYS) - set(allowed_extra))
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in _REQUIRED_KEYS if k not in obj]
    if missing:
        raise DomainError(f"missing config keys: {', '.join(missing)}")
    params = ModelParams(**{k: obj[k] for k in _REQUIRED_KEYS})
    truncation = TruncationSpec(**{k: obj[k] for k in _TRUNCATION_KEYS if k in obj})
    extra = {k: obj[k] for k in allowed_extra if k in obj}
    return Config(params=params, truncation=truncation, extra=extra)


def load_config(path: str | Path, allowed_extra: tuple[str, ...] = ()) -> Config:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from exc
    return parse_config(obj, allowed_extra)
