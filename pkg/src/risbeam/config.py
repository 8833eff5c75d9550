"""System configuration, unit-tagged parsing and config-file loading."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

__all__ = ["SystemConfig", "parse_quantity", "load_config", "to_db", "from_db"]

_QTY = re.compile(r"^\s*([+-]?(?:inf|[0-9.]+(?:e[+-]?\d+)?))\s*(db|lin|linear)?\s*$", re.I)

# fields given as amplitudes (dB -> 10^(x/20)); everything else is a power ratio
_AMPLITUDE_FIELDS = {"mu"}
_ANGLE_FIELDS = {"theta_bd_d", "theta_bd_i", "theta_rd", "theta_ra"}


def to_db(x: float, amplitude: bool = False) -> float:
    if x <= 0:
        return -math.inf
    return (20.0 if amplitude else 10.0) * math.log10(x)


def from_db(x: float, amplitude: bool = False) -> float:
    if math.isinf(x) and x < 0:
        return 0.0
    return 10.0 ** (x / (20.0 if amplitude else 10.0))


def parse_quantity(value: Any, amplitude: bool = False) -> float:
    """Turn ``5``, ``"5 dB"``, ``"inf"``, ``{"value": 5, "unit": "dB"}`` into a linear float.

    dB on an amplitude quantity means a power ratio, so the linear amplitude is
    ``10**(dB/20)`` and its square is the power ratio.
    """
    if isinstance(value, Mapping):
        unit = str(value.get("unit", "linear")).lower()
        v = float(value["value"])
        return from_db(v, amplitude) if unit == "db" else v
    if isinstance(value, (int, float)):
        return float(value)
    m = _QTY.match(str(value))
    if not m:
        raise ValueError(f"cannot parse quantity {value!r}")
    v = float(m.group(1))
    unit = (m.group(2) or "linear").lower()
    return from_db(v, amplitude) if unit == "db" else v


@dataclass(frozen=True)
class SystemConfig:
    """Geometry, power budget and fading parameters of one RIS-aided MISO link.

    ``gamma`` and ``mu`` are derived from powers and distances unless pinned
    through ``gamma_fixed`` / ``mu_fixed`` (the experiments pin gamma = 1).
    Angles are radians.
    """

    M: int = 4
    N: int = 64
    Ps: float = 1.0
    sigma_n_sq: float = 1.0
    alpha: float = 2.0
    d0: float = 1.0
    d1: float = 1.0
    d2: float = 1.0
    K0: float = 10.0
    K1: float = 10.0
    K2: float = 10.0
    theta_bd_d: float = math.radians(70.0)
    theta_bd_i: float = math.radians(30.0)
    theta_rd: float = math.radians(60.0)
    theta_ra: float = math.radians(45.0)
    d_over_lambda: float = 0.5
    direct_link: bool = True
    gamma_fixed: float | None = None
    mu_fixed: float | None = None
    seed: int = 0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1 or int(self.N) != self.N or self.N < 1:
            raise ValueError("M and N must be positive integers")
        for name in ("Ps", "sigma_n_sq", "alpha", "d0", "d1", "d2", "d_over_lambda"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("K0", "K1", "K2"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0 (inf allowed)")
        if self.gamma_fixed is not None and not self.gamma_fixed > 0:
            raise ValueError("gamma must be > 0")
        if self.mu_fixed is not None and not self.mu_fixed >= 0:
            raise ValueError("mu must be >= 0")

    @property
    def gamma(self) -> float:
        if self.gamma_fixed is not None:
            return float(self.gamma_fixed)
        return self.Ps * (self.d1 * self.d2) ** (-self.alpha) / self.sigma_n_sq

    @property
    def mu(self) -> float:
        if not self.direct_link:
            return 0.0
        if self.mu_fixed is not None:
            return float(self.mu_fixed)
        return (self.d0 / (self.d1 * self.d2)) ** (-self.alpha / 2.0)

    @staticmethod
    def kappas(K: float) -> tuple[float, float]:
        """(LoS, scattered) amplitude weights for Rician factor K."""
        if math.isinf(K):
            return 1.0, 0.0
        return math.sqrt(K / (1.0 + K)), math.sqrt(1.0 / (1.0 + K))

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def with_k(self, K: float) -> "SystemConfig":
        """Same config with one Rician factor on all three links."""
        return self.replace(K0=K, K1=K, K2=K)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, default=repr)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base: "SystemConfig | None" = None) -> "SystemConfig":
        """Build from loosely typed values (config file or CLI strings).

        ``gamma`` / ``mu`` keys pin the derived quantities; angle fields may be
        given with a ``deg`` suffix.
        """
        base = base or cls()
        known = {f.name: f for f in fields(cls)}
        changes: dict[str, Any] = {}
        for key, raw in data.items():
            if raw is None:
                continue
            if key in ("gamma", "mu"):
                changes[f"{key}_fixed"] = parse_quantity(raw, amplitude=key in _AMPLITUDE_FIELDS)
                continue
            if key not in known:
                raise KeyError(f"unknown config field {key!r}")
            if key in ("M", "N", "seed"):
                changes[key] = int(raw)
            elif key == "direct_link":
                changes[key] = raw if isinstance(raw, bool) else str(raw).lower() in ("1", "true", "yes", "on")
            elif key in _ANGLE_FIELDS:
                changes[key] = _parse_angle(raw)
            elif key in ("gamma_fixed", "mu_fixed"):
                changes[key] = parse_quantity(raw, amplitude=key == "mu_fixed")
            else:
                changes[key] = parse_quantity(raw)
        return dataclasses.replace(base, **changes)


def _parse_angle(raw: Any) -> float:
    if isinstance(raw, (int, float)):
        return float(raw)
    s = str(raw).strip().lower()
    if s.endswith("deg"):
        return math.radians(float(s[:-3]))
    if s.endswith("rad"):
        return float(s[:-3])
    return float(s)


def load_config(path: str | Path | None) -> dict:
    """Read a YAML (or JSON) config file into a plain dict; ``None`` gives ``{}``."""
    if path is None:
        return {}
    text = Path(path).read_text()
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a mapping")
    return data
