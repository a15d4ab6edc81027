"""Runtime configuration for pressure sweeps, scans and quadrature."""

import os
from dataclasses import dataclass, replace, fields


@dataclass(frozen=True)
class Config:
    """Knobs shared by the transfer, scan and measure machinery.

    ``depth_min``/``depth_max`` bound the cylinder depth sweep, ``bracket_tol``
    is the stabilisation tolerance of the depth sweep, ``power_iter_tol`` the
    residual tolerance of the spectral-radius bracket, and
    ``blowup_threshold`` the lower-bracket level beyond which a negative-t
    pressure is reported as presumed infinite.
    """

    depth_min: int = 8
    depth_max: int = 20
    bracket_tol: float = 1e-3
    power_iter_tol: float = 1e-10
    power_iter_cap: int = 200_000
    blowup_threshold: float = 20.0
    riesz_truncation_offset: int = 6
    quad_budget: int = 1 << 27
    workers: int = 0  # 0 = use all logical cores
    output_format: str = "csv"

    MAX_DEPTH = 30

    def __post_init__(self):
        if not (1 <= self.depth_min <= self.depth_max <= self.MAX_DEPTH):
            raise ValueError(
                f"need 1 <= depth_min <= depth_max <= {self.MAX_DEPTH}, "
                f"got [{self.depth_min}, {self.depth_max}]"
            )
        for name in ("bracket_tol", "power_iter_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output_format must be 'csv' or 'json'")

    def effective_workers(self) -> int:
        env = os.environ.get("THERMOSCOPE_WORKERS")
        if env is not None:
            return max(1, int(env))
        if self.workers > 0:
            return self.workers
        return os.cpu_count() or 1

    def updated(self, **kwargs) -> "Config":
        return replace(self, **kwargs)


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _parse_value(name: str, raw: str):
    ftype = _FIELD_TYPES[name]
    if ftype is int or ftype == "int":
        return int(raw)
    if ftype is float or ftype == "float":
        return float(raw)
    return raw


def load_config(path: str, base: Config | None = None) -> Config:
    """Read ``key = value`` lines (``#`` comments allowed) into a Config."""
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in line.split("=", 1))
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            overrides[key] = _parse_value(key, raw)
    return (base or Config()).updated(**overrides)
