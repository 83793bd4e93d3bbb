"""Plain-text pipeline configuration.

One key=value per line, ``#`` comments, empty value meaning "unset" for
optional keys. Unknown keys are rejected rather than ignored, so typos
fail loudly. The canonical serialization round-trips through the parser
and is what gets hashed into run manifests.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError
from .evaluation import DEFAULT_KS
from .imputation import DEFAULT_LAMBDA_GRID, ImputeParams
from .selection import METHODS


@dataclass
class PipelineConfig:
    """Everything a pipeline run needs beyond the command name."""

    features: list[str] = field(default_factory=list)
    labels: str | None = None
    reference: str | None = None
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    ks: list[int] = field(default_factory=lambda: list(DEFAULT_KS))
    lambda_grid: list[float] = field(default_factory=lambda: list(DEFAULT_LAMBDA_GRID))
    max_rank: int | None = None
    tol: float = 1e-5
    max_iter: int = 200
    holdout_fraction: float = 0.1
    neighbors: int = 5
    seed: int = 0
    output_dir: str = "out"
    continuous: bool = False
    prefix_filter: str | None = None
    jobs: int = 1

    def impute_params(self) -> ImputeParams:
        return ImputeParams(
            lambda_grid=tuple(self.lambda_grid),
            max_rank=self.max_rank,
            tol=self.tol,
            max_iter=self.max_iter,
            holdout_fraction=self.holdout_fraction,
        )


def _parse_bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


def _parse_str_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _parse_int_list(raw: str) -> list[int]:
    return [int(item) for item in _parse_str_list(raw)]


def _parse_float_list(raw: str) -> list[float]:
    return [float(item) for item in _parse_str_list(raw)]


def _parse_opt_str(raw: str) -> str | None:
    return raw.strip() or None


def _parse_opt_int(raw: str) -> int | None:
    return int(raw) if raw.strip() else None


def _fmt_list(value) -> str:
    return ",".join(f"{v:g}" if isinstance(v, float) else str(v) for v in value)


def _fmt_opt(value) -> str:
    return "" if value is None else str(value)


_PARSERS = {
    "features": _parse_str_list,
    "labels": _parse_opt_str,
    "reference": _parse_opt_str,
    "methods": _parse_str_list,
    "ks": _parse_int_list,
    "lambda_grid": _parse_float_list,
    "max_rank": _parse_opt_int,
    "tol": float,
    "max_iter": int,
    "holdout_fraction": float,
    "neighbors": int,
    "seed": int,
    "output_dir": str,
    "continuous": _parse_bool,
    "prefix_filter": _parse_opt_str,
    "jobs": int,
}

_FORMATTERS = {
    "features": _fmt_list,
    "labels": _fmt_opt,
    "reference": _fmt_opt,
    "methods": _fmt_list,
    "ks": _fmt_list,
    "lambda_grid": _fmt_list,
    "max_rank": _fmt_opt,
    "tol": lambda v: f"{v:g}",
    "max_iter": str,
    "holdout_fraction": lambda v: f"{v:g}",
    "neighbors": str,
    "seed": str,
    "output_dir": str,
    "continuous": lambda v: "true" if v else "false",
    "prefix_filter": _fmt_opt,
    "jobs": str,
}


def set_key(config: PipelineConfig, key: str, raw: str) -> None:
    """Assign one key from its textual form; unknown keys are an error."""
    parser = _PARSERS.get(key)
    if parser is None:
        raise ConfigError(f"unknown config key: {key!r}")
    try:
        value = parser(raw)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None
    setattr(config, key, value)


def parse_config(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    """Parse key=value lines on top of ``base`` (defaults when omitted)."""
    config = base or PipelineConfig()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        set_key(config, key.strip(), raw.strip())
    return config


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))


def serialize_config(config: PipelineConfig) -> str:
    """Canonical text form; parsing it back reproduces the config."""
    lines = []
    for f in fields(config):
        lines.append(f"{f.name}={_FORMATTERS[f.name](getattr(config, f.name))}")
    return "\n".join(lines) + "\n"


def config_hash(config: PipelineConfig) -> str:
    """Hash of the canonical serialization, recorded in run manifests."""
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()
