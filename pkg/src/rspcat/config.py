"""Experiment configuration: a flat ``key = value`` text format.

Example::

    V_s = 0.24
    V_a = 1.3
    eta_A = 0.9
    eta_B = 0.9
    theta_rad = 1.5707963267948966

Lines starting with ``#`` or ``;`` are comments.  ``cutoff = auto`` lets the
library pick a cutoff from the tail tolerance.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, fields

from .errors import ValidationError

_SECTION = "experiment"


@dataclass(frozen=True)
class ExperimentConfig:
    squeezing_db: float | None = None
    V_s: float | None = None
    V_a: float | None = None
    eta_A: float = 1.0
    eta_B: float = 1.0
    n_subtract: int = 1
    theta_rad: float = math.pi / 2
    window_dx: float = 0.0
    cutoff: int | None = 40
    grid_extent: float = 5.0
    grid_resolution: int = 201
    seed: int = 0
    click_rate_hz: float | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        has_db = self.squeezing_db is not None
        has_v = self.V_s is not None or self.V_a is not None
        if has_db == has_v:
            raise ValidationError("config: give exactly one of squeezing_db or (V_s, V_a)")
        if has_v and (self.V_s is None or self.V_a is None):
            raise ValidationError("config: V_s and V_a must be given together")
        if has_db and not (math.isfinite(self.squeezing_db) and self.squeezing_db >= 0):
            raise ValidationError(f"config: squeezing_db must be finite and >= 0, got {self.squeezing_db}")
        if has_v:
            if not (0 < self.V_s <= 0.5 <= self.V_a):
                raise ValidationError("config: need 0 < V_s <= 1/2 <= V_a")
            if self.V_s * self.V_a < 0.25 - 1e-12:
                raise ValidationError(f"config: V_s*V_a = {self.V_s * self.V_a:.6g} < 1/4 is unphysical")
        for name in ("eta_A", "eta_B"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"config: {name} must lie in [0, 1], got {v}")
        if self.n_subtract < 1:
            raise ValidationError("config: n_subtract must be >= 1")
        if not (self.window_dx >= 0.0):
            raise ValidationError("config: window_dx must be >= 0")
        if self.cutoff is not None and self.cutoff < 1:
            raise ValidationError("config: cutoff must be >= 1 or 'auto'")
        if not (self.grid_extent > 0):
            raise ValidationError("config: grid_extent must be > 0")
        if self.grid_resolution < 2:
            raise ValidationError("config: grid_resolution must be >= 2")
        if self.click_rate_hz is not None and self.click_rate_hz < 0:
            raise ValidationError("config: click_rate_hz must be >= 0")
        if not math.isfinite(self.theta_rad):
            raise ValidationError("config: theta_rad must be finite")

    def source_variances(self) -> tuple[float, float]:
        """``(V_s, V_a)`` of the source; a dB spec means a pure source."""
        if self.squeezing_db is not None:
            v_s = 0.5 * 10.0 ** (-self.squeezing_db / 10.0)
            return v_s, 0.25 / v_s
        return self.V_s, self.V_a

    def is_pure_source(self) -> bool:
        v_s, v_a = self.source_variances()
        return abs(v_s * v_a - 0.25) <= 1e-12

    def replace(self, **changes) -> ExperimentConfig:
        return dataclasses.replace(self, **changes)


_FIELD_TYPES = {
    "squeezing_db": float,
    "V_s": float,
    "V_a": float,
    "eta_A": float,
    "eta_B": float,
    "n_subtract": int,
    "theta_rad": float,
    "window_dx": float,
    "cutoff": int,
    "grid_extent": float,
    "grid_resolution": int,
    "seed": int,
    "click_rate_hz": float,
}


def coerce_value(key: str, text: str):
    """Convert the text of one config value to the field's type."""
    if key not in _FIELD_TYPES:
        raise ValidationError(f"config: unknown key '{key}'")
    text = str(text).strip()
    if key == "cutoff" and text.lower() == "auto":
        return None
    kind = _FIELD_TYPES[key]
    try:
        if kind is int:
            return int(text)
        return float(text)
    except ValueError:
        raise ValidationError(f"config: {key}: cannot parse {text!r} as {kind.__name__}") from None


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse the flat format; ``overrides`` (already typed) win over file values."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ValidationError(f"config: {exc}") from None
    values = {k: coerce_value(k, v) for k, v in cp[_SECTION].items()}
    if overrides:
        values.update(overrides)
        # a source given on the command line replaces the other source form
        if "squeezing_db" in overrides and overrides["squeezing_db"] is not None:
            values.pop("V_s", None)
            values.pop("V_a", None)
        elif overrides.get("V_s") is not None or overrides.get("V_a") is not None:
            values.pop("squeezing_db", None)
    return ExperimentConfig(**values)


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"config: cannot read {path}: {exc.strerror}") from None
    return parse_config(text, overrides)


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical text form; ``parse_config(serialize_config(c)) == c``."""
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            if f.name == "cutoff":
                lines.append("cutoff = auto")
            continue
        lines.append(f"{f.name} = {v!r}")
    return "\n".join(lines) + "\n"
