"""Run configurations and their flat ``key = value`` text form."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .basis import parse_rule
from .errors import ConfigError, DomainError

COMMANDS = {
    "expand": (),
    "probe": ("divergence", "infinite", "hdt", "conditions"),
    "stats": ("dstar", "count", "nidx", "ratio", "distinct", "digitset", "density", "massdim"),
    "moran": ("fww", "gamma"),
    "construct": ("lambda", "theta", "ndn", "digitrange"),
}
FORMATS = ("csv", "jsonl")
POINT_SOURCES = ("weyl-golden", "weyl-alpha", "scaled-non-ud")
STREAM_SOURCES = ("rational", "random")
PATTERNS = ("example1", "example2")


@dataclass(frozen=True)
class RunConfig:
    command: str
    target: str | None = None
    q: str = "succ"
    seed: int | None = None
    horizon: int | None = None
    checkpoints: tuple[int, ...] = ()
    format: str = "csv"
    raw: bool = False
    search_cap: int = 1_000_000
    source: str | None = None
    alpha: str | None = None
    x: str | None = None
    block: tuple[int, ...] | None = None
    block2: tuple[int, ...] | None = None
    set: str | None = None
    m: int | None = None
    k: int = 1
    nk: str | None = None
    ck: str | None = None
    depth: int | None = None
    pattern: str | None = None
    ell: int = 1
    on_empty: str = "error"
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def stochastic(self) -> bool:
        if self.command == "construct":
            return True
        return self.command == "stats" and self.source == "random"

    @property
    def last(self) -> int | None:
        return self.checkpoints[-1] if self.checkpoints else self.horizon


_INT_FIELDS = {"seed", "horizon", "search_cap", "m", "k", "depth", "ell"}
_TUPLE_FIELDS = {"checkpoints", "block", "block2"}
_BOOL_FIELDS = {"raw"}
KEYS = tuple(f.name for f in dataclasses.fields(RunConfig) if f.name != "extra")


def _int_tuple(key: str, text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{key}: expected comma-separated integers, got {text!r}") from None


def coerce(key: str, value):
    """Turn a textual value into the field's type."""
    if value is None or not isinstance(value, str):
        return value
    if key in _INT_FIELDS:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {value!r}") from None
    if key in _TUPLE_FIELDS:
        return _int_tuple(key, value)
    if key in _BOOL_FIELDS:
        low = value.strip().lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"{key}: expected true/false, got {value!r}")
        return low in ("true", "1", "yes")
    return value


def problems(cfg: RunConfig) -> list[str]:
    """Every violation in ``cfg``; empty when it is valid."""
    out = []
    if cfg.command not in COMMANDS:
        out.append(f"command: unknown {cfg.command!r}; known: {', '.join(COMMANDS)}")
    else:
        targets = COMMANDS[cfg.command]
        if targets and cfg.target not in targets:
            out.append(f"target: {cfg.target!r} is not one of {', '.join(targets)} for {cfg.command}")
    try:
        parse_rule(cfg.q)
    except DomainError as exc:
        out.append(f"q: {exc}")
    cps = cfg.checkpoints
    if cps and cps[0] < 1:
        out.append(f"checkpoints: must be >= 1, got {cps[0]}")
    for a, b in zip(cps, cps[1:]):
        if b <= a:
            out.append(f"checkpoints: not strictly increasing at pair ({a}, {b})")
    if cfg.horizon is not None and cps and cfg.horizon < cps[-1]:
        out.append(f"horizon: {cfg.horizon} is below the last checkpoint {cps[-1]}")
    if cfg.command in ("probe", "stats", "construct", "expand") and cfg.last is None:
        out.append("checkpoints: give checkpoints or a horizon")
    if cfg.stochastic and cfg.seed is None:
        out.append("seed: required for stochastic sources")
    if cfg.format not in FORMATS:
        out.append(f"format: {cfg.format!r} is not one of {', '.join(FORMATS)}")
    if cfg.search_cap < 1:
        out.append("search_cap: must be positive")
    if cfg.source is not None and cfg.source not in POINT_SOURCES + STREAM_SOURCES:
        out.append(f"source: unknown {cfg.source!r}; known: {', '.join(POINT_SOURCES + STREAM_SOURCES)}")
    if cfg.source == "weyl-alpha" and cfg.alpha is None:
        out.append("alpha: required for source weyl-alpha")
    if cfg.source == "rational" and cfg.x is None or cfg.command == "expand" and cfg.x is None:
        out.append("x: required for rational expansions")
    if cfg.pattern is not None and cfg.pattern not in PATTERNS:
        out.append(f"pattern: unknown {cfg.pattern!r}; known: {', '.join(PATTERNS)}")
    if cfg.on_empty not in ("error", "clip"):
        out.append(f"on_empty: {cfg.on_empty!r} is not error or clip")
    if cfg.k < 1:
        out.append("k: must be >= 1")
    if cfg.ell < 0:
        out.append("ell: must be >= 0")
    if cfg.command == "moran" and cfg.target == "fww":
        if cfg.depth is None and cfg.pattern is None:
            out.append("depth: required for moran fww")
        if cfg.pattern is None and (cfg.nk is None or cfg.ck is None):
            out.append("nk/ck: required for moran fww without a pattern")
    if cfg.command in ("probe",) and cfg.target in ("hdt", "conditions") and cfg.pattern is None:
        out.append("pattern: required for this probe")
    if cfg.command == "stats" and cfg.target in ("count", "nidx", "ratio") and cfg.block is None:
        out.append("block: required for this metric")
    if cfg.command == "stats" and cfg.target == "ratio" and cfg.block2 is None:
        out.append("block2: required for ratio")
    if cfg.command == "stats" and cfg.target == "massdim" and cfg.set is None:
        out.append("set: required for massdim")
    if cfg.command == "construct" and cfg.target == "digitrange" and cfg.set is None:
        out.append("set: required for digitrange")
    return out


def validate(cfg: RunConfig) -> RunConfig:
    bad = problems(cfg)
    if bad:
        raise ConfigError("; ".join(bad))
    return cfg


def make_config(values: dict) -> RunConfig:
    unknown = sorted(set(values) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}; known: {', '.join(KEYS)}")
    if "command" not in values:
        raise ConfigError("command: missing")
    clean = {k: coerce(k, v) for k, v in values.items() if v is not None}
    return validate(RunConfig(**clean))


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    values: dict[str, str] = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            errors.append(f"line {lineno}: expected key = value")
            continue
        if key not in KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            errors.append(f"line {lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    if errors:
        raise ConfigError("; ".join(errors))
    return make_config(values)


def _render_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ",".join(map(str, v))
    return str(v)


def render_config(cfg: RunConfig) -> str:
    """Text that :func:`parse_config` maps back to ``cfg``; unset optional keys are left out."""
    lines = []
    for key in KEYS:
        v = getattr(cfg, key)
        if v is None or v == ():
            continue
        lines.append(f"{key} = {_render_value(v)}")
    return "\n".join(lines) + "\n"


def config_items(cfg: RunConfig) -> list[tuple[str, str]]:
    return [(k, _render_value(getattr(cfg, k))) for k in KEYS
            if getattr(cfg, k) is not None and getattr(cfg, k) != ()]
