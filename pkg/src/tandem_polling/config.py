"""Experiment configuration files.

Flat ``key = value`` text, one pair per line, ``#`` starts a comment.  Rate
and buffer keys are named exactly like :class:`NetworkParams` fields; the
remaining keys are ``strategy``, ``n_list``, ``mode`` and the optional
simulation settings ``horizon``, ``warmup``, ``reps``, ``seed`` and ``out``.

``n_list`` is a comma-separated list of buffer sizes.  An entry ``n`` sets
both buffers; ``n1:n2`` sets them separately.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .exceptions import InvalidConfig
from .model import NetworkParams, Strategy

PARAM_KEYS = tuple(f.name for f in dataclasses.fields(NetworkParams))
RATE_KEYS = tuple(k for k in PARAM_KEYS if k not in ("n1", "n2"))
MODES = ("solve", "simulate", "both")
EXTRA_KEYS = ("strategy", "n_list", "mode", "horizon", "warmup", "reps", "seed", "out")


@dataclass(frozen=True)
class ExperimentConfig:
    params: NetworkParams
    strategy: str = "both"
    buffer_sweep: tuple[tuple[int, int], ...] = ()
    mode: str = "solve"
    out: str | None = None
    horizon: float = 1e6
    warmup: float | None = None
    replications: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidConfig(f"expected one of {', '.join(MODES)}, got {self.mode!r}", "mode")
        strategy_names(self.strategy)
        if not self.buffer_sweep:
            object.__setattr__(self, "buffer_sweep", ((self.params.n1, self.params.n2),))

    @property
    def strategies(self) -> list[Strategy]:
        return strategy_names(self.strategy)


def strategy_names(value: str) -> list[Strategy]:
    """``"sp"``, ``"op"`` or ``"both"`` (any case) to a list of strategies."""
    text = str(value).strip().upper()
    if text == "BOTH":
        return [Strategy.SP, Strategy.OP]
    if text in ("SP", "OP"):
        return [Strategy(text)]
    raise InvalidConfig(f"expected sp, op or both, got {value!r}", "strategy")


def _positive_int(key: str, text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise InvalidConfig(f"not an integer: {text!r}", key) from None
    if value < 1:
        raise InvalidConfig(f"must be >= 1, got {value}", key)
    return value


def parse_n_list(text: str) -> tuple[tuple[int, int], ...]:
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            a, b = item.split(":", 1)
            pairs.append((_positive_int("n_list", a.strip()), _positive_int("n_list", b.strip())))
        else:
            n = _positive_int("n_list", item)
            pairs.append((n, n))
    if not pairs:
        raise InvalidConfig("empty buffer list", "n_list")
    return tuple(pairs)


def parse_pairs(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfig(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in PARAM_KEYS and key not in EXTRA_KEYS:
            raise InvalidConfig(f"line {lineno}: unknown key", key)
        if key in out:
            raise InvalidConfig(f"line {lineno}: duplicate key", key)
        out[key] = value
    return out


def _number(key: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidConfig(f"not a number: {text!r}", key) from None


def parse_config(text: str) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from config-file text.

    Raises ``InvalidConfig`` for syntax problems and ``InvalidParams`` for
    out-of-range rates; both carry the offending key in ``field``.
    """
    kv = parse_pairs(text)
    for key in RATE_KEYS:
        if key not in kv:
            raise InvalidConfig("missing", key)
    sweep = parse_n_list(kv["n_list"]) if "n_list" in kv else ()
    if sweep:
        n1, n2 = sweep[0]
        n1 = kv.get("n1", n1)
        n2 = kv.get("n2", n2)
    else:
        for key in ("n1", "n2"):
            if key not in kv:
                raise InvalidConfig("missing (or give n_list)", key)
        n1, n2 = kv["n1"], kv["n2"]
    fields = {key: _number(key, kv[key]) for key in RATE_KEYS}
    for key, value in (("n1", n1), ("n2", n2)):
        fields[key] = value if isinstance(value, int) else _positive_int(key, value)
    params = NetworkParams(**fields)

    extras = {}
    if "horizon" in kv:
        extras["horizon"] = _number("horizon", kv["horizon"])
    if "warmup" in kv:
        extras["warmup"] = _number("warmup", kv["warmup"])
    if "reps" in kv:
        extras["replications"] = _positive_int("reps", kv["reps"])
    if "seed" in kv:
        try:
            extras["seed"] = int(kv["seed"])
        except ValueError:
            raise InvalidConfig(f"not an integer: {kv['seed']!r}", "seed") from None
    return ExperimentConfig(
        params=params,
        strategy=kv.get("strategy", "both"),
        buffer_sweep=sweep,
        mode=kv.get("mode", "solve"),
        out=kv.get("out"),
        **extras,
    )


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidConfig(f"cannot read {path}: {exc.strerror}", "config") from None
    return parse_config(text)


def format_config(config: ExperimentConfig) -> str:
    """Inverse of :func:`parse_config` for the keys it understands."""
    lines = [f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}"
             for k, v in config.params.as_dict().items()]
    lines.append(f"strategy = {config.strategy}")
    lines.append("n_list = " + ", ".join(f"{a}:{b}" for a, b in config.buffer_sweep))
    lines.append(f"mode = {config.mode}")
    lines.append(f"horizon = {config.horizon!r}")
    if config.warmup is not None:
        lines.append(f"warmup = {config.warmup!r}")
    lines.append(f"reps = {config.replications}")
    lines.append(f"seed = {config.seed}")
    if config.out:
        lines.append(f"out = {config.out}")
    return "\n".join(lines) + "\n"
