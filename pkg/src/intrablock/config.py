"""Experiment configuration and the flat ``key = value`` config-file format.

Recognised keys (case-insensitive)::

    M            batch size                              (required)
    L            batches per block                       (required)
    T            packets per block                       (default M*L)
    hops         number of links in the line network     (default 8)
    blocks       Monte-Carlo block count                 (default 100000)
    channel      preset name, e.g. table1:eps45_abel2.5
    p, q, g, b   explicit GE parameters
    epsilon, abel, g, b   GE statistics, fitted to (p, q)
    schemes      comma list from BR-BI, AR-SI, AR-IBI    (default all)
    objective    e.g. neighb:neg_pe1, allpairs:ln        (default neighb:neg_pe1)
    iterations   allocation/interleaving rounds          (default 2)
    group_size   blocks per variance sample              (default 100)
    seed         master seed                             (default 0)
    out          CSV output path                         (default stdout)

Blank lines and ``#`` comments are ignored.  Exactly one channel form
(``channel``, ``p/q``, or ``epsilon/abel``) must be given.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .ge_channel import GEModel, fit_from_stats
from .interleaver import DispersionObjective


class ConfigError(ValueError):
    pass


class Scheme(str, enum.Enum):
    BR_BI = "BR-BI"
    AR_SI = "AR-SI"
    AR_IBI = "AR-IBI"


PRESET_G = Fraction(1, 10)
PRESET_B = Fraction(4, 5)

# (loss rate %, ABEL label) -> (p, q), with g = 0.1 and b = 0.8
PRESETS: dict[str, tuple[Fraction, Fraction]] = {
    "eps35_abel2": (Fraction(4, 21), Fraction(12, 35)),
    "eps35_abel2.5": (Fraction(5, 63), Fraction(1, 7)),
    "eps35_abel900/299": (Fraction(23, 5670), Fraction(23, 3150)),
    "eps45_abel2": (Fraction(20, 49), Fraction(20, 49)),
    "eps45_abel2.5": (Fraction(11, 49), Fraction(11, 49)),
    "eps45_abel900/299": (Fraction(1, 10), Fraction(1, 10)),
    "eps55_abel2": (Fraction(4, 5), Fraction(4, 9)),
    "eps55_abel2.5": (Fraction(17, 35), Fraction(17, 63)),
    "eps55_abel900/299": (Fraction(859, 3150), Fraction(859, 5670)),
}


def preset(name: str) -> GEModel:
    key = name.strip().lower()
    if key.startswith("table1:"):
        key = key[len("table1:"):]
    if key not in PRESETS:
        raise ConfigError(f"unknown channel preset {name!r}; known: {', '.join('table1:' + k for k in PRESETS)}")
    p, q = PRESETS[key]
    return GEModel(float(p), float(q), float(PRESET_G), float(PRESET_B))


def parse_number(text: str) -> float:
    """Accept decimals and exact fractions such as ``900/299``."""
    return float(Fraction(text.strip()))


@dataclass(frozen=True)
class ExperimentConfig:
    M: int
    L: int
    model: GEModel
    T: int | None = None
    hops: int = 8
    blocks: int = 100_000
    schemes: tuple[Scheme, ...] = tuple(Scheme)
    objective: DispersionObjective = field(default_factory=DispersionObjective)
    iterations: int = 2
    group_size: int = 100
    seed: int = 0
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.T is None:
            object.__setattr__(self, "T", self.M * self.L)
        for name in ("M", "L", "T", "blocks", "iterations", "group_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.hops < 0:
            raise ConfigError("hops must be nonnegative")
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))

    @property
    def total(self) -> int:
        assert self.T is not None
        return self.T


_INT_KEYS = {"m": "M", "l": "L", "t": "T", "hops": "hops", "blocks": "blocks",
             "iterations": "iterations", "group_size": "group_size", "seed": "seed"}


def resolve_channel(values: dict[str, str]) -> GEModel:
    """Build the GE model from whichever channel form the config uses.

    Raises ``ChannelError`` (not ``ConfigError``) when statistics cannot be fitted.
    """
    forms = [("channel" in values), ("p" in values or "q" in values),
             ("epsilon" in values or "abel" in values)]
    if sum(forms) != 1:
        raise ConfigError("give exactly one of: channel preset, p/q/g/b, epsilon/abel/g/b")
    if "channel" in values:
        return preset(values["channel"])
    keys = ("p", "q") if forms[1] else ("epsilon", "abel")
    try:
        g = parse_number(values.get("g", "0.1"))
        b = parse_number(values.get("b", "0.8"))
        x, y = (parse_number(values[k]) for k in keys)
    except KeyError as exc:
        raise ConfigError(f"missing channel key {exc.args[0]!r}") from None
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad channel value: {exc}") from None
    return GEModel(x, y, g, b) if forms[1] else fit_from_stats(x, y, g, b)


def config_from_mapping(values: dict[str, str]) -> ExperimentConfig:
    values = {k.strip().lower(): v.strip() for k, v in values.items()}
    known = set(_INT_KEYS) | {"channel", "p", "q", "g", "b", "epsilon", "abel", "schemes", "objective", "out"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kwargs: dict = {}
    for key, attr in _INT_KEYS.items():
        if key in values:
            try:
                kwargs[attr] = int(values[key])
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {values[key]!r}") from None
    if "M" not in kwargs or "L" not in kwargs:
        raise ConfigError("M and L are required")
    if "schemes" in values:
        try:
            kwargs["schemes"] = tuple(Scheme(s.strip().upper()) for s in values["schemes"].split(",") if s.strip())
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if "objective" in values:
        try:
            kwargs["objective"] = DispersionObjective.parse(values["objective"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if "out" in values:
        kwargs["out"] = Path(values["out"])
    kwargs["model"] = resolve_channel(values)
    return ExperimentConfig(**kwargs)


def parse_config_text(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key.lower() in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key.lower()] = value
    return values


def load_config(path: str | Path) -> ExperimentConfig:
    return config_from_mapping(parse_config_text(Path(path).read_text()))
