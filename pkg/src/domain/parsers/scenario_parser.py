"""Parser for scenario files and command-line overrides."""

from fractions import Fraction
from typing import Callable, Mapping, Optional

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from domain.exceptions import ScenarioError
from domain.models import (
    LINK_RATE_BPS,
    NS_PER_MS,
    NS_PER_SECOND,
    NS_PER_US,
    PolicyKind,
    TcpFlavor,
)
from domain.parsers.presets import Preset, PresetName, get_preset
from domain.switch.policies import DEFAULT_R, DEFAULT_Z, DropPolicy, as_fraction


MAX_ADVERTISED_WINDOW = 65535
MAX_WSCALE = 14
MAX_WINDOW = 2**30


class ScenarioConfig(BaseModel):
    """Fully resolved, immutable description of one simulation run."""

    model_config = ConfigDict(frozen=True)

    preset: PresetName
    n_sources: int = Field(ge=1)
    flavor: TcpFlavor = TcpFlavor.SACK
    policy: PolicyKind = PolicyKind.TAIL_DROP
    r: float = Field(default=float(DEFAULT_R), gt=0, lt=1)
    z: float = Field(default=float(DEFAULT_Z), gt=0, le=1)
    buffer: int = Field(gt=0)
    mss: int = Field(gt=0)
    window: int = Field(gt=0, le=MAX_WINDOW)
    wscale: Optional[int] = Field(default=None, ge=0, le=MAX_WSCALE)
    access_delay_ns: int = Field(ge=0)
    backbone_delay_ns: int = Field(ge=0)
    link_rate_bps: int = Field(default=LINK_RATE_BPS, gt=0)
    duration_ns: int = Field(gt=0)
    ack_counting: bool = True
    rto_ms: int = Field(default=500, gt=0)
    stagger_us: int = Field(default=0, ge=0)
    seed: int = 0
    rate_scale: int = Field(default=1, ge=1)
    forced_losses: tuple[int, ...] = ()
    sack_partial_acks: bool = True

    @field_validator("forced_losses")
    @classmethod
    def validate_forced_losses(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(i < 0 for i in v):
            raise ValueError("forced_losses segment indices must be non-negative")
        return tuple(sorted(set(v)))

    @model_validator(mode="after")
    def validate_window(self) -> "ScenarioConfig":
        if self.window < 2 * self.mss:
            raise ValueError(
                f"window={self.window} must hold at least two segments of mss={self.mss}"
            )
        if self.wscale is not None and self.window >> self.wscale > MAX_ADVERTISED_WINDOW:
            raise ValueError(
                f"wscale={self.wscale} leaves the advertised window at "
                f"{self.window >> self.wscale} > {MAX_ADVERTISED_WINDOW}"
            )
        if self.link_rate_bps // self.rate_scale <= 0:
            raise ValueError(f"rate_scale={self.rate_scale} leaves no link rate")
        return self

    @property
    def effective_wscale(self) -> int:
        """Explicit shift, or the smallest one that fits the window in 16 bits."""
        if self.wscale is not None:
            return self.wscale
        shift = 0
        while self.window >> shift > MAX_ADVERTISED_WINDOW:
            shift += 1
        return shift

    @property
    def advertised_window(self) -> int:
        return self.window >> self.effective_wscale

    @property
    def drop_policy(self) -> DropPolicy:
        return DropPolicy(self.policy, as_fraction(self.r), as_fraction(self.z))

    @property
    def link_rate(self) -> int:
        """Link rate after `rate_scale` is applied."""
        return self.link_rate_bps // self.rate_scale

    @property
    def rto_granularity_ns(self) -> int:
        return self.rto_ms * NS_PER_MS

    @property
    def rtt_ns(self) -> int:
        return 2 * (2 * self.access_delay_ns + self.backbone_delay_ns)

    def start_offset_ns(self, vc: int) -> int:
        return vc * self.stagger_us * NS_PER_US

    def with_overrides(self, **changes) -> "ScenarioConfig":
        """Copy with fields replaced, re-validated."""
        return ScenarioConfig(**{**self.model_dump(), **changes})


FLAVOR_ALIASES = {
    "vanilla": TcpFlavor.VANILLA,
    "reno": TcpFlavor.RENO,
    "newreno": TcpFlavor.NEW_RENO,
    "new_reno": TcpFlavor.NEW_RENO,
    "sack": TcpFlavor.SACK,
}

POLICY_ALIASES = {
    "ubr": PolicyKind.TAIL_DROP,
    "tail_drop": PolicyKind.TAIL_DROP,
    "taildrop": PolicyKind.TAIL_DROP,
    "epd": PolicyKind.EPD,
    "selective_drop": PolicyKind.SELECTIVE_DROP,
    "sd": PolicyKind.SELECTIVE_DROP,
    "fba": PolicyKind.FBA,
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _int(text: str) -> int:
    return int(text)


def _bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError(f"expected on/off, got '{text}'")


def _choice(table: Mapping[str, object]) -> Callable[[str], object]:
    def convert(text: str) -> object:
        try:
            return table[text.lower()]
        except KeyError:
            raise ValueError(f"'{text}' is not one of: {', '.join(table)}") from None

    return convert


def _seconds(text: str) -> int:
    return int(Fraction(text) * NS_PER_SECOND)


def _micros(text: str) -> int:
    return int(Fraction(text) * NS_PER_US)


def _wscale(text: str) -> Optional[int]:
    return None if text.lower() == "auto" else int(text)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _fraction_text(text: str) -> float:
    return float(Fraction(text))


class ScenarioParser:
    """
    Reads `key=value` scenario text.

    Tokens are separated by whitespace or newlines and `#` starts a comment. The
    preset supplies defaults; every other key overrides them. Later occurrences of
    a key win.
    """

    # key -> (field name, converter)
    KEYS: dict[str, tuple[str, Callable[[str], object]]] = {
        "n": ("n_sources", _int),
        "buffer": ("buffer", _int),
        "tcp": ("flavor", _choice(FLAVOR_ALIASES)),
        "policy": ("policy", _choice(POLICY_ALIASES)),
        "R": ("r", _fraction_text),
        "Z": ("z", _fraction_text),
        "mss": ("mss", _int),
        "window": ("window", _int),
        "wscale": ("wscale", _wscale),
        "duration": ("duration_ns", _seconds),
        "ack_counting": ("ack_counting", _bool),
        "rto_ms": ("rto_ms", _int),
        "stagger_us": ("stagger_us", _int),
        "seed": ("seed", _int),
        "rate_scale": ("rate_scale", _int),
        "forced_losses": ("forced_losses", _int_list),
        "sack_partial_acks": ("sack_partial_acks", _bool),
        "access_us": ("access_delay_ns", _micros),
        "backbone_us": ("backbone_delay_ns", _micros),
    }

    FIELD_TO_KEY = {field_name: key for key, (field_name, _) in KEYS.items()}

    @classmethod
    def tokenize(cls, text: str) -> list[tuple[str, str, int]]:
        """Split text into (key, value, line) triples."""
        tokens = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0]
            for token in line.split():
                key, sep, value = token.partition("=")
                if not sep or not key:
                    raise ScenarioError("expected key=value", key=token, line=lineno)
                tokens.append((key, value, lineno))
        return tokens

    @classmethod
    def parse(
        cls, text: str, overrides: Optional[Mapping[str, str]] = None
    ) -> ScenarioConfig:
        """Parse scenario text, then apply overrides (same keys, no line numbers)."""
        entries: list[tuple[str, str, Optional[int]]] = list(cls.tokenize(text))
        for key, value in (overrides or {}).items():
            entries.append((key, str(value), None))

        preset: Optional[Preset] = None
        values: dict[str, object] = {}
        lines: dict[str, Optional[int]] = {}

        for key, value, lineno in entries:
            if key == "preset":
                try:
                    preset = get_preset(value)
                except ScenarioError as e:
                    raise ScenarioError(
                        f"unknown preset '{value}'", key="preset", line=lineno
                    ) from e
                lines["preset"] = lineno
                continue
            spec = cls.KEYS.get(key)
            if spec is None:
                known = ", ".join(["preset", *cls.KEYS])
                raise ScenarioError(f"unknown key (known: {known})", key=key, line=lineno)
            field_name, convert = spec
            try:
                values[field_name] = convert(value)
            except (ValueError, ZeroDivisionError) as e:
                raise ScenarioError(f"bad value '{value}': {e}", key=key, line=lineno) from e
            lines[key] = lineno

        if preset is None:
            raise ScenarioError("missing required key", key="preset")

        resolved: dict[str, object] = {
            "preset": preset.name,
            "n_sources": 1,
            "buffer": preset.default_buffer,
            "mss": preset.mss,
            "window": preset.window,
            "access_delay_ns": preset.access_delay_ns,
            "backbone_delay_ns": preset.backbone_delay_ns,
            "duration_ns": preset.duration_ns,
            "stagger_us": preset.stagger_us,
        }
        resolved.update(values)

        try:
            config = ScenarioConfig(**resolved)
        except ValidationError as e:
            first = e.errors()[0]
            loc = first.get("loc") or ()
            key = cls.FIELD_TO_KEY.get(str(loc[0])) if loc else None
            raise ScenarioError(first.get("msg", str(e)), key=key, line=lines.get(key or "")) from e

        logger.debug(
            f"Loaded scenario {config.preset.value} n={config.n_sources} K={config.buffer} "
            f"{config.flavor.value}/{config.policy.value}"
        )
        return config


def load_scenario(text: str, overrides: Optional[Mapping[str, str]] = None) -> ScenarioConfig:
    """
    Convenience function to parse scenario text.
    """
    return ScenarioParser.parse(text, overrides)
