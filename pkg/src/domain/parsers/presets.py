"""Network presets: LAN, WAN and geosynchronous satellite."""

from dataclasses import dataclass
from enum import Enum

from domain.exceptions import ScenarioError
from domain.models import NS_PER_MS, NS_PER_SECOND, NS_PER_US


class PresetName(str, Enum):
    LAN = "LAN"
    WAN = "WAN"
    GEO = "GEO"


@dataclass(frozen=True)
class Preset:
    """Delays, buffer sizes and TCP parameters of one network class."""

    name: PresetName
    access_delay_ns: int
    backbone_delay_ns: int
    buffers: tuple[int, ...]
    mss: int
    window: int
    duration_ns: int
    description: str
    stagger_us: int = 0

    @property
    def default_buffer(self) -> int:
        return self.buffers[0]

    @property
    def rtt_ns(self) -> int:
        """Round-trip propagation over three links each way."""
        return 2 * (2 * self.access_delay_ns + self.backbone_delay_ns)


PRESETS: dict[PresetName, Preset] = {
    PresetName.LAN: Preset(
        name=PresetName.LAN,
        access_delay_ns=5 * NS_PER_US,
        backbone_delay_ns=5 * NS_PER_US,
        buffers=(1000, 3000),
        mss=512,
        window=65536,
        duration_ns=10 * NS_PER_SECOND,
        description="1 km links, 30 us round trip",
        stagger_us=1000,
    ),
    PresetName.WAN: Preset(
        name=PresetName.WAN,
        access_delay_ns=5 * NS_PER_MS,
        backbone_delay_ns=5 * NS_PER_MS,
        buffers=(12000, 36000),
        mss=512,
        window=600_000,
        duration_ns=20 * NS_PER_SECOND,
        description="1000 km links, 30 ms round trip",
    ),
    PresetName.GEO: Preset(
        name=PresetName.GEO,
        access_delay_ns=5 * NS_PER_US,
        backbone_delay_ns=275 * NS_PER_MS,
        buffers=(200_000, 600_000),
        mss=9180,
        window=8_704_000,
        duration_ns=40 * NS_PER_SECOND,
        description="satellite backbone hop, about 550 ms round trip",
    ),
}

_ALIASES = {
    "lan": PresetName.LAN,
    "wan": PresetName.WAN,
    "geo": PresetName.GEO,
    "satellite": PresetName.GEO,
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[_ALIASES[name.strip().lower()]]
    except KeyError as e:
        raise ScenarioError(
            f"Unknown preset '{name}'. Expected one of: {', '.join(p.value for p in PresetName)}",
            key="preset",
        ) from e
