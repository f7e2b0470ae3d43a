import pytest

from config import reset_settings
from domain.framing import encapsulate
from domain.models import Cell, TcpSegment
from domain.parsers.scenario_parser import load_scenario


@pytest.fixture(autouse=True)
def fresh_settings():
    """Each test sees settings built from its own environment."""
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def make_cell():
    def _make(vc=0, frame_id=0, index=0, payload_len=512, reverse=False) -> Cell:
        seg = TcpSegment(vc=vc, seq=frame_id * payload_len, payload_len=payload_len)
        return encapsulate(seg, frame_id, reverse=reverse).cells[index]

    return _make


@pytest.fixture
def make_frame():
    """All cells of one data frame."""

    def _make(vc=0, frame_id=0, seq=0, payload_len=512, is_retransmission=False):
        seg = TcpSegment(
            vc=vc, seq=seq, payload_len=payload_len, is_retransmission=is_retransmission
        )
        return list(encapsulate(seg, frame_id).cells)

    return _make


@pytest.fixture
def make_scenario():
    def _make(text="preset=LAN", **overrides):
        return load_scenario(text, {k: str(v) for k, v in overrides.items()} or None)

    return _make
