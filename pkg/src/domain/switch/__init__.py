from domain.switch.ledger import FrameMode, VcLedger, on_cell_arrival
from domain.switch.policies import (
    DEFAULT_R,
    DEFAULT_Z,
    DropPolicy,
    as_fraction,
    fba_test,
    selective_drop_test,
)
from domain.switch.port import OutputPort, ScriptedLoss

__all__ = [
    "DEFAULT_R",
    "DEFAULT_Z",
    "DropPolicy",
    "FrameMode",
    "OutputPort",
    "ScriptedLoss",
    "VcLedger",
    "as_fraction",
    "fba_test",
    "on_cell_arrival",
    "selective_drop_test",
]
