from domain.framing.aal5 import (
    FrameCounter,
    Reassembler,
    cells_per_segment,
    encapsulate,
    max_goodput,
    reassemble,
)

__all__ = [
    "FrameCounter",
    "Reassembler",
    "cells_per_segment",
    "encapsulate",
    "max_goodput",
    "reassemble",
]
