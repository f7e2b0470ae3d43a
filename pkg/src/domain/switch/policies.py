"""UBR buffer-management policies and their drop tests.

All comparisons are exact: the fractional parameters R and Z are held as
Fractions and the tests cross-multiply in integers.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from domain.models import PolicyKind


Number = Union[int, float, str, Fraction]

DEFAULT_R = Fraction(9, 10)
DEFAULT_Z = Fraction(4, 5)


def as_fraction(value: Number) -> Fraction:
    """Exact decimal reading of a parameter (0.8 -> 4/5, not the binary float)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class DropPolicy:
    """TailDrop, EPD{R}, SelectiveDrop{R, Z} or FBA{R, Z}."""

    kind: PolicyKind = PolicyKind.TAIL_DROP
    r: Fraction = field(default=DEFAULT_R)
    z: Fraction = field(default=DEFAULT_Z)

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", as_fraction(self.r))
        object.__setattr__(self, "z", as_fraction(self.z))
        if not (0 < self.r < 1):
            raise ValueError(f"R must lie in (0, 1), got {self.r}")
        if not (0 < self.z <= 1):
            raise ValueError(f"Z must lie in (0, 1], got {self.z}")

    def r_cells(self, capacity: int) -> int:
        """Threshold in cells: R * K rounded half up."""
        return int(self.r * capacity + Fraction(1, 2))

    @property
    def label(self) -> str:
        if self.kind == PolicyKind.TAIL_DROP:
            return "UBR"
        if self.kind == PolicyKind.EPD:
            return "EPD"
        if self.kind == PolicyKind.SELECTIVE_DROP:
            return "Sel Drop"
        return "FBA"


def selective_drop_test(x: int, r_cells: int, yi: int, na: int, z: Number) -> bool:
    """(X > R) and (Yi * Na / X > Z)."""
    if x <= r_cells:
        return False
    zf = as_fraction(z)
    return yi * na * zf.denominator > zf.numerator * x


def fba_test(x: int, capacity: int, r_cells: int, yi: int, na: int, z: Number) -> bool:
    """(X > R) and (Yi * Na / X > Z * (K - R) / (X - R))."""
    if x <= r_cells:
        return False
    zf = as_fraction(z)
    return yi * na * (x - r_cells) * zf.denominator > zf.numerator * (capacity - r_cells) * x
