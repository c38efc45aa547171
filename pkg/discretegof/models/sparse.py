"""Uniform model over a huge support that is never materialized."""

from dataclasses import dataclass
from fractions import Fraction

from ..config import MAX_SUPPORT
from ..errors import InvalidArgument


@dataclass(frozen=True)
class SparseUniformModel:
    """Uniform over bins 1..support_size; q = 1/support_size."""
    support_size: int

    def __post_init__(self):
        if isinstance(self.support_size, bool) or int(self.support_size) != self.support_size:
            raise InvalidArgument("Support size must be an integer")
        if self.support_size < 1:
            raise InvalidArgument(f"Support size must be positive, got {self.support_size}")
        if self.support_size > MAX_SUPPORT:
            raise InvalidArgument(f"Support size must not exceed {MAX_SUPPORT}, got {self.support_size}")
        object.__setattr__(self, "support_size", int(self.support_size))

    @property
    def q(self) -> float:
        return 1.0 / self.support_size

    @property
    def exact_q(self) -> Fraction:
        return Fraction(1, self.support_size)
