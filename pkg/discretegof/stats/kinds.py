"""Statistic kinds and bin orderings."""

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple

import numpy as np

from ..errors import InvalidArgument, UnsupportedStatistic


class StatisticKind(str, Enum):
    """Discrepancy statistics; only KS depends on the order of the bins."""
    KS = "ks"
    EUCLIDEAN = "euclidean"
    CHI2 = "chi2"
    G2 = "g2"
    FREEMAN_TUKEY = "freeman_tukey"
    L1 = "l1"

    @property
    def ordering_dependent(self) -> bool:
        return self is StatisticKind.KS

    @classmethod
    def parse(cls, name: str) -> "StatisticKind":
        key = name.strip().lower().replace("-", "_")
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise UnsupportedStatistic(f"Unknown statistic {name!r}") from None

    @classmethod
    def parse_list(cls, names: Iterable[str]) -> Tuple["StatisticKind", ...]:
        kinds = []
        for name in names:
            kind = cls.parse(name)
            if kind not in kinds:
                kinds.append(kind)
        return tuple(kinds)


_ALIASES = {
    "euclid": "euclidean",
    "l2": "euclidean",
    "chisq": "chi2",
    "chi_square": "chi2",
    "ft": "freeman_tukey",
    "hellinger": "freeman_tukey",
    "kolmogorov_smirnov": "ks",
}


class OrderingKind(str, Enum):
    IDENTITY = "identity"
    LEXICOGRAPHIC = "lexicographic"
    PSEUDORANDOM = "pseudorandom"
    WORST = "worst"


def permutation_digest(perm: np.ndarray) -> str:
    """Stable hash of a permutation (little-endian uint32 words)."""
    data = np.asarray(perm, dtype="<u4").tobytes()
    return hashlib.blake2b(data, digest_size=16).hexdigest()


@dataclass(frozen=True, eq=False)
class Ordering:
    """
    A permutation of bin positions 0..m-1; the KS statistic accumulates
    differences in the order perm[0], perm[1], ...
    """
    perm: np.ndarray
    kind: OrderingKind = OrderingKind.IDENTITY
    seed: Optional[int] = None
    trial: Optional[int] = None

    def __post_init__(self):
        perm = np.array(self.perm, dtype=np.int64).ravel()
        if perm.size == 0:
            raise InvalidArgument("An ordering needs at least one bin")
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise InvalidArgument("Ordering must be a permutation of 0..m-1")
        perm.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "kind", OrderingKind(self.kind))

    @classmethod
    def identity(cls, m: int) -> "Ordering":
        return cls(np.arange(m))

    @classmethod
    def lexicographic(cls, m: int) -> "Ordering":
        # bins are stored in lexicographic order already
        return cls(np.arange(m), OrderingKind.LEXICOGRAPHIC)

    @property
    def size(self) -> int:
        return self.perm.size

    @property
    def digest(self) -> str:
        return permutation_digest(self.perm)

    def describe(self) -> str:
        if self.kind is OrderingKind.PSEUDORANDOM:
            return f"pseudorandom(seed={self.seed}, trial={self.trial})"
        return self.kind.value
