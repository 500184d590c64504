"""Graph properties and tri-state decisions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Kind(enum.Enum):
    HAS_EDGE = "has-edge"
    CONNECTED_K = "connected-k"
    CLIQUE_K = "clique-k"
    PLANE = "plane"
    PLANAR = "planar"
    HAS_FREE_EDGE = "has-free-edge"
    ALL_EDGES_FREE = "all-free"
    INDEPENDENT_K = "independent-k"


_NEEDS_K = {Kind.CONNECTED_K, Kind.CLIQUE_K, Kind.INDEPENDENT_K}
_INCREASING = {Kind.HAS_EDGE, Kind.CONNECTED_K, Kind.CLIQUE_K}
_DECREASING = {Kind.PLANE, Kind.PLANAR, Kind.INDEPENDENT_K}


@dataclass(frozen=True)
class Property:
    kind: Kind
    k: int | None = None

    def __post_init__(self):
        kind = Kind(self.kind) if not isinstance(self.kind, Kind) else self.kind
        object.__setattr__(self, "kind", kind)
        if kind in _NEEDS_K:
            if self.k is None:
                raise ValueError(f"{kind.value} needs a parameter k")
            lo = 1 if kind is Kind.INDEPENDENT_K else 2
            if int(self.k) < lo:
                raise ValueError(f"{kind.value} needs k >= {lo}, got {self.k}")
            object.__setattr__(self, "k", int(self.k))
        elif self.k is not None:
            raise ValueError(f"{kind.value} takes no parameter k")

    @classmethod
    def parse(cls, name: str, k: int | None = None) -> "Property":
        kind = Kind(name)
        return cls(kind, k if kind in _NEEDS_K else None)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def direction(self) -> str | None:
        """'increasing', 'decreasing' or None for the free-edge properties."""
        if self.kind in _INCREASING:
            return "increasing"
        if self.kind in _DECREASING:
            return "decreasing"
        return None

    @property
    def monotone(self) -> bool:
        return self.direction is not None

    def __str__(self) -> str:
        return self.name if self.k is None else f"{self.name}({self.k})"


HAS_EDGE = Property(Kind.HAS_EDGE)
PLANE = Property(Kind.PLANE)
PLANAR = Property(Kind.PLANAR)
HAS_FREE_EDGE = Property(Kind.HAS_FREE_EDGE)
ALL_EDGES_FREE = Property(Kind.ALL_EDGES_FREE)


def connected_k(k: int) -> Property:
    return Property(Kind.CONNECTED_K, k)


def clique_k(k: int) -> Property:
    return Property(Kind.CLIQUE_K, k)


def independent_k(k: int) -> Property:
    return Property(Kind.INDEPENDENT_K, k)


@dataclass(frozen=True)
class TriStateDecision:
    """Outcome of a decision that may be intractable.

    ``status`` is ``"yes"`` (with ``witness``), ``"no"`` (with
    ``certificate``) or ``"unknown"`` (with ``lower <= upper`` bounds on the
    optimum).
    """

    status: str
    witness: tuple[int, ...] | None = None
    certificate: dict[str, Any] | None = field(default=None, compare=False)
    lower: int | None = None
    upper: int | None = None

    @classmethod
    def yes(cls, witness) -> "TriStateDecision":
        return cls("yes", witness=tuple(sorted(int(v) for v in witness)))

    @classmethod
    def no(cls, **certificate) -> "TriStateDecision":
        return cls("no", certificate=dict(certificate))

    @classmethod
    def unknown(cls, lower: int, upper: int) -> "TriStateDecision":
        if lower > upper:
            raise ValueError("unknown bounds must satisfy lower <= upper")
        return cls("unknown", lower=int(lower), upper=int(upper))

    @property
    def is_yes(self) -> bool:
        return self.status == "yes"

    @property
    def is_no(self) -> bool:
        return self.status == "no"

    @property
    def is_unknown(self) -> bool:
        return self.status == "unknown"

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"result": self.status}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.is_unknown:
            out["bounds"] = [self.lower, self.upper]
        return out
