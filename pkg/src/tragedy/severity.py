"""Severity measures: the five-condition Tragedy Index and payoff-based ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .game import SymmetricSpec


class Intensity(Enum):
    """Ordinal condition intensity; the value is the index weight."""

    ABSENT = 0
    LOW = 10
    MEDIUM = 100
    HIGH = 1000
    EXTREME = 10000

    @property
    def letter(self) -> str:
        return _LETTERS[self]

    @property
    def word(self) -> str:
        return self.name.capitalize()

    @property
    def exponent(self) -> int | None:
        """``log10`` of the weight, None for Absent."""
        return None if self is Intensity.ABSENT else _EXPONENTS[self]

    @classmethod
    def parse(cls, token: str) -> Intensity:
        """Accept a letter (``A/L/M/H/E``) or word, case-insensitive, whitespace trimmed."""
        key = token.strip().lower()
        try:
            return _ALIASES[key]
        except KeyError:
            raise ValueError(
                f"invalid intensity {token!r}; expected one of A/L/M/H/E or "
                "Absent/Low/Medium/High/Extreme"
            ) from None


_LETTERS = {
    Intensity.ABSENT: "A",
    Intensity.LOW: "L",
    Intensity.MEDIUM: "M",
    Intensity.HIGH: "H",
    Intensity.EXTREME: "E",
}
_EXPONENTS = {Intensity.LOW: 1, Intensity.MEDIUM: 2, Intensity.HIGH: 3, Intensity.EXTREME: 4}
_ALIASES = {}
for _level in Intensity:
    _ALIASES[_LETTERS[_level].lower()] = _level
    _ALIASES[_level.name.lower()] = _level
_ALIASES["solved"] = Intensity.ABSENT
_ALIASES["0"] = Intensity.ABSENT


class Magnitude(Enum):
    SOLVED = "Solved"
    MANAGEABLE_NUISANCE = "ManageableNuisance"
    SYSTEMIC_CRISIS = "SystemicCrisis"
    EXISTENTIAL = "Existential"

    @property
    def label(self) -> str:
        return _MAGNITUDE_LABELS[self]


_MAGNITUDE_LABELS = {
    Magnitude.SOLVED: "Solved",
    Magnitude.MANAGEABLE_NUISANCE: "Manageable Nuisance",
    Magnitude.SYSTEMIC_CRISIS: "Systemic Crisis",
    Magnitude.EXISTENTIAL: "Existential",
}


@dataclass(frozen=True)
class ConditionProfile:
    """Five intensities ordered C1..C5."""

    intensities: tuple[Intensity, Intensity, Intensity, Intensity, Intensity]

    def __post_init__(self) -> None:
        if len(self.intensities) != 5:
            raise ValueError(
                f"a condition profile has exactly 5 intensities, got {len(self.intensities)}"
            )
        if not all(isinstance(x, Intensity) for x in self.intensities):
            raise TypeError("intensities must be Intensity members")

    @classmethod
    def of(cls, levels: Iterable[Intensity | str]) -> ConditionProfile:
        return cls(tuple(x if isinstance(x, Intensity) else Intensity.parse(x) for x in levels))

    @classmethod
    def parse(cls, text: str) -> ConditionProfile:
        """Parse ``"H,H,E,E,E"``."""
        return cls.of(text.split(","))

    @property
    def letters(self) -> str:
        return ",".join(x.letter for x in self.intensities)

    def __iter__(self):
        return iter(self.intensities)

    def __len__(self) -> int:
        return 5


@dataclass(frozen=True)
class TragedyIndexResult:
    iota: float
    magnitude: Magnitude

    @property
    def rounded(self) -> int:
        return display_round(self.iota)


def display_round(value: float) -> int:
    """Round half up to the nearest integer."""
    return math.floor(value + 0.5)


def tragedy_index(profile: ConditionProfile | Sequence[Intensity]) -> TragedyIndexResult:
    """Geometric mean of the five intensity weights.

    Computed as ``10 ** (sum of exponents / 5)`` so whole-number results
    (100, 1000) come out exact.
    """
    levels = tuple(profile)
    if len(levels) != 5:
        raise ValueError(f"expected 5 intensities, got {len(levels)}")
    if any(x is Intensity.ABSENT for x in levels):
        iota = 0.0
    else:
        iota = 10.0 ** (sum(x.exponent for x in levels) / 5)
    return TragedyIndexResult(iota, magnitude(iota))


def tragedy_index_direct(profile: ConditionProfile | Sequence[Intensity]) -> float:
    """Product-then-root evaluation, kept as a cross-check on :func:`tragedy_index`."""
    return math.prod(x.value for x in profile) ** (1 / 5)


def magnitude(iota: float) -> Magnitude:
    """Class boundaries are half-open: [100, 1000) is a crisis, 1000 and up existential."""
    if iota < 0 or math.isnan(iota):
        raise ValueError(f"index must be non-negative, got {iota}")
    if iota == 0:
        return Magnitude.SOLVED
    if iota < 100:
        return Magnitude.MANAGEABLE_NUISANCE
    if iota < 1000:
        return Magnitude.SYSTEMIC_CRISIS
    return Magnitude.EXISTENTIAL


def normalized_rationality_gap(u_coop: float, u_nash: float) -> float:
    """Fraction of cooperative welfare lost at the equilibrium."""
    if not u_coop > 0:
        raise ValueError(f"cooperative welfare must be positive, got {u_coop}")
    if not u_coop >= u_nash >= 0:
        raise ValueError(f"need u_coop >= u_nash >= 0, got u_coop={u_coop}, u_nash={u_nash}")
    return (u_coop - u_nash) / u_coop


def price_of_anarchy(u_coop: float, u_nash: float) -> float:
    """``u_coop / u_nash``; ``math.inf`` when equilibrium welfare is zero."""
    if not u_coop > 0:
        raise ValueError(f"cooperative welfare must be positive, got {u_coop}")
    if u_nash < 0:
        raise ValueError(f"equilibrium welfare must be non-negative, got {u_nash}")
    if u_nash == 0:
        return math.inf
    return u_coop / u_nash


@dataclass(frozen=True)
class SymmetricPayoffs:
    T: float
    R: float
    P: float
    S: float

    @property
    def is_dilemma(self) -> bool:
        return self.T > self.R > self.P > self.S

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.T, self.R, self.P, self.S)


def temptation_ratio(p: SymmetricPayoffs) -> float:
    """``(T - R) / (R - P)``."""
    if not p.R > p.P:
        raise ValueError(f"temptation ratio needs R > P, got R={p.R}, P={p.P}")
    return (p.T - p.R) / (p.R - p.P)


def extract_symmetric_payoffs(sym: SymmetricSpec) -> SymmetricPayoffs:
    top = sym.n - 1
    return SymmetricPayoffs(
        T=sym.u_defect(top), R=sym.u_coop(top), P=sym.u_defect(0), S=sym.u_coop(0)
    )
