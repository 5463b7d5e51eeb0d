"""Finite N-player games with a binary Cooperate/Defect choice.

Two representations are supported:

* :class:`GameSpec` wraps an arbitrary payoff oracle ``payoff(i, profile)``
  and is analysed by exhaustive enumeration of all ``2**n`` profiles.
* :class:`SymmetricSpec` describes an anonymous game, where a player's
  payoff depends only on its own choice and on how many of the other
  ``n - 1`` players cooperate. Dominance and Pareto checks on these take
  ``O(n)`` time.

Profiles are tuples of :class:`Strategy`. Enumeration order is the
lexicographic order of ``itertools.product((C, D), repeat=n)``, so all-C
comes first and all-D last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Sequence

DEFAULT_BRUTE_FORCE_CAP = 20

# payoff caches are only kept for games with at most this many profiles
_CACHE_PROFILE_LIMIT = 2**12


class Strategy(str, Enum):
    COOPERATE = "C"
    DEFECT = "D"

    @property
    def other(self) -> Strategy:
        return Strategy.DEFECT if self is Strategy.COOPERATE else Strategy.COOPERATE

    def __str__(self) -> str:
        return self.value


C = Strategy.COOPERATE
D = Strategy.DEFECT

Profile = tuple[Strategy, ...]
PayoffFn = Callable[[int, Profile], float]


class CapacityError(ValueError):
    """Raised when exhaustive enumeration is requested beyond the cap."""


def parse_profile(text: str | Sequence[Strategy | str]) -> Profile:
    """Build a profile from ``"CDC"`` or a sequence of strategies/letters."""
    out = []
    for ch in text:
        if isinstance(ch, Strategy):
            out.append(ch)
            continue
        token = ch.strip().upper()
        if token not in ("C", "D"):
            raise ValueError(f"invalid strategy {ch!r}; expected 'C' or 'D'")
        out.append(Strategy(token))
    return tuple(out)


def format_profile(profile: Sequence[Strategy]) -> str:
    return "".join(s.value for s in profile)


def all_cooperate(n: int) -> Profile:
    return (C,) * n


def all_defect(n: int) -> Profile:
    return (D,) * n


def profiles(n: int) -> Iterator[Profile]:
    """Every strategy profile of ``n`` players in enumeration order."""
    return itertools.product((C, D), repeat=n)


def with_strategy(profile: Profile, player: int, strategy: Strategy) -> Profile:
    return profile[:player] + (strategy,) + profile[player + 1 :]


def insert_player(opponents: Profile, player: int, strategy: Strategy) -> Profile:
    """Rebuild a full profile from an opponent profile ``s_{-i}``."""
    return opponents[:player] + (strategy,) + opponents[player:]


def opponents_of(profile: Profile, player: int) -> Profile:
    return profile[:player] + profile[player + 1 :]


@dataclass(frozen=True)
class SymmetricSpec:
    """Anonymous binary game.

    ``u_coop(k)`` and ``u_defect(k)`` give a player's payoff when it
    cooperates (defects) and exactly ``k`` of the other ``n - 1`` players
    cooperate, for ``k`` in ``[0, n - 1]``.
    """

    n: int
    u_coop: Callable[[int], float]
    u_defect: Callable[[int], float]

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"a game needs at least 2 players, got n={self.n}")

    @classmethod
    def from_tables(cls, u_coop: Sequence[float], u_defect: Sequence[float]) -> SymmetricSpec:
        """Build from explicit payoff tables indexed by ``k``."""
        if len(u_coop) != len(u_defect):
            raise ValueError("u_coop and u_defect tables must have the same length")
        coop = tuple(float(x) for x in u_coop)
        defect = tuple(float(x) for x in u_defect)
        return cls(n=len(coop), u_coop=coop.__getitem__, u_defect=defect.__getitem__)

    def coop_table(self) -> tuple[float, ...]:
        return tuple(self.u_coop(k) for k in range(self.n))

    def defect_table(self) -> tuple[float, ...]:
        return tuple(self.u_defect(k) for k in range(self.n))

    def payoff(self, player: int, profile: Profile) -> float:
        own = profile[player]
        k = sum(1 for j, s in enumerate(profile) if j != player and s is C)
        return self.u_coop(k) if own is C else self.u_defect(k)


@dataclass(frozen=True)
class GameSpec:
    """A playable game: player count plus a pure payoff oracle.

    ``symmetric`` is set when the game was induced by a :class:`SymmetricSpec`
    and enables the ``O(n)`` analysis paths beyond ``brute_force_cap``.
    """

    n: int
    payoff: PayoffFn
    brute_force_cap: int = DEFAULT_BRUTE_FORCE_CAP
    symmetric: SymmetricSpec | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"a game needs at least 2 players, got n={self.n}")

    def utility(self, player: int, profile: Profile) -> float:
        if 2**self.n > _CACHE_PROFILE_LIMIT:
            return self.payoff(player, profile)
        key = (player, profile)
        try:
            return self._cache[key]
        except KeyError:
            value = self._cache[key] = self.payoff(player, profile)
            return value

    def check_capacity(self) -> None:
        if self.n > self.brute_force_cap:
            raise CapacityError(
                f"n={self.n} exceeds the brute-force cap of {self.brute_force_cap} players "
                f"({2**self.n} profiles); describe the game as a SymmetricSpec to use the O(n) path"
            )

    def check_profile(self, profile: Sequence[Strategy]) -> None:
        if len(profile) != self.n:
            raise ValueError(f"profile has length {len(profile)}, game has n={self.n}")


@dataclass(frozen=True)
class DominanceResult:
    holds: bool
    counterexample: Profile | None = None  # opponent profile s_{-i}


@dataclass(frozen=True)
class ExternalityWitness:
    """Flipping ``source`` in ``profile`` changes the affected player's payoff."""

    source: int
    profile: Profile


@dataclass(frozen=True)
class ExternalityResult:
    exists: bool
    witness: ExternalityWitness | None = None


@dataclass(frozen=True)
class DynamicsResult:
    trajectory: tuple[Profile, ...]
    absorbed: bool

    @property
    def final(self) -> Profile:
        return self.trajectory[-1]


def evaluate_profile(game: GameSpec, profile: Sequence[Strategy]) -> tuple[float, ...]:
    game.check_profile(profile)
    p = tuple(profile)
    return tuple(game.utility(i, p) for i in range(game.n))


def is_strictly_dominant(
    game: GameSpec, player: int, strategy: Strategy, *, eps: float = 0.0
) -> DominanceResult:
    """Test whether ``strategy`` strictly beats the alternative against every ``s_{-i}``.

    A margin of at most ``eps`` counts as a failure; ties are never dominance.
    """
    game.check_capacity()
    _check_player(game, player)
    other = strategy.other
    for opp in profiles(game.n - 1):
        mine = game.utility(player, insert_player(opp, player, strategy))
        alt = game.utility(player, insert_player(opp, player, other))
        if not mine > alt + eps:
            return DominanceResult(False, opp)
    return DominanceResult(True)


def _improving_deviation(game: GameSpec, profile: Profile, player: int) -> bool:
    here = game.utility(player, profile)
    there = game.utility(player, with_strategy(profile, player, profile[player].other))
    return there > here


def is_nash(game: GameSpec, profile: Sequence[Strategy]) -> bool:
    game.check_profile(profile)
    p = tuple(profile)
    return not any(_improving_deviation(game, p, i) for i in range(game.n))


def find_nash_equilibria(game: GameSpec) -> tuple[Profile, ...]:
    """All pure equilibria, in enumeration order."""
    game.check_capacity()
    return tuple(p for p in profiles(game.n) if is_nash(game, p))


def pareto_dominates(
    game: GameSpec, a: Sequence[Strategy], b: Sequence[Strategy], *, eps: float = 0.0
) -> bool:
    """True iff every player strictly prefers ``a`` to ``b`` (by more than ``eps``)."""
    ua = evaluate_profile(game, a)
    ub = evaluate_profile(game, b)
    return all(x > y + eps for x, y in zip(ua, ub))


def externality_exists(game: GameSpec, affected: int) -> ExternalityResult:
    """Search for another player whose unilateral flip moves ``affected``'s payoff."""
    game.check_capacity()
    _check_player(game, affected)
    for source in range(game.n):
        if source == affected:
            continue
        witness = _pair_externality(game, source, affected)
        if witness is not None:
            return ExternalityResult(True, witness)
    return ExternalityResult(False)


def _pair_externality(game: GameSpec, source: int, affected: int) -> ExternalityWitness | None:
    # source plays C in the witness profile; its flip to D is the change
    for rest in profiles(game.n - 1):
        p = insert_player(rest, source, C)
        if game.utility(affected, p) != game.utility(affected, with_strategy(p, source, D)):
            return ExternalityWitness(source, p)
    return None


def externality_matrix(game: GameSpec) -> tuple[tuple[bool, ...], ...]:
    """``m[j][i]`` is True when player ``j``'s choice can change player ``i``'s payoff."""
    game.check_capacity()
    n = game.n
    return tuple(
        tuple(j != i and _pair_externality(game, j, i) is not None for i in range(n))
        for j in range(n)
    )


def best_response_dynamics(
    game: GameSpec, start: Sequence[Strategy], max_steps: int
) -> DynamicsResult:
    """Sequential better-response play.

    Each step flips the lowest-index player that can strictly improve by
    switching. Stops at a fixed point (a pure Nash equilibrium) or after
    ``max_steps`` flips.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    game.check_profile(start)
    current = tuple(start)
    trajectory = [current]
    for _ in range(max_steps):
        mover = _first_deviator(game, current)
        if mover is None:
            return DynamicsResult(tuple(trajectory), True)
        current = with_strategy(current, mover, current[mover].other)
        trajectory.append(current)
    return DynamicsResult(tuple(trajectory), _first_deviator(game, current) is None)


def _first_deviator(game: GameSpec, profile: Profile) -> int | None:
    for i in range(game.n):
        if _improving_deviation(game, profile, i):
            return i
    return None


def symmetric_to_game(
    sym: SymmetricSpec, *, brute_force_cap: int = DEFAULT_BRUTE_FORCE_CAP, name: str = ""
) -> GameSpec:
    return GameSpec(
        n=sym.n, payoff=sym.payoff, brute_force_cap=brute_force_cap, symmetric=sym, name=name
    )


def symmetric_dominance(sym: SymmetricSpec, *, eps: float = 0.0) -> bool:
    """Defection is strictly dominant iff ``u_defect(k) > u_coop(k)`` for every ``k``."""
    return symmetric_dominance_violation(sym, eps=eps) is None


def symmetric_dominance_violation(sym: SymmetricSpec, *, eps: float = 0.0) -> int | None:
    """Smallest ``k`` where defecting fails to beat cooperating, or None."""
    for k in range(sym.n):
        if not sym.u_defect(k) > sym.u_coop(k) + eps:
            return k
    return None


def symmetric_nash_counts(sym: SymmetricSpec) -> tuple[int, ...]:
    """Cooperator counts ``m`` at which every profile with ``m`` cooperators is an equilibrium.

    Anonymity makes the equilibrium property depend on ``m`` alone.
    """
    n = sym.n
    counts = []
    for m in range(n + 1):
        coop_stays = m == 0 or sym.u_coop(m - 1) >= sym.u_defect(m - 1)
        defect_stays = m == n or sym.u_defect(m) >= sym.u_coop(m)
        if coop_stays and defect_stays:
            counts.append(m)
    return tuple(counts)


def symmetric_externality(sym: SymmetricSpec) -> ExternalityWitness | None:
    """Witness for player 0 being affected by player 1, or None if payoffs ignore others.

    In an anonymous game every ordered pair of players behaves alike, so one
    witness settles all pairs. The search order reproduces the first witness
    found by exhaustive enumeration.
    """
    n = sym.n
    for own, fn in ((C, sym.u_coop), (D, sym.u_defect)):
        for k in range(n - 2, -1, -1):
            if fn(k) != fn(k + 1):
                # player 1 cooperates, k of players 2..n-1 cooperate; flipping 1 to D gives k others
                rest = (C,) * k + (D,) * (n - 2 - k)
                return ExternalityWitness(1, (own, C) + rest)
    return None


def _check_player(game: GameSpec, player: int) -> None:
    if not 0 <= player < game.n:
        raise IndexError(f"player {player} out of range for n={game.n}")
