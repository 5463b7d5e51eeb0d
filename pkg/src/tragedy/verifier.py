"""Five-condition structural-tragedy diagnostic.

C1-C4 are computed from the payoff oracle. C5 (enforcement barriers) is
declared by the caller and never inferred.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from math import comb
from typing import Any, Literal

from .game import (
    C,
    D,
    GameSpec,
    Profile,
    SymmetricSpec,
    all_cooperate,
    all_defect,
    best_response_dynamics,
    externality_exists,
    externality_matrix,
    find_nash_equilibria,
    format_profile,
    is_strictly_dominant,
    pareto_dominates,
    symmetric_dominance_violation,
    symmetric_externality,
    symmetric_nash_counts,
    symmetric_to_game,
)

CONDITIONS = ("C1", "C2", "C3", "C4", "C5")

# largest equilibrium set materialised on the O(n) path
MAX_LISTED_EQUILIBRIA = 4096


class Barrier(str, Enum):
    ANARCHY = "Anarchy"
    VERIFICATION_IMPOSSIBILITY = "VerificationImpossibility"
    MONITORING_INFEASIBILITY = "MonitoringInfeasibility"
    COMMITMENT_PROBLEMS = "CommitmentProblems"

    @classmethod
    def parse(cls, token: str) -> Barrier:
        key = token.strip().lower().replace("_", "").replace("-", "")
        for b in cls:
            if key in (b.value.lower(), _SHORT[b]):
                return b
        names = ", ".join(sorted(_SHORT.values()))
        raise ValueError(f"unknown barrier {token!r}; expected one of {names}")


_SHORT = {
    Barrier.ANARCHY: "anarchy",
    Barrier.VERIFICATION_IMPOSSIBILITY: "verification",
    Barrier.MONITORING_INFEASIBILITY: "monitoring",
    Barrier.COMMITMENT_PROBLEMS: "commitment",
}


@dataclass(frozen=True)
class C5Declaration:
    barriers: frozenset[Barrier] = frozenset()
    notes: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "barriers", frozenset(Barrier(b) for b in self.barriers))

    @property
    def satisfied(self) -> bool:
        return bool(self.barriers)

    def sorted_barriers(self) -> list[str]:
        order = list(Barrier)
        return [b.value for b in sorted(self.barriers, key=order.index)]


class Status(str, Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    DECLARED = "Declared"


@dataclass(frozen=True)
class ConditionReport:
    condition: str
    status: Status
    witness: dict[str, Any] | None = None
    detail: str = ""
    # Satisfied, or Declared with at least one barrier
    positive: bool = field(default=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "condition": self.condition,
            "status": self.status.value,
            "positive": self.positive,
            "witness": self.witness,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class TragedyVerdict:
    reports: tuple[ConditionReport, ...]
    is_structural_tragedy: bool
    nash_set: tuple[Profile, ...]
    pareto_dominated_equilibrium: bool
    dynamics_absorbed_at_all_defect: bool
    externalities_reach_all_pairs: bool
    mode: str

    def report(self, condition: str) -> ConditionReport:
        return self.reports[CONDITIONS.index(condition)]

    @property
    def failed_conditions(self) -> tuple[str, ...]:
        return tuple(r.condition for r in self.reports if not r.positive)

    def to_dict(self) -> dict[str, Any]:
        return {
            "is_structural_tragedy": self.is_structural_tragedy,
            "mode": self.mode,
            "conditions": [r.to_dict() for r in self.reports],
            "nash_set": [format_profile(p) for p in self.nash_set],
            "pareto_dominated_equilibrium": self.pareto_dominated_equilibrium,
            "dynamics_absorbed_at_all_defect": self.dynamics_absorbed_at_all_defect,
            "externalities_reach_all_pairs": self.externalities_reach_all_pairs,
        }


Mode = Literal["auto", "exhaustive", "symmetric"]


def verify_conditions(
    game: GameSpec,
    c5: C5Declaration,
    *,
    decentralized: bool = True,
    eps: float = 0.0,
    mode: Mode = "auto",
) -> TragedyVerdict:
    """Run the C1-C5 diagnostic and the equilibrium checks.

    ``mode="auto"`` enumerates profiles when ``n`` is within the game's cap
    and falls back to the anonymous reduction otherwise. ``decentralized`` is
    the declared half of C1; only ``n >= 2`` is computed.
    """
    if mode == "auto":
        within_cap = game.n <= game.brute_force_cap
        mode = "exhaustive" if within_cap or game.symmetric is None else "symmetric"
    if mode == "symmetric":
        if game.symmetric is None:
            raise ValueError("symmetric mode needs a game built from a SymmetricSpec")
        checks = _symmetric_checks(game.symmetric, eps)
    elif mode == "exhaustive":
        game.check_capacity()
        checks = _exhaustive_checks(game, eps)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    n = game.n
    c1_ok = n >= 2 and decentralized
    c1 = ConditionReport(
        "C1",
        Status.SATISFIED if c1_ok else Status.VIOLATED,
        None if c1_ok else {"n": n, "decentralized": decentralized},
        f"n={n}; decentralized={'yes' if decentralized else 'no (single decision-maker)'}",
        positive=c1_ok,
    )
    if c5.satisfied:
        c5_detail = "barriers: " + ", ".join(c5.sorted_barriers())
    else:
        c5_detail = "no barriers declared"
    c5_report = ConditionReport("C5", Status.DECLARED, None, c5_detail, positive=c5.satisfied)
    reports = (c1, checks.c2, checks.c3, checks.c4, c5_report)
    tragedy = all(r.positive for r in reports)
    return TragedyVerdict(
        reports=reports,
        is_structural_tragedy=tragedy,
        nash_set=checks.nash_set,
        pareto_dominated_equilibrium=checks.pareto_dominated,
        dynamics_absorbed_at_all_defect=checks.absorbed_at_all_d,
        externalities_reach_all_pairs=checks.all_pairs,
        mode=mode,
    )


@dataclass
class _Checks:
    c2: ConditionReport
    c3: ConditionReport
    c4: ConditionReport
    nash_set: tuple[Profile, ...]
    pareto_dominated: bool
    absorbed_at_all_d: bool
    all_pairs: bool


def _exhaustive_checks(game: GameSpec, eps: float) -> _Checks:
    n = game.n
    affected = []
    first_witness = None
    for i in range(n):
        res = externality_exists(game, i)
        if res.exists:
            affected.append(i)
            if first_witness is None:
                first_witness = {
                    "affected": i,
                    "source": res.witness.source,
                    "profile": format_profile(res.witness.profile),
                }
    matrix = externality_matrix(game)
    all_pairs = all(matrix[j][i] for i in range(n) for j in range(n) if i != j)
    c2 = _c2_report(affected, n, first_witness, all_pairs)

    c3_witness = None
    for i in range(n):
        dom = is_strictly_dominant(game, i, D, eps=eps)
        if not dom.holds:
            c3_witness = {"player": i, "opponents": format_profile(dom.counterexample)}
            break
    c3 = _c3_report(c3_witness)

    sc, sd = all_cooperate(n), all_defect(n)
    c4_ok = pareto_dominates(game, sc, sd, eps=eps)
    c4_witness = None
    if not c4_ok:
        for i in range(n):
            u_c, u_d = game.utility(i, sc), game.utility(i, sd)
            if not u_c > u_d + eps:
                c4_witness = {"player": i, "u_all_c": u_c, "u_all_d": u_d}
                break
    c4 = _c4_report(c4_ok, c4_witness)

    nash = find_nash_equilibria(game)
    pareto_dominated = bool(nash) and all(pareto_dominates(game, sc, p, eps=eps) for p in nash)
    dyn = best_response_dynamics(game, sc, max_steps=4 * n)
    absorbed = dyn.absorbed and dyn.final == sd
    return _Checks(c2, c3, c4, nash, pareto_dominated, absorbed, all_pairs)


def _symmetric_checks(sym: SymmetricSpec, eps: float) -> _Checks:
    n = sym.n
    ext = symmetric_externality(sym)
    witness = None
    if ext is not None:
        witness = {"affected": 0, "source": ext.source, "profile": format_profile(ext.profile)}
    affected = list(range(n)) if ext is not None else []
    c2 = _c2_report(affected, n, witness, ext is not None)

    k = symmetric_dominance_violation(sym, eps=eps)
    c3_witness = None
    if k is not None:
        c3_witness = {"player": 0, "opponents": format_profile((C,) * k + (D,) * (n - 1 - k))}
    c3 = _c3_report(c3_witness)

    u_c, u_d = sym.u_coop(n - 1), sym.u_defect(0)
    c4_ok = u_c > u_d + eps
    c4 = _c4_report(c4_ok, None if c4_ok else {"player": 0, "u_all_c": u_c, "u_all_d": u_d})

    counts = symmetric_nash_counts(sym)
    nash = _materialise(n, counts)
    # every equilibrium with m cooperators gives cooperators u_coop(m-1) and defectors u_defect(m)
    pareto_dominated = bool(counts) and all(
        (m == 0 or u_c > sym.u_coop(m - 1) + eps) and (m == n or u_c > sym.u_defect(m) + eps)
        for m in counts
    )
    game = symmetric_to_game(sym, brute_force_cap=0)
    dyn = best_response_dynamics(game, all_cooperate(n), max_steps=4 * n)
    absorbed = dyn.absorbed and dyn.final == all_defect(n)
    return _Checks(c2, c3, c4, nash, pareto_dominated, absorbed, ext is not None)


def _materialise(n: int, counts: tuple[int, ...]) -> tuple[Profile, ...]:
    total = sum(comb(n, m) for m in counts)
    if total > MAX_LISTED_EQUILIBRIA:
        raise ValueError(
            f"{total} pure equilibria (cooperator counts {list(counts)}) are too many to list"
        )
    out = []
    for m in counts:
        for coop in itertools.combinations(range(n), m):
            chosen = set(coop)
            out.append(tuple(C if i in chosen else D for i in range(n)))
    # enumeration order: all-C first, matching the exhaustive path
    out.sort(key=format_profile)
    return tuple(out)


def _c2_report(affected, n, witness, all_pairs) -> ConditionReport:
    ok = bool(affected)
    detail = (
        f"{len(affected)} of {n} players affected by others' choices; "
        f"every pair interacts: {'yes' if all_pairs else 'no'}"
    )
    return ConditionReport(
        "C2", Status.SATISFIED if ok else Status.VIOLATED, witness, detail, positive=ok
    )


def _c3_report(witness) -> ConditionReport:
    if witness is None:
        return ConditionReport(
            "C3", Status.SATISFIED, None, "Defect strictly dominant for every player", positive=True
        )
    return ConditionReport(
        "C3",
        Status.VIOLATED,
        witness,
        f"player {witness['player']} does not gain by defecting against {witness['opponents']}",
    )


def _c4_report(ok, witness) -> ConditionReport:
    if ok:
        detail = "all-C strictly better than all-D for every player"
        return ConditionReport("C4", Status.SATISFIED, None, detail, positive=True)
    return ConditionReport(
        "C4",
        Status.VIOLATED,
        witness,
        f"player {witness['player']} weakly prefers all-D to all-C",
    )


@dataclass(frozen=True)
class NecessityCase:
    removed: str
    description: str
    game: GameSpec
    c5: C5Declaration
    decentralized: bool
    verdict: TragedyVerdict


def prisoners_dilemma(T: float = 5, R: float = 3, P: float = 1, S: float = 0) -> SymmetricSpec:
    return SymmetricSpec.from_tables(u_coop=(S, R), u_defect=(P, T))


def coordination_game(n: int = 2) -> GameSpec:
    """Payoff 1 to everyone when all choices match, else 0."""

    def payoff(i: int, profile: Profile) -> float:
        return 1.0 if len(set(profile)) == 1 else 0.0

    return GameSpec(n=n, payoff=payoff, name="pure coordination")


def stag_hunt() -> SymmetricSpec:
    """Cooperation pays best only if the other cooperates too."""
    return SymmetricSpec.from_tables(u_coop=(0, 4), u_defect=(1, 3))


def separable_game(n: int = 2, u_coop: float = 1.0, u_defect: float = 2.0) -> GameSpec:
    """Each player's payoff depends on its own choice alone."""

    def payoff(i: int, profile: Profile) -> float:
        return u_coop if profile[i] is C else u_defect

    return GameSpec(n=n, payoff=payoff, name="separable")


def necessity_suite() -> tuple[NecessityCase, ...]:
    """One construction per condition, each breaking the tragedy."""
    anarchy = C5Declaration(frozenset({Barrier.ANARCHY}))
    pd = symmetric_to_game(prisoners_dilemma(), name="prisoner's dilemma")
    hunt = symmetric_to_game(stag_hunt(), name="stag hunt")
    efficient = symmetric_to_game(prisoners_dilemma(T=3, R=1, P=2, S=0), name="efficient defection")
    entries = [
        ("C1", "prisoner's dilemma decided by a single central authority", pd, anarchy, False),
        (
            "C2",
            "separable payoffs: no player's choice reaches another",
            separable_game(),
            anarchy,
            True,
        ),
        ("C3", "stag hunt: cooperating is the best reply to cooperation", hunt, anarchy, True),
        ("C4", "dominant defection with all-D at least as good as all-C", efficient, anarchy, True),
        (
            "C5",
            "prisoner's dilemma with no enforcement barriers declared",
            pd,
            C5Declaration(),
            True,
        ),
    ]
    return tuple(
        NecessityCase(cond, desc, game, c5, dec, verify_conditions(game, c5, decentralized=dec))
        for cond, desc, game, c5, dec in entries
    )
