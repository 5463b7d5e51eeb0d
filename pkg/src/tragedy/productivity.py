"""N-firm productivity competition.

After a productivity gain ``alpha > 1`` each firm either cooperates (keeps
output ``Q``, cuts hours to ``H / alpha``) or defects (keeps hours ``H``,
expands output to ``alpha * Q``). Total market profit ``pi`` is split by
output share; labour costs ``c`` per hour. Each firm's workers value a freed
hour at ``beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .game import (
    DEFAULT_BRUTE_FORCE_CAP,
    C,
    CapacityError,
    D,
    GameSpec,
    Profile,
    Strategy,
    SymmetricSpec,
    all_cooperate,
    all_defect,
    opponents_of,
    profiles,
)


@dataclass(frozen=True)
class FirmParams:
    output: float
    hours: float

    def __post_init__(self) -> None:
        if not (self.output > 0 and self.hours > 0):
            raise ValueError(f"firm output and hours must be positive, got {self}")


@dataclass(frozen=True)
class MarketParams:
    market_profit: float
    labor_cost: float
    leisure_value: float = 1.0
    wage: float = 0.0
    alpha: float | tuple[float, ...] = 2.0
    # tests relax the alpha > 1 requirement to probe the alpha = 1 boundary
    allow_unit_alpha: bool = False

    def __post_init__(self) -> None:
        if not self.market_profit > 0:
            raise ValueError("market_profit must be positive")
        if not self.labor_cost > 0:
            raise ValueError("labor_cost must be positive")
        if not self.leisure_value > 0:
            raise ValueError("leisure_value must be positive")
        if not isinstance(self.alpha, (int, float)):
            object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        alphas = self.alpha if isinstance(self.alpha, tuple) else (self.alpha,)
        for a in alphas:
            if not (a > 1 or (self.allow_unit_alpha and a == 1)):
                raise ValueError(f"productivity factor must exceed 1, got {a}")

    @property
    def heterogeneous(self) -> bool:
        return isinstance(self.alpha, tuple)


@dataclass(frozen=True)
class ProductivityScenario:
    firms: tuple[FirmParams, ...]
    market: MarketParams

    def __post_init__(self) -> None:
        object.__setattr__(self, "firms", tuple(self.firms))
        if len(self.firms) < 2:
            raise ValueError("the game needs at least 2 firms")
        if self.market.heterogeneous and len(self.market.alpha) != len(self.firms):
            raise ValueError(
                f"per-firm alpha has length {len(self.market.alpha)}, expected {len(self.firms)}"
            )

    @property
    def n(self) -> int:
        return len(self.firms)

    def alpha_of(self, firm: int) -> float:
        a = self.market.alpha
        return a[firm] if isinstance(a, tuple) else a

    @property
    def homogeneous(self) -> bool:
        """Identical firms and a common alpha: the game is anonymous."""
        return not self.market.heterogeneous and len(set(self.firms)) == 1

    def with_alpha(self, alpha: float | Sequence[float]) -> ProductivityScenario:
        m = self.market
        market = MarketParams(
            market_profit=m.market_profit,
            labor_cost=m.labor_cost,
            leisure_value=m.leisure_value,
            wage=m.wage,
            alpha=alpha if isinstance(alpha, (int, float)) else tuple(alpha),
            allow_unit_alpha=m.allow_unit_alpha,
        )
        return ProductivityScenario(self.firms, market)


def symmetric_scenario(
    n: int, market: MarketParams, output: float = 1.0, hours: float = 1.0
) -> ProductivityScenario:
    return ProductivityScenario((FirmParams(output, hours),) * n, market)


def firm_output(scenario: ProductivityScenario, firm: int, strategy: Strategy) -> float:
    q = scenario.firms[firm].output
    return scenario.alpha_of(firm) * q if strategy is D else q


def firm_hours(scenario: ProductivityScenario, firm: int, strategy: Strategy) -> float:
    h = scenario.firms[firm].hours
    return h if strategy is D else h / scenario.alpha_of(firm)


def competitor_output(scenario: ProductivityScenario, firm: int, opponents: Profile) -> float:
    """``Q_{-i}``: total output of the other firms under ``opponents`` (others in index order)."""
    others = [j for j in range(scenario.n) if j != firm]
    if len(opponents) != len(others):
        raise ValueError(f"expected {len(others)} opponent strategies, got {len(opponents)}")
    return sum(firm_output(scenario, j, s) for j, s in zip(others, opponents))


def _share(own: float, rest: float) -> float:
    total = own + rest
    if not total > 0:
        raise ZeroDivisionError("market share undefined: total output is zero")
    return own / total


def firm_utility(
    scenario: ProductivityScenario, firm: int, own: Strategy, opponents: Profile
) -> float:
    """Profit: market-share revenue minus labour cost."""
    m = scenario.market
    rest = competitor_output(scenario, firm, opponents)
    revenue = m.market_profit * _share(firm_output(scenario, firm, own), rest)
    return revenue - m.labor_cost * firm_hours(scenario, firm, own)


def worker_utility(scenario: ProductivityScenario, firm: int, own: Strategy) -> float:
    m = scenario.market
    if own is D:
        return m.wage
    a = scenario.alpha_of(firm)
    return m.wage + m.leisure_value * (a - 1) * scenario.firms[firm].hours / a


def market_shares(scenario: ProductivityScenario, profile: Profile) -> tuple[float, ...]:
    outputs = [firm_output(scenario, i, s) for i, s in enumerate(profile)]
    total = sum(outputs)
    return tuple(q / total for q in outputs)


def build_game(
    scenario: ProductivityScenario, *, brute_force_cap: int = DEFAULT_BRUTE_FORCE_CAP
) -> GameSpec:
    """Firm-profit game. Homogeneous scenarios also carry their anonymous form."""

    def payoff(i: int, profile: Profile) -> float:
        return firm_utility(scenario, i, profile[i], opponents_of(profile, i))

    sym = to_symmetric(scenario) if scenario.homogeneous else None
    return GameSpec(
        n=scenario.n,
        payoff=payoff,
        brute_force_cap=brute_force_cap,
        symmetric=sym,
        name="productivity",
    )


def to_symmetric(scenario: ProductivityScenario) -> SymmetricSpec:
    """Anonymous form of a homogeneous scenario, indexed by cooperating competitors."""
    if not scenario.homogeneous:
        raise ValueError("only scenarios with identical firms and a common alpha are anonymous")
    n = scenario.n
    m = scenario.market
    a = scenario.alpha_of(0)
    q, h = scenario.firms[0].output, scenario.firms[0].hours

    def rest(k: int) -> float:
        return k * q + (n - 1 - k) * a * q

    def u_coop(k: int) -> float:
        return m.market_profit * _share(q, rest(k)) - m.labor_cost * h / a

    def u_defect(k: int) -> float:
        return m.market_profit * _share(a * q, rest(k)) - m.labor_cost * h

    return SymmetricSpec(n=n, u_coop=u_coop, u_defect=u_defect)


@dataclass(frozen=True)
class DominanceGap:
    market_share_gain: float
    labor_cost_increase: float
    defect_minus_coop: float


def dominance_gap(scenario: ProductivityScenario, firm: int, opponents: Profile) -> DominanceGap:
    """Split ``U_F(D) - U_F(C)`` into share gain and extra labour cost."""
    m = scenario.market
    a = scenario.alpha_of(firm)
    q = scenario.firms[firm].output
    h = scenario.firms[firm].hours
    rest = competitor_output(scenario, firm, opponents)
    gain = m.market_profit * (_share(a * q, rest) - _share(q, rest))
    increase = m.labor_cost * h * (1 - 1 / a)
    return DominanceGap(gain, increase, gain - increase)


@dataclass(frozen=True)
class DefectionDominance:
    holds: bool
    worst_case_net: float
    witness: Profile  # opponent profile attaining worst_case_net


def is_defection_dominant(
    scenario: ProductivityScenario, firm: int, *, brute_force_cap: int = DEFAULT_BRUTE_FORCE_CAP
) -> DefectionDominance:
    """Check the share-gain-exceeds-labour-cost condition against every opponent profile.

    Exhaustive up to ``brute_force_cap``. Larger homogeneous scenarios are
    reduced to the number of defecting competitors.
    """
    n = scenario.n
    if not 0 <= firm < n:
        raise IndexError(f"firm {firm} out of range for n={n}")
    if n > brute_force_cap:
        if not scenario.homogeneous:
            raise CapacityError(
                f"n={n} exceeds the brute-force cap of {brute_force_cap} firms and the "
                "scenario is heterogeneous, so it has no anonymous reduction"
            )
        candidates = ((C,) * k + (D,) * (n - 1 - k) for k in range(n - 1, -1, -1))
    else:
        candidates = profiles(n - 1)
    worst = math.inf
    witness: Profile = ()
    for opp in candidates:
        net = dominance_gap(scenario, firm, opp).defect_minus_coop
        if net < worst:
            worst, witness = net, opp
    return DefectionDominance(worst > 0, worst, witness)


@dataclass(frozen=True)
class Surplus:
    firm_surplus: float
    worker_surplus: float


def cooperative_surplus(scenario: ProductivityScenario) -> tuple[Surplus, ...]:
    """Per-firm gain of all-C over all-D for the firm and its workers.

    With a common alpha market shares cancel and the firm gain is the labour
    cost saving ``c (alpha - 1) H / alpha``. With per-firm alphas the share
    terms no longer cancel and the difference is evaluated directly.
    """
    m = scenario.market
    n = scenario.n
    out = []
    for i in range(n):
        a = scenario.alpha_of(i)
        h = scenario.firms[i].hours
        if scenario.market.heterogeneous:
            firm = firm_utility(scenario, i, C, (C,) * (n - 1)) - firm_utility(
                scenario, i, D, (D,) * (n - 1)
            )
        else:
            firm = m.labor_cost * (a - 1) * h / a
        worker = m.leisure_value * (a - 1) * h / a
        out.append(Surplus(firm, worker))
    return tuple(out)


def welfare(scenario: ProductivityScenario, profile: Profile) -> float:
    """Sum of firm profits."""
    return sum(
        firm_utility(scenario, i, profile[i], opponents_of(profile, i)) for i in range(scenario.n)
    )


def aggregate_welfare(scenario: ProductivityScenario) -> tuple[float, float]:
    """Total firm profit at all-C and at all-D."""
    n = scenario.n
    return welfare(scenario, all_cooperate(n)), welfare(scenario, all_defect(n))


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    firm_index: int
    firm_surplus: float
    worker_surplus: float


SWEEP_CSV_HEADER = "alpha,firm_index,firm_surplus,worker_surplus"


def alpha_sweep(scenario: ProductivityScenario, alphas: Sequence[float]) -> list[SweepRow]:
    """Cooperative surplus per firm at each common alpha, rows in input order."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("alpha sweep needs at least one value")
    for a in alphas:
        if not a > 1:
            raise ValueError(f"sweep values must exceed 1, got {a}")
    for lo, hi in zip(alphas, alphas[1:]):
        if not hi > lo:
            raise ValueError(f"sweep values must be strictly ascending, got {lo} then {hi}")
    rows = []
    for a in alphas:
        for i, s in enumerate(cooperative_surplus(scenario.with_alpha(a))):
            rows.append(SweepRow(a, i, s.firm_surplus, s.worker_surplus))
    return rows
