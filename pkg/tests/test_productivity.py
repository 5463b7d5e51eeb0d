import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import firm_payoff

from tragedy.game import C, CapacityError, D, all_cooperate, all_defect, evaluate_profile
from tragedy.productivity import (
    SWEEP_CSV_HEADER,
    FirmParams,
    MarketParams,
    ProductivityScenario,
    aggregate_welfare,
    alpha_sweep,
    build_game,
    competitor_output,
    cooperative_surplus,
    dominance_gap,
    firm_utility,
    is_defection_dominant,
    market_shares,
    symmetric_scenario,
    to_symmetric,
    worker_utility,
)
from tragedy.severity import extract_symmetric_payoffs
from tragedy.verifier import Barrier, C5Declaration, verify_conditions


def market(**kw):
    kw.setdefault("market_profit", 10.0)
    kw.setdefault("labor_cost", 1.0)
    return MarketParams(**kw)


TWO = symmetric_scenario(2, market())


class TestValidation:
    def test_alpha_must_exceed_one(self):
        with pytest.raises(ValueError):
            market(alpha=1.0)
        with pytest.raises(ValueError):
            market(alpha=(2.0, 0.5))

    def test_unit_alpha_allowed_for_boundary_probe(self):
        sc = symmetric_scenario(3, market(alpha=1.0, allow_unit_alpha=True))
        # with alpha = 1 both choices coincide
        assert all(s.firm_surplus == 0 and s.worker_surplus == 0 for s in cooperative_surplus(sc))
        d = is_defection_dominant(sc, 0)
        assert not d.holds and d.worst_case_net == 0

    def test_positive_params(self):
        with pytest.raises(ValueError):
            market(market_profit=0)
        with pytest.raises(ValueError):
            FirmParams(output=0, hours=1)

    def test_alpha_length(self):
        with pytest.raises(ValueError):
            symmetric_scenario(3, market(alpha=(2.0, 3.0)))

    def test_two_firms_minimum(self):
        with pytest.raises(ValueError):
            symmetric_scenario(1, market())


class TestPayoffs:
    def test_two_firm_values(self):
        assert firm_utility(TWO, 0, D, (C,)) == pytest.approx(17 / 3)
        assert firm_utility(TWO, 0, C, (C,)) == pytest.approx(4.5)
        assert firm_utility(TWO, 0, D, (D,)) == pytest.approx(4.0)
        assert firm_utility(TWO, 0, C, (D,)) == pytest.approx(17 / 6)

    def test_pd_ordering(self):
        p = extract_symmetric_payoffs(to_symmetric(TWO))
        assert p.T > p.R > p.P > p.S

    def test_matches_oracle_heterogeneous(self):
        rng = random.Random(7)
        firms = tuple(FirmParams(rng.uniform(0.5, 5), rng.uniform(0.5, 5)) for _ in range(4))
        sc = ProductivityScenario(firms, market(alpha=(1.5, 2.0, 3.0, 4.5)))
        game = build_game(sc)
        for p in [(C, D, C, D), (D, D, D, C), all_cooperate(4)]:
            for i, s in enumerate(p):
                rest = sum(
                    f.output * (sc.alpha_of(j) if p[j] is D else 1)
                    for j, f in enumerate(firms)
                    if j != i
                )
                expected = firm_payoff(
                    10, 1, firms[i].output, firms[i].hours, sc.alpha_of(i), s is D, rest
                )
                assert game.payoff(i, p) == pytest.approx(float(expected), rel=1e-12)

    def test_competitor_output(self):
        sc = symmetric_scenario(3, market(alpha=3.0))
        assert competitor_output(sc, 0, (C, D)) == 4.0

    def test_worker_utility(self):
        sc = symmetric_scenario(2, market(wage=2.0, leisure_value=3.0), hours=4.0)
        assert worker_utility(sc, 0, D) == 2.0
        assert worker_utility(sc, 0, C) == pytest.approx(2.0 + 3.0 * 1 * 4 / 2)

    def test_market_shares(self):
        shares = market_shares(symmetric_scenario(3, market()), (D, C, C))
        assert shares == pytest.approx((0.5, 0.25, 0.25))
        assert sum(shares) == pytest.approx(1.0)

    def test_symmetric_form_agrees(self):
        sc = symmetric_scenario(5, market(alpha=2.5), output=2.0, hours=3.0)
        game = build_game(sc)
        assert game.symmetric is not None
        direct = [firm_utility(sc, 0, D, (C, D, C, D)), firm_utility(sc, 0, C, (C, D, C, D))]
        assert game.symmetric.payoff(0, (D, C, D, C, D)) == pytest.approx(direct[0])
        assert game.payoff(0, (C, C, D, C, D)) == pytest.approx(direct[1])


class TestDominance:
    def test_gap_components(self):
        g = dominance_gap(TWO, 0, (C,))
        assert g.market_share_gain == pytest.approx(5 / 3)
        assert g.labor_cost_increase == pytest.approx(0.5)
        assert g.defect_minus_coop == pytest.approx(7 / 6)

    def test_dominant_high_profit(self):
        d = is_defection_dominant(TWO, 0)
        assert d.holds
        # with two identical firms the share gain is 5/3 against either rival choice;
        # the tie goes to the first opponent profile
        assert d.witness == (C,)
        assert d.worst_case_net == pytest.approx(7 / 6)

    def test_fails_with_low_profit(self):
        sc = symmetric_scenario(2, market(market_profit=1.0, labor_cost=5.0))
        d = is_defection_dominant(sc, 1)
        assert not d.holds and d.worst_case_net < 0

    def test_heterogeneous_alpha(self):
        # firm 0 barely gains output, firm 1 gains a lot
        firms = (FirmParams(1, 1), FirmParams(1, 1))
        sc = ProductivityScenario(firms, market(market_profit=4.0, labor_cost=1.0, alpha=(1.05, 8)))
        flags = [is_defection_dominant(sc, i).holds for i in range(2)]
        assert flags == [False, True]

    def test_large_homogeneous_uses_reduction(self):
        sc = symmetric_scenario(40, market(market_profit=100.0))
        d = is_defection_dominant(sc, 0)
        assert len(d.witness) == 39
        assert d.holds == (d.worst_case_net > 0)
        assert d.witness == (D,) * 39

    def test_large_heterogeneous_refused(self):
        firms = tuple(FirmParams(1 + i, 1) for i in range(25))
        with pytest.raises(CapacityError):
            is_defection_dominant(ProductivityScenario(firms, market()), 0)

    def test_reduction_agrees_with_enumeration(self):
        sc = symmetric_scenario(9, market(market_profit=7.0, labor_cost=2.0, alpha=3.0))
        full = is_defection_dominant(sc, 4)
        reduced = is_defection_dominant(sc, 4, brute_force_cap=5)
        assert full.holds == reduced.holds
        assert full.worst_case_net == pytest.approx(reduced.worst_case_net, rel=1e-12)

    def test_dominant_scenario_is_tragedy(self):
        game = build_game(symmetric_scenario(4, market(market_profit=50.0)))
        verdict = verify_conditions(game, C5Declaration(frozenset({Barrier.ANARCHY})))
        assert verdict.is_structural_tragedy
        assert verdict.nash_set == (all_defect(4),)


class TestSurplus:
    def test_closed_form(self):
        sc = symmetric_scenario(3, market(labor_cost=2.0, leisure_value=0.5, alpha=4.0), hours=8)
        for s in cooperative_surplus(sc):
            assert s.firm_surplus == pytest.approx(2.0 * 3 * 8 / 4)
            assert s.worker_surplus == pytest.approx(0.5 * 3 * 8 / 4)

    def test_heterogeneous_evaluated(self):
        firms = (FirmParams(1, 1), FirmParams(2, 3))
        sc = ProductivityScenario(firms, market(alpha=(2.0, 3.0)))
        game = build_game(sc)
        cc, dd = evaluate_profile(game, (C, C)), evaluate_profile(game, (D, D))
        for i, s in enumerate(cooperative_surplus(sc)):
            assert s.firm_surplus == pytest.approx(cc[i] - dd[i])

    def test_aggregate_welfare(self):
        assert aggregate_welfare(TWO) == pytest.approx((9.0, 8.0))

    @settings(max_examples=50, deadline=None)
    @given(
        st.integers(2, 6),
        st.floats(1.01, 50),
        st.floats(0.1, 100),
        st.floats(0.1, 100),
    )
    def test_all_c_beats_all_d_for_common_alpha(self, n, alpha, c, h):
        sc = symmetric_scenario(n, market(labor_cost=c, alpha=alpha), hours=h)
        game = build_game(sc)
        cc, dd = evaluate_profile(game, all_cooperate(n)), evaluate_profile(game, all_defect(n))
        assert all(x > y for x, y in zip(cc, dd))


class TestSweep:
    def test_rows(self):
        rows = alpha_sweep(TWO, [1.5, 2, 4])
        assert [(r.alpha, r.firm_index) for r in rows] == [
            (1.5, 0),
            (1.5, 1),
            (2.0, 0),
            (2.0, 1),
            (4.0, 0),
            (4.0, 1),
        ]
        assert [r.firm_surplus for r in rows[::2]] == pytest.approx([1 / 3, 0.5, 0.75])

    def test_validation(self):
        with pytest.raises(ValueError):
            alpha_sweep(TWO, [2, 1.5])
        with pytest.raises(ValueError):
            alpha_sweep(TWO, [1.0, 2])
        with pytest.raises(ValueError):
            alpha_sweep(TWO, [])

    def test_header(self):
        assert SWEEP_CSV_HEADER == "alpha,firm_index,firm_surplus,worker_surplus"
