"""Declarative game configs for the CLI.

Two kinds are accepted::

    {"kind": "productivity",
     "firms": [{"output": 1, "hours": 1}, ...],
     "market": {"market_profit": 10, "labor_cost": 1, "leisure_value": 1,
                "wage": 0, "alpha": 2}}

    {"kind": "symmetric", "u_coop": [...], "u_defect": [...]}

``alpha`` may be a number or one value per firm. Symmetric tables are
indexed by the number of cooperating opponents, so ``n`` is their length.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .game import GameSpec, SymmetricSpec, symmetric_to_game
from .productivity import FirmParams, MarketParams, ProductivityScenario, build_game


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GameConfig:
    kind: str
    name: str
    game: GameSpec
    scenario: ProductivityScenario | None = None
    symmetric: SymmetricSpec | None = None


_MARKET_KEYS = {"market_profit", "labor_cost", "leisure_value", "wage", "alpha"}


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def parse_scenario(data: dict[str, Any]) -> ProductivityScenario:
    firms_raw = data.get("firms")
    if not isinstance(firms_raw, list):
        raise ConfigError("'firms' must be an array of {output, hours} objects")
    firms = []
    for i, f in enumerate(firms_raw):
        if not isinstance(f, dict) or set(f) != {"output", "hours"}:
            raise ConfigError(f"firms[{i}] must have exactly the fields 'output' and 'hours'")
        output = _number(f["output"], f"firms[{i}].output")
        firms.append(FirmParams(output, _number(f["hours"], f"firms[{i}].hours")))
    market = data.get("market")
    if not isinstance(market, dict):
        raise ConfigError("'market' must be an object")
    unknown = set(market) - _MARKET_KEYS
    if unknown:
        raise ConfigError(f"unknown market fields: {', '.join(sorted(unknown))}")
    for key in ("market_profit", "labor_cost"):
        if key not in market:
            raise ConfigError(f"market.{key} is required")
    alpha = market.get("alpha", 2.0)
    if isinstance(alpha, list):
        alpha = tuple(_number(a, "market.alpha[]") for a in alpha)
    else:
        alpha = _number(alpha, "market.alpha")
    params = MarketParams(
        market_profit=_number(market["market_profit"], "market.market_profit"),
        labor_cost=_number(market["labor_cost"], "market.labor_cost"),
        leisure_value=_number(market.get("leisure_value", 1.0), "market.leisure_value"),
        wage=_number(market.get("wage", 0.0), "market.wage"),
        alpha=alpha,
    )
    return ProductivityScenario(tuple(firms), params)


def parse_config(data: Any) -> GameConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    kind = data.get("kind")
    name = str(data.get("name", kind or ""))
    try:
        if kind == "productivity":
            unknown = set(data) - {"kind", "name", "firms", "market"}
            if unknown:
                raise ConfigError(f"unknown fields: {', '.join(sorted(unknown))}")
            scenario = parse_scenario(data)
            return GameConfig(kind, name, build_game(scenario), scenario=scenario)
        if kind == "symmetric":
            unknown = set(data) - {"kind", "name", "u_coop", "u_defect"}
            if unknown:
                raise ConfigError(f"unknown fields: {', '.join(sorted(unknown))}")
            coop, defect = data.get("u_coop"), data.get("u_defect")
            if not isinstance(coop, list) or not isinstance(defect, list):
                raise ConfigError("'u_coop' and 'u_defect' must be arrays of payoffs")
            sym = SymmetricSpec.from_tables(
                [_number(x, "u_coop[]") for x in coop], [_number(x, "u_defect[]") for x in defect]
            )
            return GameConfig(kind, name, symmetric_to_game(sym, name=name), symmetric=sym)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"'kind' must be 'productivity' or 'symmetric', got {kind!r}")


def load_config(path: str | Path) -> tuple[GameConfig, str]:
    """Parsed config plus the raw text (used for the report digest)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data), text
