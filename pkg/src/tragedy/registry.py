"""Domain-case datasets: built-in reference cases and user case files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from .severity import ConditionProfile, Intensity, Magnitude, tragedy_index

SCHEMA_VERSION = 1
CASE_FIELDS = ("name", "intensities", "conditions_check", "source_note", "footnotes", "variant")
RADAR_CSV_HEADER = "case,c1,c2,c3,c4,c5"


class DatasetError(ValueError):
    """A dataset failed schema or invariant validation."""

    def __init__(self, violations: Sequence[str], source: str = ""):
        self.violations = list(violations)
        where = f"{source}: " if source else ""
        super().__init__(where + "; ".join(self.violations))


class DatasetParseError(DatasetError):
    def __init__(self, message: str, line: int, column: int, source: str = ""):
        self.line, self.column = line, column
        super().__init__([f"line {line}, column {column}: {message}"], source)


class UnknownCaseError(LookupError):
    def __init__(self, name: str, available: Iterable[str]):
        self.name = name
        self.available = list(available)
        super().__init__(f"unknown case {name!r}; available: {', '.join(self.available)}")


@dataclass(frozen=True)
class DomainCase:
    name: str
    profile: ConditionProfile
    conditions_check: tuple[bool, bool, bool, bool, bool] = (True,) * 5
    source_note: str = ""
    footnotes: str = ""
    variant: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "intensities": [x.word for x in self.profile],
            "conditions_check": list(self.conditions_check),
            "source_note": self.source_note,
            "footnotes": self.footnotes,
            "variant": self.variant,
        }


@dataclass(frozen=True)
class CaseDataset:
    cases: tuple[DomainCase, ...]
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        object.__setattr__(self, "cases", tuple(self.cases))

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.cases]

    def get(self, name: str) -> DomainCase:
        for case in self.cases:
            if case.name == name:
                return case
        raise UnknownCaseError(name, self.names)

    def to_dict(self) -> dict[str, Any]:
        return {"schema_version": self.schema_version, "cases": [c.to_dict() for c in self.cases]}


def _case(
    name: str, letters: str, source_note: str, footnotes: str = "", variant: bool = False
) -> DomainCase:
    return DomainCase(
        name=name,
        profile=ConditionProfile.parse(letters),
        source_note=source_note,
        footnotes=footnotes,
        variant=variant,
    )


_BUILTIN = (
    _case("Commons", "M,M,M,M,M", "Hardin (1968)"),
    _case(
        "Security",
        "L,E,H,E,H",
        "Jervis (1978); Mearsheimer (2001)",
        "Rated for the nuclear era: C2 counts anticipatory responses to perceived threats, "
        "C4 counts extinction-scale risk.",
    ),
    _case("Bank Runs", "E,H,H,M,H", "Diamond (1983)"),
    _case("Space Debris", "M,M,M,M,H", "Adilov (2015)"),
    _case("Antibiotics", "E,M,M,M,H", "Foster (2006)"),
    _case("Public Goods", "M,L,L,M,M", "Olson (1965)"),
    _case("Hockey Helmets", "L,L,L,L,M", "Schelling (1973)"),
    _case("Climate Change", "H,H,M,E,H", "Ostrom (2010)"),
    _case("Productivity", "H,M,M,M,H", "productivity-competition game"),
    _case(
        "AI Governance",
        "H,H,E,E,E",
        "AI development race",
        "Ratings assume transformative capabilities (AGI or beyond).",
    ),
)

_VARIANTS = (
    _case(
        "AI (current capabilities)",
        "H,H,H,H,E",
        "AI development race",
        "Present-day capability race, where several competitors survive capability gaps.",
        variant=True,
    ),
)


@dataclass(frozen=True)
class StatedApproximation:
    stated: float
    note: str


# index values quoted elsewhere for a profile that differ from the formula
PUBLISHED_APPROXIMATIONS = {
    ConditionProfile.parse("H,H,H,H,E"): StatedApproximation(
        1000, "The geometric mean is exactly 10**(16/5)."
    ),
}


def builtin_dataset(*, include_variants: bool = False) -> CaseDataset:
    """The ten reference domains; optionally followed by rating variants."""
    cases = _BUILTIN + (_VARIANTS if include_variants else ())
    return CaseDataset(cases)


@dataclass(frozen=True)
class TableRow:
    name: str
    letters: tuple[str, str, str, str, str]
    iota: float
    index: int
    magnitude: Magnitude
    flags: tuple[str, ...] = field(default=())


def approximation_flags(profile: ConditionProfile, iota: float) -> tuple[str, ...]:
    stated = PUBLISHED_APPROXIMATIONS.get(profile)
    if stated is None:
        return ()
    return (
        f"published approximation: index stated as ~{stated.stated:,.0f} for "
        f"({profile.letters}); exact value is {iota:.6g}. {stated.note}",
    )


def compute_table(dataset: CaseDataset) -> list[TableRow]:
    rows = []
    for case in dataset.cases:
        res = tragedy_index(case.profile)
        rows.append(
            TableRow(
                name=case.name,
                letters=tuple(x.letter for x in case.profile),
                iota=res.iota,
                index=res.rounded,
                magnitude=res.magnitude,
                flags=approximation_flags(case.profile, res.iota),
            )
        )
    return rows


def radar_values(profile: ConditionProfile) -> tuple[int, ...]:
    """``log10`` of each intensity weight, with Absent mapped to 0."""
    return tuple(x.exponent or 0 for x in profile)


def radar_data(
    dataset: CaseDataset, selection: Sequence[str] | None = None
) -> list[tuple[str, tuple[int, ...]]]:
    names = dataset.names if selection is None else list(selection)
    return [(name, radar_values(dataset.get(name).profile)) for name in names]


def validate_dataset(data: CaseDataset | dict[str, Any]) -> list[str]:
    """Every schema and invariant violation, in document order."""
    if isinstance(data, CaseDataset):
        data = data.to_dict()
    _, violations = _parse(data)
    return violations


def _parse(data: Any) -> tuple[CaseDataset | None, list[str]]:
    errors: list[str] = []
    if not isinstance(data, dict):
        return None, ["top level must be an object with 'schema_version' and 'cases'"]
    for key in data:
        if key not in ("schema_version", "cases"):
            errors.append(f"unknown top-level field {key!r}")
    version = data.get("schema_version")
    if version is None:
        errors.append("missing 'schema_version'")
    elif not isinstance(version, int) or isinstance(version, bool):
        errors.append(f"schema_version must be an integer, got {version!r}")
    elif version != SCHEMA_VERSION:
        errors.append(f"unsupported schema_version {version}; expected {SCHEMA_VERSION}")
    raw_cases = data.get("cases")
    if not isinstance(raw_cases, list):
        errors.append("'cases' must be an array")
        raw_cases = []
    elif not raw_cases:
        errors.append("dataset has no cases")

    cases = []
    seen: set[str] = set()
    for pos, raw in enumerate(raw_cases):
        case, case_errors = _parse_case(raw, pos)
        errors.extend(case_errors)
        if case is None:
            continue
        if case.name in seen:
            errors.append(f"case {pos}: duplicate case name {case.name!r}")
        seen.add(case.name)
        cases.append(case)
    if errors:
        return None, errors
    return CaseDataset(tuple(cases), version), []


def _parse_case(raw: Any, pos: int) -> tuple[DomainCase | None, list[str]]:
    where = f"case {pos}"
    if not isinstance(raw, dict):
        return None, [f"{where}: must be an object"]
    errors = [f"{where}: unknown field {k!r}" for k in raw if k not in CASE_FIELDS]

    name = raw.get("name")
    if not isinstance(name, str) or not name.strip():
        errors.append(f"{where}: 'name' must be a non-empty string")
        name = None
    else:
        name = name.strip()
        where = f"case {pos} ({name})"

    profile = None
    levels = raw.get("intensities")
    if not isinstance(levels, list) or len(levels) != 5:
        errors.append(f"{where}: 'intensities' must be an array of 5 strings")
    else:
        parsed = []
        for j, token in enumerate(levels):
            if not isinstance(token, str):
                errors.append(f"{where}: intensity C{j + 1} must be a string, got {token!r}")
                continue
            try:
                parsed.append(Intensity.parse(token))
            except ValueError as exc:
                errors.append(f"{where}: C{j + 1}: {exc}")
        if len(parsed) == 5:
            profile = ConditionProfile(tuple(parsed))

    checks = raw.get("conditions_check", [True] * 5)
    if not (
        isinstance(checks, list) and len(checks) == 5 and all(isinstance(b, bool) for b in checks)
    ):
        errors.append(f"{where}: 'conditions_check' must be an array of 5 booleans")
        checks = None

    texts = {}
    for key in ("source_note", "footnotes"):
        value = raw.get(key, "")
        if not isinstance(value, str):
            errors.append(f"{where}: {key!r} must be a string")
        texts[key] = value
    variant = raw.get("variant", False)
    if not isinstance(variant, bool):
        errors.append(f"{where}: 'variant' must be a boolean")

    if profile is not None and checks is not None and not all(checks):
        if Intensity.ABSENT not in profile.intensities:
            errors.append(f"{where}: a condition is marked unmet but no intensity is Absent")
    if errors:
        return None, errors
    return (
        DomainCase(
            name=name,
            profile=profile,
            conditions_check=tuple(checks),
            source_note=texts["source_note"],
            footnotes=texts["footnotes"],
            variant=variant,
        ),
        [],
    )


def dumps_dataset(dataset: CaseDataset) -> str:
    """Canonical JSON text: fixed key order, full intensity words, trailing newline."""
    return json.dumps(dataset.to_dict(), indent=2, ensure_ascii=False) + "\n"


def loads_dataset(text: str, source: str = "") -> CaseDataset:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetParseError(exc.msg, exc.lineno, exc.colno, source) from exc
    dataset, errors = _parse(data)
    if errors:
        raise DatasetError(errors, source)
    return dataset


def load_dataset(path: str | Path) -> CaseDataset:
    path = Path(path)
    return loads_dataset(path.read_text(encoding="utf-8"), str(path))


def save_dataset(dataset: CaseDataset, path: str | Path) -> None:
    Path(path).write_text(dumps_dataset(dataset), encoding="utf-8")
