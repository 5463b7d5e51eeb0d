import json

import pytest

from tragedy.registry import (
    CaseDataset,
    DatasetError,
    DatasetParseError,
    DomainCase,
    UnknownCaseError,
    builtin_dataset,
    compute_table,
    dumps_dataset,
    load_dataset,
    loads_dataset,
    radar_data,
    save_dataset,
    validate_dataset,
)
from tragedy.severity import ConditionProfile, Intensity, Magnitude


def doc(*cases, version=1):
    return json.dumps({"schema_version": version, "cases": list(cases)})


def case(name="X", intensities=("M",) * 5, **extra):
    return {"name": name, "intensities": list(intensities), **extra}


class TestBuiltin:
    def test_ten_cases(self):
        ds = builtin_dataset()
        assert len(ds.cases) == 10
        assert ds.get("Bank Runs").profile.letters == "E,H,H,M,H"

    def test_variant_is_opt_in(self):
        assert "AI (current capabilities)" not in builtin_dataset().names
        ds = builtin_dataset(include_variants=True)
        assert ds.names[-1] == "AI (current capabilities)"
        assert ds.get("AI (current capabilities)").variant

    def test_table(self):
        rows = {r.name: r for r in compute_table(builtin_dataset())}
        assert rows["Space Debris"].index == 158
        assert rows["Public Goods"].magnitude is Magnitude.MANAGEABLE_NUISANCE
        assert rows["Security"].magnitude is Magnitude.EXISTENTIAL
        assert not any(r.flags for r in rows.values())

    def test_variant_flagged(self):
        rows = compute_table(builtin_dataset(include_variants=True))
        (flag,) = rows[-1].flags
        assert "~1,000" in flag and "1584.89" in flag

    def test_radar(self):
        data = dict(radar_data(builtin_dataset(), ["Security", "AI Governance"]))
        assert data == {"Security": (1, 4, 3, 4, 3), "AI Governance": (3, 3, 4, 4, 4)}

    def test_radar_absent_is_zero(self):
        ds = CaseDataset((DomainCase("solved", ConditionProfile.parse("A,L,M,H,E")),))
        assert radar_data(ds) == [("solved", (0, 1, 2, 3, 4))]

    def test_unknown_case(self):
        with pytest.raises(UnknownCaseError, match="available: Commons"):
            builtin_dataset().get("Fisheries")


class TestRoundTrip:
    def test_builtin_round_trip(self, tmp_path):
        ds = builtin_dataset(include_variants=True)
        path = tmp_path / "cases.json"
        save_dataset(ds, path)
        assert load_dataset(path) == ds
        assert dumps_dataset(load_dataset(path)) == path.read_text()

    def test_canonicalises_tokens(self):
        ds = loads_dataset(doc(case(intensities=("HIGH ", "m", "Low", "e", "L"))))
        assert ds.cases[0].profile.intensities[0] is Intensity.HIGH
        out = json.loads(dumps_dataset(ds))
        assert out["cases"][0]["intensities"] == ["High", "Medium", "Low", "Extreme", "Low"]

    def test_defaults(self):
        c = loads_dataset(doc(case())).cases[0]
        assert c.conditions_check == (True,) * 5
        assert c.source_note == "" and not c.variant


class TestValidation:
    def test_duplicate_name(self):
        with pytest.raises(DatasetError, match="duplicate case name 'X'"):
            loads_dataset(doc(case(), case()))

    def test_all_violations_reported(self):
        bad = doc(
            case(intensities=("H", "Q", "M", "M", "M"), colour="red"),
            case(name="", intensities=("M",) * 4),
        )
        with pytest.raises(DatasetError) as info:
            loads_dataset(bad)
        msgs = info.value.violations
        assert any("unknown field 'colour'" in m for m in msgs)
        assert any("C2" in m and "'Q'" in m for m in msgs)
        assert any("'name' must be a non-empty string" in m for m in msgs)
        assert any("array of 5" in m for m in msgs)

    def test_unmet_condition_needs_absent(self):
        errs = validate_dataset(
            json.loads(doc(case(conditions_check=[True, False, True, True, True])))
        )
        assert errs == ["case 0 (X): a condition is marked unmet but no intensity is Absent"]
        ok = doc(
            case(
                intensities=("A", "M", "M", "M", "M"),
                conditions_check=[False, True, True, True, True],
            )
        )
        assert loads_dataset(ok).cases[0].profile.intensities[0] is Intensity.ABSENT

    def test_schema_version(self):
        with pytest.raises(DatasetError, match="unsupported schema_version 2"):
            loads_dataset(doc(case(), version=2))

    def test_unknown_top_level(self):
        errs = validate_dataset({"schema_version": 1, "cases": [case()], "extra": 1})
        assert errs == ["unknown top-level field 'extra'"]

    def test_parse_error_position(self):
        with pytest.raises(DatasetParseError) as info:
            loads_dataset('{"schema_version": 1,\n  "cases": [,]}')
        assert (info.value.line, info.value.column) == (2, 13)
        assert "line 2, column 13" in str(info.value)

    def test_validate_builtin(self):
        assert validate_dataset(builtin_dataset(include_variants=True)) == []
