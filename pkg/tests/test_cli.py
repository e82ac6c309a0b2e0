"""The command-line surface: exit codes, formats, config files."""

import json

import pytest

from pkslab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "structured")
    return code, json.loads(out)


def test_geometry_text_and_structured(capsys):
    code, out = run(capsys, "geometry")
    assert code == 0
    assert "rays: 33" in out
    assert "bases: 16" in out
    code, report = run_json(capsys, "geometry")
    assert code == 0
    assert report["schema_version"] == 1
    assert report["ray_count"] == 33
    assert report["basis_count"] == 16
    assert report["symmetry_count"] == 24
    assert report["orthogonal_pair_count"] == 72
    assert report["type_counts"] == {"I": 3, "II": 6, "III": 12, "IV": 12}
    assert {"index": 0, "label": "001", "record": "0 0 1", "type": "I"} in report["rays"]
    assert report["config_hash"]


def test_ks_verify(capsys):
    code, report = run_json(capsys, "ks-verify")
    assert code == 0
    assert report["unsat"] is True
    assert report["consistent_colourings"] == 0
    assert report["seed_colourings"] == 24
    assert report["walkthrough"]["forced_greens"] == [
        "102", "211", "201", "112", "012", "121"
    ]
    assert "B11" in report["walkthrough"]["contradiction"]


def test_phi_m_table(capsys):
    code, report = run_json(capsys, "phi-m")
    assert code == 0
    assert report["errata"] == ["112"]
    assert report["mismatches"] == []
    assert report["both_valued_false"] == ["021", "201", "m112", "1m12"]
    assert report["preclusive_on_pks_family"] is True
    row = next(r for r in report["rows"] if r["ray"] == "112")
    assert (row["green_value"], row["red_value"]) == (1, 0)
    assert row["published"] == ["g", "g", 1, 1]
    code, out = run(capsys, "phi-m")
    assert "ERRATUM" in out


def test_measure_check_default(capsys):
    code, report = run_json(capsys, "measure-check", "--samples", "25")
    assert code == 0
    assert report["pass"] is True
    assert report["axioms"]["hermiticity"] < 1e-10
    assert report["pks_zero"]["all_zero"] is True
    assert report["pks_zero"]["events"] == 88


def test_measure_check_with_detector(capsys):
    code, report = run_json(
        capsys, "measure-check", "--samples", "20", "--detector", "021"
    )
    assert code == 0
    assert report["detector"]["sector_cross_term"] == 0
    assert report["detector"]["position"] == 12


def test_measure_check_with_files(tmp_path, capsys):
    ordering_file = tmp_path / "ordering.txt"
    from pkslab.measure import Ordering
    from pkslab.rays import ray_index

    moved = Ordering.default().with_ray_last(ray_index("021"))
    ordering_file.write_text("\n".join(moved.labels()))
    state_file = tmp_path / "state.json"
    state_file.write_text(json.dumps({"pure": [[0, 0], [1, 0], [0, 0]]}))
    code, report = run_json(
        capsys,
        "measure-check",
        "--ordering", str(ordering_file),
        "--state", str(state_file),
        "--samples", "20",
    )
    assert code == 0
    assert report["pass"] is True


def test_ordering_file_in_record_format(tmp_path, capsys):
    from pkslab.rays import PERES_RAYS

    ordering_file = tmp_path / "ordering.txt"
    ordering_file.write_text("\n".join(r.record for r in PERES_RAYS))
    code, report = run_json(
        capsys, "measure-check", "--ordering", str(ordering_file), "--samples", "15"
    )
    assert code == 0
    assert report["pass"] is True


def test_measure_check_rejects_bad_state(tmp_path, capsys):
    state_file = tmp_path / "state.json"
    state_file.write_text(json.dumps({"pure": [[1, 0], [1, 0], [0, 0]]}))
    code = main(["measure-check", "--state", str(state_file)])
    assert code == 2


def test_measure_check_mixed_state_file(tmp_path, capsys):
    state_file = tmp_path / "state.json"
    state_file.write_text(
        json.dumps(
            {
                "mixed": [
                    {"weight": 0.5, "pure": [[1, 0], [0, 0], [0, 0]]},
                    {"weight": 0.5, "pure": [[0, 0], [0, 0], [1, 0]]},
                ]
            }
        )
    )
    code, report = run_json(
        capsys, "measure-check", "--state", str(state_file), "--samples", "20"
    )
    assert code == 0
    assert report["pass"] is True


def test_zero_scan_default(capsys):
    code, report = run_json(capsys, "zero-scan", "--max-fixed", "2")
    assert code == 0
    assert report["zero_events"] == 505
    assert report["coverage"]["status"] == "covered"
    assert report["coverage"]["witness"]
    assert report["pks_only_coverage"] == "not-covered-within-scope"


def test_zero_scan_021_last(tmp_path, capsys):
    from pkslab.measure import Ordering
    from pkslab.rays import ray_index

    moved = Ordering.default().with_ray_last(ray_index("021"))
    f = tmp_path / "ordering.json"
    f.write_text(json.dumps(list(moved.labels())))
    code, report = run_json(
        capsys, "zero-scan", "--ordering", str(f), "--max-fixed", "2"
    )
    assert code == 0
    built = report["final_stage_construction"]
    assert built["norm1"] < 1e-10 and built["norm2"] < 1e-10
    assert built["separating_ray"] == "021"
    assert report["coverage"]["status"] == "covered"


def test_zero_scan_budget_guard(capsys):
    code = main(["zero-scan", "--max-fixed", "12"])
    assert code == 2


def test_zero_scan_with_detector(capsys):
    code, report = run_json(
        capsys, "zero-scan", "--max-fixed", "2", "--detector", "021"
    )
    assert code == 0
    assert report["detector"] == "021"
    assert report["zero_events"] == 343
    assert report["provenance_counts"]["pks"] == 57


def test_zero_scan_with_search(capsys):
    code, report = run_json(capsys, "zero-scan", "--max-fixed", "1", "--budget", "3")
    assert code == 0
    assert len(report["search"]["candidates"]) == 3
    probe = next(
        c for c in report["search"]["candidates"] if c["label"] == "probe-021-last"
    )
    assert probe["status"] == "covered"
    assert probe["witness"]


def test_lemma_fuzz(capsys):
    code, report = run_json(capsys, "lemma-fuzz", "--trials", "25", "--seed", "3")
    assert code == 0
    assert report["pass"] is True
    assert report["classical_failures"] == []
    assert report["homomorphism_counts"] == {"1": 1, "2": 2, "3": 3, "4": 4}


def test_unknown_command_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_structured_text_numeric_agreement(capsys):
    _, report = run_json(capsys, "geometry")
    _, text = run(capsys, "geometry")
    assert f"rays: {report['ray_count']}" in text
    assert f"bases: {report['basis_count']}" in text
    assert f"symmetries: {report['symmetry_count']}" in text
