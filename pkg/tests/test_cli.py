"""End-to-end CLI behavior: exit codes, pinned output lines, JSON payloads,
and the generate -> check loop."""

import json

import pytest

from moribound.cli import POLYTOPE_FAMILIES, SYSTEM_FAMILIES, main

FIXTURES = "tests/fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- bound: the two closed-form engines ------------------------------------


def test_bound_face_dimension_exact_lines(capsys):
    code, out, _ = run(capsys, "bound", "--d", "2", "--c1", "1", "--c2", "0")
    assert code == 0
    lines = out.splitlines()
    assert "C1 = 1, C2 = 0, band d = 2" in lines
    assert "dim gamma < 34/3" in lines
    assert "dim N1 - dim alpha <= 12" in lines


def test_bound_face_dimension_json(capsys):
    code, out, _ = run(
        capsys, "bound", "--d", "2", "--c1", "1", "--c2", "0",
        "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["bound"] == "34/3"
    assert payload["max_integer"] == 11
    assert payload["relative_bound"] == 12


def test_bound_vertex_count_exact_lines(capsys):
    code, out, _ = run(capsys, "bound", "--lemma14", "--C", "0", "--D", "2/3")
    assert code == 0
    lines = out.splitlines()
    assert "max n = 6" in lines
    assert "rho <= 7" in lines


def test_bound_vertex_count_json(capsys):
    code, out, _ = run(
        capsys, "bound", "--lemma14", "--C", "2/3", "--D", "0",
        "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload == {"C": "2/3", "D": "0", "max_n": 10, "rho_bound": 11}


def test_bound_fractional_c1(capsys):
    code, out, _ = run(capsys, "bound", "--c1", "2/7", "--c2", "0")
    assert code == 0
    assert "dim gamma < 158/21" in out.splitlines()
    assert "dim N1 - dim alpha <= 8" in out.splitlines()


def test_bound_rejects_malformed_fraction(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bound", "--c1", "abc", "--c2", "0"])
    assert exc.value.code == 2


def test_bound_requires_both_constants(capsys):
    code, _, err = run(capsys, "bound", "--c1", "1")
    assert code == 2
    assert "c2" in err


# --- check ---------------------------------------------------------------------


def test_check_accepts_every_fixture(capsys):
    code, out, _ = run(capsys, "check", FIXTURES)
    assert code == 0
    assert "OK" in out


def test_check_reports_kind_per_file(capsys):
    code, out, _ = run(capsys, "check", FIXTURES, "--format", "json")
    assert code == 0
    payload = json.loads(out)
    kinds = {entry["path"].rsplit("/", 1)[-1]: entry["kind"]
             for entry in payload}
    assert kinds["eset_a.json"] == "system"
    assert kinds["b2_pair.json"] == "system"
    assert kinds["diagram_triangle.json"] == "diagram"
    assert all(entry["ok"] for entry in payload)
    assert all(entry["violations"] == [] for entry in payload)


def test_check_detects_realized_and_polytope_kinds(capsys, tmp_path):
    from moribound.generate import realized_d2
    from moribound.polytope import cube, polytope_to_json
    from moribound.realized import model_to_json

    m, _ = realized_d2(0)
    (tmp_path / "model.json").write_text(json.dumps(model_to_json(m)))
    (tmp_path / "shape.json").write_text(
        json.dumps(polytope_to_json(cube(3)))
    )
    code, out, _ = run(capsys, "check", str(tmp_path), "--format", "json")
    assert code == 0
    kinds = {entry["path"].rsplit("/", 1)[-1]: entry["kind"]
             for entry in json.loads(out)}
    assert kinds == {"model.json": "realized", "shape.json": "polytope"}


def test_check_parallel_jobs_same_result(capsys):
    code1, out1, _ = run(capsys, "check", FIXTURES, "--format", "json")
    code2, out2, _ = run(capsys, "check", FIXTURES, "--format", "json",
                         "--jobs", "4")
    assert (code1, out1) == (code2, out2)


def test_check_invalid_system_exits_one(capsys, tmp_path):
    bad = {
        "rays": [
            {"id": "R1", "type": "II", "divisor": "D1"},
            {"id": "R2", "type": "II", "divisor": "D2"},
        ],
        "divisors": ["D1", "D2"],
        "pairing": [[-1, 1], [0, -1]],  # R1 pairs with D2 but no meet listed
        "meets": [],
    }
    path = tmp_path / "bad_system.json"
    path.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "check", str(path))
    assert code == 1
    assert "pairing-without-meet" in out


def test_check_malformed_ray_entries_exit_two(capsys, tmp_path):
    bad = {
        "rays": [["R1", "II", "D1"]],  # entries must be objects
        "divisors": ["D1"],
        "pairing": [[-1]],
    }
    path = tmp_path / "listrays.json"
    path.write_text(json.dumps(bad))
    code, out, _ = run(capsys, "check", str(path))
    assert code == 2
    assert "malformed ray entry" in out


def test_check_broken_json_exits_two(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "check", str(path))
    assert code == 2


def test_check_unknown_shape_exits_two(capsys, tmp_path):
    path = tmp_path / "mystery.json"
    path.write_text(json.dumps({"widgets": [1, 2, 3]}))
    code, _, _ = run(capsys, "check", str(path))
    assert code == 2


def test_check_missing_file_exits_two(capsys, tmp_path):
    code, _, _ = run(capsys, "check", str(tmp_path / "absent.json"))
    assert code == 2


def test_check_mixed_batch_parse_error_dominates(capsys, tmp_path):
    good = tmp_path / "good.json"
    good.write_text((open(f"{FIXTURES}/eset_a.json").read()))
    broken = tmp_path / "broken.json"
    broken.write_text("][")
    code, _, _ = run(capsys, "check", str(tmp_path))
    assert code == 2


# --- classify / esets -------------------------------------------------------------


def test_classify_json_payload(capsys):
    code, out, _ = run(capsys, "classify", f"{FIXTURES}/eset_a.json",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {
        "components", "esets", "failures", "maximal_sets", "e2_pairs"
    }
    assert payload["e2_pairs"] == []
    assert payload["failures"] == []
    # Every maximal extremal set of the cycle is a hub pair.
    labels = {entry["type"] for entry in payload["components"]}
    assert labels == {"C:2"}
    assert [e["case"] for e in payload["esets"]] == ["a"]
    assert all(e["passes_theorem258"] for e in payload["maximal_sets"])


def test_classify_text_mentions_components(capsys):
    code, out, _ = run(capsys, "classify", f"{FIXTURES}/eset_a.json")
    assert code == 0
    assert "C:2" in out
    assert "case a" in out


def test_esets_cycle_case_a(capsys):
    code, out, _ = run(capsys, "esets", f"{FIXTURES}/eset_a.json",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["esets"]) == 1
    entry = payload["esets"][0]
    assert sorted(entry["rays"]) == ["S1", "S2", "S3"]
    assert entry["case"] == "a"
    assert entry["condition_iii_full"] == ["1", "1", "1"]
    assert entry["condition_ii_members"] is False
    assert entry["bipartition_arrows"] is True


def test_esets_empty_for_shared_divisor_pair(capsys):
    code, out, _ = run(capsys, "esets", f"{FIXTURES}/b2_pair.json",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload == {"esets": []}


# --- polytope-stats ------------------------------------------------------------------


def test_polytope_stats_cube(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--family", "cube", "--n", "3",
                       "--out", str(tmp_path / "cube.json"))
    assert code == 0
    code, out, _ = run(capsys, "polytope-stats", str(tmp_path / "cube.json"),
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["dim"] == 3
    assert payload["f_vector"] == [8, 12, 6, 1]
    assert payload["simple"] is True
    assert payload["average_vertices_per_2face"] == "4"
    assert payload["bound"] == "6"
    assert payload["strict"] is True


def test_polytope_stats_nonsimple_skips(capsys, tmp_path):
    pyramid = {
        "dim": 3,
        "vertices": ["a", "b", "c", "d", "t"],
        "facets": [["a", "b", "c", "d"], ["a", "b", "t"], ["b", "c", "t"],
                   ["c", "d", "t"], ["d", "a", "t"]],
    }
    path = tmp_path / "pyramid.json"
    path.write_text(json.dumps(pyramid))
    code, out, _ = run(capsys, "polytope-stats", str(path))
    assert code == 0
    assert "skip" in out.lower() or "not simple" in out.lower()


# --- diagram --------------------------------------------------------------------------


def test_diagram_conforming_exits_zero(capsys):
    code, out, _ = run(capsys, "diagram", f"{FIXTURES}/diagram_triangle.json",
                       "--d", "2", "--rule", "theorem12")
    assert code == 0
    assert "conforming" in out


def test_diagram_nonconforming_exits_one(capsys):
    code, out, _ = run(
        capsys, "diagram", f"{FIXTURES}/diagram_bad_quadrangle.json",
        "--d", "1", "--rule", "theorem258",
    )
    assert code == 1
    assert "counterexample: 2-face-weight-deficit" in out
    assert "counterexample: eset-diameter-exceeds-band" in out


def test_diagram_json_report(capsys):
    code, out, _ = run(
        capsys, "diagram", f"{FIXTURES}/diagram_square_258.json",
        "--d", "1", "--rule", "theorem258", "--format", "json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["conforming"] is True
    assert payload["replay"]["agrees"] is True
    assert payload["empirical_C1"] == "1/2"


# --- gen -> check loop -------------------------------------------------------------


@pytest.mark.parametrize("family", sorted(POLYTOPE_FAMILIES + SYSTEM_FAMILIES))
def test_gen_output_passes_check(capsys, tmp_path, family):
    path = tmp_path / f"{family}.json"
    code, _, _ = run(capsys, "gen", "--family", family, "--seed", "5",
                     "--out", str(path))
    assert code == 0
    code, out, _ = run(capsys, "check", str(path))
    assert code == 0, out


def test_gen_deterministic_bytes(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run(capsys, "gen", "--family", "random-valid",
                         "--seed", "17", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_stdout_when_no_out(capsys):
    code, out, _ = run(capsys, "gen", "--family", "c2")
    assert code == 0
    payload = json.loads(out)
    assert payload["rays"][0] == {"divisor": "D1", "id": "S1", "type": "II"}


def test_gen_rejects_unknown_family(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--family", "dodecahedron"])
    assert exc.value.code == 2


def test_no_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
