import json
import shutil
import subprocess

import pytest

from relcx.cli import (
    CHECKS,
    LoadError,
    Outcome,
    gen_scenario,
    load_scenario,
    main,
    minimize,
    parse_selection,
    run_checks,
    scenario_from_dict,
)
from relcx.ordsets import InvalidArgument

FAST = "dd,iota,oracle"


def write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def test_gen_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "--n", "4", "--seed", "42", "--out", str(a)]) == 0
    assert main(["gen", "--n", "4", "--seed", "42", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["gen", "--n", "4", "--seed", "42", "--out", "-"]) == 0
    assert capsys.readouterr().out.encode() == a.read_bytes()
    assert gen_scenario(4, seed=43) != gen_scenario(4, seed=42)


def test_gen_rejects_bad_sizes(capsys):
    assert main(["gen", "--n", "7", "--seed", "1", "--out", "-"]) == 2
    assert "n must lie" in capsys.readouterr().err
    with pytest.raises(InvalidArgument):
        gen_scenario(3, sizes=0)
    with pytest.raises(InvalidArgument):
        gen_scenario(3, base_size=4)


def test_generated_scenarios_load():
    for seed in range(5):
        sc = scenario_from_dict(gen_scenario(3, sizes=2, seed=seed))
        assert sc.n == 3 and sc.seed == seed


def test_check_output_is_byte_stable(capsys):
    args = ["check", "--scenario", "examples/point_n3.json", "--props", FAST, "--no-timings"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert first.count("PASS") == 3


def test_json_report(capsys):
    assert main(["check", "--scenario", "examples/point_n3.json", "--props", "dd", "--report", "json", "--no-timings"]) == 0
    data = json.loads(capsys.readouterr().out)
    text = json.dumps(data)
    assert "dd" in text and "PASS" in text


def test_unknown_check_id(capsys):
    assert main(["check", "--scenario", "examples/point_n3.json", "--props", "dd,nope"]) == 2
    assert "nope" in capsys.readouterr().err
    with pytest.raises(InvalidArgument):
        parse_selection("bogus")
    assert parse_selection("all") == sorted(CHECKS)


def test_missing_file_exit_code(tmp_path, capsys):
    assert main(["check", "--scenario", str(tmp_path / "none.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_invalid_json_reports_position(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"model": "point",\n  "seed": }')
    assert main(["check", "--scenario", str(p)]) == 2
    assert "bad.json:2:" in capsys.readouterr().err


def test_malformed_differential_entry_is_located(tmp_path, capsys):
    data = json.loads(load_scenario_text("table_sample.json"))
    data["complexes"]["2"]["d"].append(["e", "c"])
    assert main(["check", "--scenario", write(tmp_path, data)]) == 2
    err = capsys.readouterr().err
    assert "complexes.2.d[1]" in err


def test_point_errors_name_the_entry(tmp_path):
    data = gen_scenario(3, sizes=2, seed=1)
    data["varieties"][1]["points"][0]["toS"] = "nowhere"
    with pytest.raises(LoadError) as err:
        load_scenario(write(tmp_path, data))
    assert ("varieties[1].points[0]", "maps to 'nowhere', which is not in S") in err.value.problems


def test_unknown_model_kind():
    with pytest.raises(LoadError):
        scenario_from_dict({"model": "cubical"})
    with pytest.raises(LoadError):
        scenario_from_dict([1, 2])


def test_broken_table_fixture_rejected(capsys):
    assert main(["check", "--scenario", "examples/table_broken.json"]) == 2
    assert "closed under boundary" in capsys.readouterr().err


def test_table_sample_skips_point_only_checks():
    report = run_checks(load_scenario("examples/table_sample.json"))
    status = {r.check_id: r.status for r in report.results}
    assert status["dd"] == status["oracle"] == status["distinguished"] == "PASS"
    assert status["laws"] == status["diag"] == "SKIP"
    assert report.ok


def test_two_factor_scenario_skips_exactness():
    sc = scenario_from_dict(gen_scenario(2, sizes=2, seed=3))
    report = run_checks(sc, ["exact", "dd", "acyclic"])
    status = {r.check_id: r.status for r in report.results}
    assert status == {"acyclic": "PASS", "dd": "PASS", "exact": "SKIP"}


def test_invalid_check_options_are_located(tmp_path, capsys):
    data = json.loads(load_scenario_text("point_n3.json"))
    data["checks"] = {"exactness": [[[2], [2]]], "K": [[1]]}
    assert main(["check", "--scenario", write(tmp_path, data)]) == 2
    err = capsys.readouterr().err
    assert "checks.exactness[0]: R and J must be disjoint" in err
    assert "checks.K[0]" in err


def test_failing_check_gives_exit_one(monkeypatch, capsys):
    monkeypatch.setitem(CHECKS, "dd", ("d-squared-zero", lambda ctx: Outcome(False, {"generator": "x"})))
    code = main(["check", "--scenario", "examples/point_n3.json", "--props", "dd,iota", "--no-timings"])
    out = capsys.readouterr().out
    assert code == 1
    assert "FAIL" in out and "generator" in out and "PASS" in out


def test_minimize_finds_small_witness():
    items = list(range(10))
    assert minimize(items, lambda xs: 3 in xs and 7 in xs) == [3, 7]


def test_demo_runs_corpus(capsys):
    assert main(["demo", "--props", FAST, "--no-timings"]) == 0
    out = capsys.readouterr().out
    assert "rejected as expected" in out
    assert "FAIL" not in out


@pytest.mark.skipif(shutil.which("relcx") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["relcx", "gen", "--n", "3", "--seed", "1", "--out", "-"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["seed"] == 1


def load_scenario_text(name):
    from importlib import resources

    return resources.files("relcx.data").joinpath(name).read_text()
