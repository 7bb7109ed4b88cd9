import json

import pytest

from fourierpulse import reference
from fourierpulse.cli import main
from fourierpulse.notation import canonical
from fourierpulse.records import load_design


def summary(out: str) -> dict:
    line = [ln for ln in out.splitlines() if ln.startswith("SUMMARY ")][-1]
    return json.loads(line[len("SUMMARY "):])


def test_design_compile_simulate(tmp_path, capsys):
    d, p, c = tmp_path / "d.json", tmp_path / "p.txt", tmp_path / "s.csv"
    assert main(["design", "--method", "dmod", "--terms", "2", "--selection", "heuristic", "--out", str(d)]) == 0
    s = summary(capsys.readouterr().out)
    assert [round(a, 1) for a in s["alphas_deg"]] == [105.5, 16.7]
    assert load_design(d).gammas_deg == [90.0, 270.0]
    assert main(["compile", str(d), "--out", str(p)]) == 0
    assert canonical(p.read_text()) == canonical(reference.PROGRAMS[("DeltaMod", "heuristic", 2)])
    capsys.readouterr()
    assert main(["simulate", str(p), "--csv", str(c)]) == 0
    s = summary(capsys.readouterr().out)
    assert s["programs"][0]["l2_error"] == pytest.approx(0.0257, abs=1e-3)
    assert c.read_text().splitlines()[0] == "epsilon,x,y,z"


def test_design_fsm_heuristic(capsys):
    assert main(["design", "--method", "fsm", "--terms", "3"]) == 0
    s = summary(capsys.readouterr().out)
    assert [round(g, 1) for g in s["gammas_deg"]] == [49.3, 196.5, 369.0]


@pytest.mark.parametrize(
    "argv",
    [
        ["design", "--method", "fsm", "--terms", "0"],
        ["design", "--method", "xyz", "--terms", "2"],
        ["simulate", "x.txt", "--grid", "4"],
        ["table1", "--bogus"],
    ],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_compile_threshold_zero(tmp_path, capsys):
    d = tmp_path / "d.json"
    main(["design", "--method", "fsm", "--terms", "2", "--out", str(d)])
    assert main(["compile", str(d), "--threshold", "0"]) == 1
    assert "threshold" in capsys.readouterr().err


def test_malformed_pulse_reports_position(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("[(90.0)_0(180.0)_{175.6}(90.0)_0\n")
    assert main(["simulate", str(f)]) == 1
    assert "position 33" in capsys.readouterr().err


def test_evaluate_with_expected_value(tmp_path, capsys):
    f = tmp_path / "p.txt"
    f.write_text(reference.PROGRAMS[("FSM", "gradient", 4)] + "\n")
    assert main(["evaluate", str(f), "--expect", "0.00423"]) == 0
    assert summary(capsys.readouterr().out)["programs"][0]["ideal"] == pytest.approx(0.0042, abs=3e-4)
    assert main(["evaluate", str(f), "--expect", "0.5"]) == 1


def test_table1_published_heuristic(capsys):
    assert main(["table1", "--published", "--selection", "heuristic"]) == 0
    s = summary(capsys.readouterr().out)
    assert s["cells"] == 6 and s["failed"] == []


def test_modulate_csv(tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert main(["modulate", "--A", "1", "--B", "0.01", "--eps", "0.6", "1.0", "--csv", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "epsilon,c_first_order,c_simulated" and len(rows) == 3
    assert summary(capsys.readouterr().out)["angle_at_one"] == pytest.approx(0.16, rel=1e-3)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["modulate", "--shape", str(bad)]) == 1


def test_roundtrip_corpus(capsys):
    assert main(["roundtrip"]) == 0
    assert summary(capsys.readouterr().out)["programs"] == 18


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("FOURIERPULSE_SEED", "5")
    assert main(["design", "--method", "dmod", "--terms", "2", "--selection", "gradient", "--starts", "3"]) == 0
    first = summary(capsys.readouterr().out)
    assert main(["design", "--method", "dmod", "--terms", "2", "--selection", "gradient", "--starts", "3",
                 "--seed", "5"]) == 0
    assert summary(capsys.readouterr().out) == first
