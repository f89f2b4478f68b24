import subprocess
import sys

import pytest

from gridmend.cli import main
from gridmend.experiments import InstanceSpec, gen_instance
from gridmend.network import format_network

from helpers import FIG2_DAMAGED, ieee13_text


@pytest.fixture
def net_file(tmp_path):
    path = tmp_path / "net.txt"
    path.write_text(ieee13_text(FIG2_DAMAGED))
    return str(path)


@pytest.fixture
def big_file(tmp_path):
    path = tmp_path / "big.txt"
    path.write_text(format_network(gen_instance(InstanceSpec(topology="radial:21", seed=1))))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_no_arguments(capsys):
    code, out, err = run([], capsys)
    assert code == 1
    assert "usage" in err


def test_unknown_flag(net_file, capsys):
    code, _, err = run(["schedule", net_file, "--bogus"], capsys)
    assert code == 1
    assert "usage" in err and "--bogus" in err


def test_schedule_ca(net_file, capsys):
    code, out, err = run(["schedule", net_file, "--crews", "2", "--policy", "ca"], capsys)
    assert code == 0 and err == ""
    lines = out.splitlines()
    assert lines[0] == "crew,job,start,completion"
    assert lines[-1].startswith("harm,")
    assert len(lines) == 1 + 4 + 1


def test_schedule_enum_cap(big_file, capsys):
    code, out, err = run(["schedule", big_file, "--policy", "enum"], capsys)
    assert code == 2
    assert "cap" in err
    assert err.count("\n") == 1


def test_missing_file(capsys):
    code, _, err = run(["schedule", "no/such/file.txt"], capsys)
    assert code == 1 and err.count("\n") == 1


def test_bad_network(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("node a 1 source\nnode b q\n")
    code, _, err = run(["rho", str(bad)], capsys)
    assert code == 1 and "line 2" in err


def test_schedule_outputs_and_score(net_file, tmp_path, capsys):
    sched = tmp_path / "s.csv"
    traj = tmp_path / "t.csv"
    energ = tmp_path / "e.csv"
    code, out, _ = run(["schedule", net_file, "--crews", "2", "--policy", "lp", "--out", str(sched),
                        "--trajectory", str(traj), "--energization", str(energ)], capsys)
    assert code == 0
    harm_line = out.splitlines()[0]
    assert f"wrote,{sched}" in out
    assert traj.read_text().splitlines()[-1].endswith(",1")
    assert len(energ.read_text().splitlines()) == 14
    code, out, _ = run(["score-schedule", net_file, str(sched), "--crews", "2"], capsys)
    assert code == 0 and out.splitlines()[0] == harm_line


def test_seq1_rho_lp(net_file, tmp_path, capsys):
    code, out, _ = run(["seq1", net_file], capsys)
    assert code == 0 and out.splitlines()[1] == "1,650-632"
    code, out, _ = run(["rho", net_file], capsys)
    assert code == 0 and out.splitlines()[0] == "job,rho" and len(out.splitlines()) == 5
    cuts = tmp_path / "cuts.csv"
    code, out, _ = run(["lp", net_file, "--crews", "2", "--dump-cuts", str(cuts)], capsys)
    assert code == 0
    assert out.splitlines()[0] == "job,energization,midpoint"
    assert any(l.startswith("objective,") for l in out.splitlines())
    assert cuts.read_text().splitlines()[1].startswith("1,4,")


def test_export_ilp(net_file, tmp_path, capsys):
    model = tmp_path / "m.lp"
    code, out, _ = run(["export-ilp", net_file, "--crews", "2", "--horizon", "20", "-o", str(model)], capsys)
    assert code == 0
    assert model.read_text().startswith("\\ post-disaster")
    # x on damaged lines, y and f on every line, u on every node
    assert "variables,%d" % (20 * (4 + 2 * 12 + 13)) in out


def test_export_ilp_non_integer(tmp_path, capsys):
    path = tmp_path / "p.txt"
    path.write_text(format_network(gen_instance(InstanceSpec(damage=3, perturb=True, seed=7))))
    code, _, err = run(["export-ilp", str(path), "-o", str(tmp_path / "m.lp")], capsys)
    if code != 0:
        assert code == 1 and "round" in err
    code, _, _ = run(["export-ilp", str(path), "--round", "-o", str(tmp_path / "m.lp")], capsys)
    assert code == 0


def test_gen_and_gap_study(tmp_path, capsys):
    out_net = tmp_path / "g.txt"
    code, _, _ = run(["gen", "--seed", "1", "-o", str(out_net)], capsys)
    assert code == 0 and "damaged" in out_net.read_text()
    report, summary = tmp_path / "r.csv", tmp_path / "s.csv"
    code, _, _ = run(["gap-study", "--damage", "6", "--runs", "5", "--policies", "ca,lp",
                      "-o", str(report), "--summary", str(summary)], capsys)
    assert code == 0
    assert len(report.read_text().splitlines()) == 1 + 5 * 3
    assert summary.read_text().splitlines()[1].startswith("ca,5,")


def test_compare(net_file, tmp_path, capsys):
    code, out, _ = run(["compare", net_file, "--crews", "2", "--out-dir", str(tmp_path / "cmp")], capsys)
    assert code == 0
    assert sorted(p.name for p in (tmp_path / "cmp").iterdir()) == [
        "summary.csv", "trajectory_dispatch.csv", "trajectory_eei.csv", "trajectory_fe.csv"]


def test_config_file(net_file, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\ncrews = 3\npolicy = dispatch\n")
    a = run(["--config", str(cfg), "schedule", net_file], capsys)
    b = run(["schedule", net_file, "--crews", "3", "--policy", "dispatch"], capsys)
    assert a == b
    # explicit flags still win
    c = run(["--config", str(cfg), "schedule", net_file, "--crews", "1"], capsys)
    d = run(["schedule", net_file, "--crews", "1", "--policy", "dispatch"], capsys)
    assert c == d
    cfg.write_text("colour = red\n")
    code, _, err = run(["--config", str(cfg), "schedule", net_file], capsys)
    assert code == 1 and "colour" in err


def test_identical_invocations(net_file, capsys):
    argv = ["schedule", net_file, "--crews", "2", "--policy", "eei"]
    assert run(argv, capsys) == run(argv, capsys)


def test_console_script(net_file):
    proc = subprocess.run([sys.executable, "-m", "gridmend.cli", "schedule", net_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[-1].startswith("harm,")
