import csv
import json
import subprocess
import sys

import pytest

from bsqec.cli import ConfigError, load_config, main


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_simulate_is_reproducible(tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"sim{i}.csv"
        assert main(["simulate", "--code", "bs13", "--p", "0.003", "--trials", "300",
                     "--sampler", "direct", "--seed", "7", "-o", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    r = rows(tmp_path / "sim0.csv")
    assert len(r) == 1 and r[0]["seed"] == "7" and r[0]["method"] == "direct"
    assert 0 <= float(r[0]["p_logical"]) <= 1 and len(r[0]["digest"]) == 12


def test_sweep_rows(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--code", "bs13,s17", "--param", "rounds", "--values", "0,1",
                 "--p", "0.002", "--trials", "100", "--sampler", "direct", "-o", str(out)]) == 0
    r = rows(out)
    assert len(r) == 4
    assert {x["rounds"] for x in r} == {"0", "1"}


def test_ftcheck_exit_codes(tmp_path):
    assert main(["ftcheck", "--code", "bs13", "-o", str(tmp_path / "ok.csv")]) == 0
    assert main(["ftcheck", "--code", "bs13", "--order", "naive",
                 "-o", str(tmp_path / "bad.csv")]) == 2


def test_times_output(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["times", "--code", "bs13,s17", "--arrangement", "MA", "--mode", "both",
                 "-o", str(out)]) == 0
    r = rows(out)
    assert len(r) == 4


def test_anneal_writes_arrangement(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for path in (a, b):
        assert main(["anneal", "--code", "bs13", "--objective", "MA", "--steps", "2000",
                     "--seed", "3", "-o", str(path)]) == 0
    assert a.read_text() == b.read_text()
    lines = [l for l in a.read_text().splitlines() if not l.startswith("#")]
    perm = [int(x) for x in lines[0].split()]
    assert sorted(perm) == list(range(13))
    assert (tmp_path / "a.txt.trace.csv").exists()


def test_config_errors(tmp_path, capsys):
    out = tmp_path / "none.csv"
    assert main(["simulate", "--p", "", "-o", str(out)]) == 1
    assert not out.exists()
    assert main(["simulate", "--code", "steane"]) == 1
    assert main(["simulate", "--p", "1.5", "--trials", "10"]) == 1
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["simulate", "--config", str(cfg)]) == 1
    assert "bogus" in capsys.readouterr().err
    with pytest.raises(ConfigError):
        load_config(None, {"rounds": -1})


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"code": "s17", "p": 0.001, "trials": 50}))
    c = load_config(str(cfg), {"trials": 60})
    assert c["code"] == ["s17"] and c["p"] == [0.001] and c["trials"] == 60


def test_module_entry_point(tmp_path):
    out = tmp_path / "t.csv"
    r = subprocess.run([sys.executable, "-m", "bsqec", "times", "--code", "bs13", "-o", str(out)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
    assert out.exists()
