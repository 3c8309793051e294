import csv
import json

import pytest

from a2lab.cli import main


@pytest.fixture(scope="module")
def ball_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("balls") / "r3.json"
    assert main(["build", "--radius", "3", "--out", str(path)]) == 0
    return path


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_build_radius_zero(tmp_path, capsys):
    out = tmp_path / "b0.json"
    assert main(["build", "--radius", "0", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["vertices"]) == 1
    assert "vertices 1 " in capsys.readouterr().out


def test_build_radius_one(tmp_path):
    out = tmp_path / "b1.json"
    assert main(["build", "--radius", "1", "--out", str(out)]) == 0
    assert len(json.loads(out.read_text())["vertices"]) == 15


def test_build_corrupt_presentation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["build", "--presentation", str(bad), "--radius", "1", "--out", str(tmp_path / "x.json")]) == 2
    assert not (tmp_path / "x.json").exists()


def test_build_negative_radius(tmp_path):
    assert main(["build", "--radius", "-1", "--out", str(tmp_path / "x.json")]) == 2


def test_usage_error():
    assert main(["frobnicate"]) == 2


def test_verify_links(ball_file, tmp_path):
    report = tmp_path / "links.json"
    assert main(["verify", "--ball", str(ball_file), "--suite", "links", "--report", str(report)]) == 0
    data = json.loads(report.read_text())
    assert data["passed"] and data["suites"][0]["failed"] == 0


def test_verify_is_deterministic(ball_file, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["verify", "--ball", str(ball_file), "--suite", "diamonds,tree", "--report", str(path)]) == 0
    assert a.read_text() == b.read_text()


def test_verify_parallel_matches_serial(ball_file, tmp_path, monkeypatch):
    serial, par = tmp_path / "s.json", tmp_path / "p.json"
    args = ["verify", "--ball", str(ball_file), "--suite", "links,tree"]
    assert main(args + ["--report", str(serial)]) == 0
    monkeypatch.setenv("A2LAB_THREADS", "2")
    assert main(args + ["--report", str(par)]) == 0
    assert serial.read_text() == par.read_text()


def test_bad_thread_cap(ball_file, monkeypatch):
    monkeypatch.setenv("A2LAB_THREADS", "many")
    assert main(["verify", "--ball", str(ball_file), "--suite", "links"]) == 2


def test_verify_unknown_suite(ball_file):
    assert main(["verify", "--ball", str(ball_file), "--suite", "nope"]) == 2


def test_verify_missing_ball(tmp_path):
    assert main(["verify", "--ball", str(tmp_path / "none.json"), "--suite", "links"]) == 2


def test_verify_detects_removed_edge(ball_file, tmp_path):
    data = json.loads(ball_file.read_text())
    edge = data["edges"].pop(0)
    data["triangles"] = [t for t in data["triangles"] if not set(edge) <= set(t)]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    report = tmp_path / "r.json"
    assert main(["verify", "--ball", str(bad), "--suite", "measures", "--report", str(report)]) == 1
    suite = json.loads(report.read_text())["suites"][0]
    assert suite["failed"] > 0 and suite["witnesses"]


def test_verify_inconsistent_ball_is_input_error(ball_file, tmp_path):
    data = json.loads(ball_file.read_text())
    data["edges"].pop(0)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["verify", "--ball", str(bad), "--suite", "links"]) == 2


def test_harmonic_depth_zero(ball_file, tmp_path):
    out = tmp_path / "h0.csv"
    assert main(["measure", "--ball", str(ball_file), "--table", "harmonic", "--depth", "0", "--csv", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 2 and rows[1][-1] == "1"


def test_harmonic_neighbours(ball_file, tmp_path):
    out = tmp_path / "h1.csv"
    assert main(["measure", "--ball", str(ball_file), "--table", "harmonic", "--depth", "1", "--csv", str(out)]) == 0
    rows = read_csv(out)[1:]
    assert len(rows) == 15
    assert all(r[3] == "1/7" for r in rows if (r[1], r[2]) in {("1", "0"), ("0", "1")})


def test_measure_depth_violation(ball_file):
    assert main(["measure", "--ball", str(ball_file), "--table", "harmonic", "--depth", "9"]) == 2
    assert main(["measure", "--ball", str(ball_file), "--table", "rn", "--depth", "3"]) == 2


def test_shadow_table(ball_file, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["measure", "--ball", str(ball_file), "--table", "shadows", "--csv", str(out)]) == 0
    rows = {(r[0], r[1]): r for r in read_csv(out)[1:]}
    assert rows[("0", "1")][5] == "3/4"
    assert rows[("1", "1")][5] == "3/4"
    assert rows[("1", "0")][6] == "0"


def test_projectivity_table(ball_file, tmp_path):
    out = tmp_path / "p.csv"
    assert main(["measure", "--ball", str(ball_file), "--table", "projectivity", "--csv", str(out)]) == 0
    rows = read_csv(out)[1:]
    assert len(rows) == 7
    assert all(r[2] == "6" and r[3] == "6" for r in rows)


@pytest.mark.slow
def test_rn_table(ball_file, tmp_path):
    out = tmp_path / "rn.csv"
    assert main(["measure", "--ball", str(ball_file), "--table", "rn", "--csv", str(out)]) == 0
    header, *rows = read_csv(out)
    lhs, inv = header.index("lhs"), header.index("q^(-2l(h))")
    assert rows and all(r[lhs] == r[inv] for r in rows)
