import csv
import io
import json
import subprocess
import sys

import pytest

from gengraph.cli import main, run


def _json(argv):
    code, text, _ = run(argv)
    return code, json.loads(text)


def _scalars(doc, path=()):
    if isinstance(doc, dict):
        for k, v in doc.items():
            yield from _scalars(v, path + (k,))
    elif isinstance(doc, list) and any(isinstance(e, (dict, list)) for e in doc):
        for v in doc:
            yield from _scalars(v, path)
    else:
        yield path, doc


def test_analyze_sym4():
    code, doc = _json(["analyze", "--group", "Sym(4)"])
    assert code == 0
    assert doc["v_count"] == 20 and doc["isolated"] == 4
    assert doc["components"] == 1 and doc["diameters"] == [2]
    assert (doc["degree_min"], doc["degree_max"]) == (8, 16)
    assert (doc["t"], doc["bound"], doc["bound_ok"]) == (3, 2, True)


def test_analyze_sl2_4():
    _, doc = _json(["analyze", "--group", "SL2(4)"])
    assert doc["v_count"] == 59 and doc["diameters"] == [2] and doc["isolated"] == 1


def test_analyze_trivial_group():
    _, doc = _json(["analyze", "--group", "Cyc(1)"])
    assert doc["trivial"] and doc["order"] == 1


def test_text_is_a_rendering_of_json():
    _, doc = _json(["analyze", "--group", "Dih(4)"])
    _, text, _ = run(["analyze", "--group", "Dih(4)", "--format", "text"])
    lines = {line.strip() for line in text.splitlines()}
    for path, v in _scalars(doc):
        assert f"{path[-1]}: {json.dumps(v, sort_keys=True)}" in lines


def test_csv_corpus(tmp_path):
    corpus = tmp_path / "c.txt"
    corpus.write_text("# two groups\nSym(3)\nCyc(4)  # cyclic\n")
    code, text, _ = run(["analyze", "--corpus", str(corpus), "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and [r["group"] for r in rows] == ["Sym(3)", "Cyc(4)"]
    assert rows[0]["v_count"] == "5"


def test_export_dot_and_out_file(tmp_path, capsys):
    out = tmp_path / "g.dot"
    assert main(["export", "--group", "Sym(3)", "--format", "dot", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert out.read_text().count("--") == 9


def test_verify_swap_single_group():
    code, doc = _json(["verify", "--suite", "swap", "--group", "Sym(4)", "--workers", "1"])
    assert code == 0 and doc["ok"] and doc["results"][0]["status"] == "pass"


def test_tower_klein():
    code, doc = _json(["tower", "--family", "klein-cp3", "--primes", "3,5", "--samples", "500"])
    assert code == 0
    lv = doc["levels"]
    assert [x["density"] for x in lv] == ["1/2", "2/5"]
    assert doc["growth"]["t"] == [5, 8]


def test_tower_check_consistency():
    code, doc = _json(["tower", "--family", "klein-cp3", "--primes", "3", "--check", "v-consistency"])
    assert code == 0 and doc["v_consistency"]["ok"]


def test_tower_sl2_products():
    code, doc = _json(["tower", "--family", "sl2-products", "--levels", "1"])
    assert code == 0
    assert doc["levels"][0]["t"] == 19 and doc["levels"][0]["bound"] == 2**17


@pytest.mark.parametrize("argv,code", [
    (["analyze", "--group", "Sym(4"], 2),
    (["analyze", "--group", "Sym(9)"], 3),
    (["analyze", "--group", "Sym(4)", "--cap-order", "10"], 3),
    (["tower", "--family", "sl2-products", "--levels", "1", "--primes", "5"], 2),
    (["tower", "--family", "bogus"], 2),
    (["verify", "--suite", "nope"], 2),
    (["export", "--group", "Sym(3)", "--format", "csv"], 2),
    ([], 2),
    (["frobnicate"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "error" in json.loads(err[0])


def test_caps_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("GENGRAPH_CAPS", "order=10")
    assert main(["analyze", "--group", "Sym(4)"]) == 3


def test_caps_do_not_leak_between_runs(capsys):
    assert main(["analyze", "--group", "Sym(4)", "--cap-order", "10"]) == 3
    assert main(["analyze", "--group", "Sym(4)"]) == 0


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "gengraph.cli", "analyze", "--group", "Sym(3)"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["v_count"] == 5
