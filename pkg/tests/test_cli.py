import csv
import json
import textwrap
from pathlib import Path

import numpy as np
import pytest

from finitepsido.cli import SWEEP_COLUMNS, main
from finitepsido.config import ConfigError, load_config, parse_config
from finitepsido.csvio import read_signal_csv, read_symbol_csv, write_signal_csv, write_symbol_csv
from finitepsido.group import Group
from finitepsido.psido import Symbol
from finitepsido.transforms import Signal


def write(path, text):
    path.write_text(textwrap.dedent(text))
    return path


WIENER = """
kind = "wiener"
seed = 2
[group]
moduli = [12]
[lattice]
pos_steps = [2]
freq_steps = [2]
[weight]
type = "polynomial"
s = {s}
[symbol]
type = "random"
scale = 0.1
plus_identity = true
count = 1
"""


def report(cfg_path):
    return json.loads((cfg_path.parent / (cfg_path.stem + "_out") / "report.json").read_text())


def test_identities_run(tmp_path, capsys):
    p = write(tmp_path / "id.toml", """
        kind = "identities"
        [group]
        moduli = [8]
        [output]
        seeds = 10
    """)
    assert main(["run", str(p)]) == 0
    r = report(p)
    assert r["schema_version"] == "1.0" and r["passed"]
    assert all(a["value"] < 1e-10 for a in r["assertions"])


def test_wiener_identity_symbol(tmp_path):
    p = write(tmp_path / "w.toml", """
        kind = "wiener"
        [group]
        moduli = [12]
        [lattice]
        pos_steps = [2]
        freq_steps = [2]
    """)
    assert main(["run", str(p)]) == 0
    sym = report(p)["results"]["symbols"][0]
    assert abs(sym["sjostrand_norm_sigma"] - sym["sjostrand_norm_tau"]) < 1e-12
    rows = list(csv.reader(open(tmp_path / "w_out" / "envelopes.csv")))
    assert rows[0] == ["symbol", "envelope", "index", "coords", "value", "weight"]
    assert len(rows) == 1 + 2 * 36


def test_undersampled_frames_is_expected_negative(tmp_path, capsys):
    p = write(tmp_path / "f.toml", """
        kind = "frames"
        [group]
        moduli = [12]
        [lattice]
        pos_steps = [4]
        freq_steps = [4]
    """)
    assert main(["run", str(p)]) == 0
    r = report(p)
    assert r["results"]["frame"]["is_frame"] is False
    assert r["assertions"][0]["expected_negative"]
    assert any("skipped" in n for n in r["notices"])


def test_frames_tight(tmp_path):
    p = write(tmp_path / "f.toml", """
        kind = "frames"
        [group]
        moduli = [12]
        [lattice]
        pos_steps = [2]
        freq_steps = [3]
        [window]
        type = "random"
        [symbol]
        type = "random"
        count = 2
    """)
    assert main(["run", str(p)]) == 0
    r = report(p)
    assert abs(r["results"]["tight_frame"]["A"] - 1) < 1e-10


def test_almost_diag_and_section6(tmp_path):
    p = write(tmp_path / "a.toml", """
        kind = "almost-diag"
        [group]
        moduli = [12]
        [lattice]
        pos_steps = [2]
        freq_steps = [2]
        [weight]
        type = "subexponential"
        a = 0.5
        b = 0.5
        [symbol]
        type = "random"
        count = 2
        [output]
        save_symbols = true
        save_window = true
    """)
    assert main(["run", str(p)]) == 0
    out = tmp_path / "a_out"
    G = Group((12,))
    assert read_symbol_csv(out / "symbol_1.csv", G).data.shape == (12, 12)
    assert abs(read_signal_csv(out / "window.csv", G).norm() - 1) < 1e-12
    q = write(tmp_path / "s.toml", """
        kind = "section6"
        [group]
        moduli = [16]
        [weight]
        type = "polynomial"
        s = 2
        [symbol]
        type = "random"
        count = 3
    """)
    assert main(["run", str(q)]) == 0


def test_determinism(tmp_path):
    p = write(tmp_path / "w.toml", WIENER.format(s=1))
    main(["run", str(p)])
    a = report(p)
    main(["run", str(p)])
    b = report(p)
    a.pop("timestamp"), b.pop("timestamp")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_failing_assertion_exit_status(tmp_path):
    p = write(tmp_path / "w.toml", WIENER.format(s=1) + "[tolerances]\ninverse = 1e-30\n")
    assert main(["run", str(p)]) == 1
    assert report(p)["passed"] is False


def test_singular_symbol_aborts(tmp_path):
    (tmp_path / "z.csv").write_text("x,xi,re,im\n")
    p = write(tmp_path / "w.toml", """
        kind = "wiener"
        [group]
        moduli = [4]
        [lattice]
        pos_steps = [1]
        freq_steps = [1]
        [symbol]
        type = "csv"
        path = "z.csv"
    """)
    assert main(["run", str(p)]) == 3
    assert report(p)["status"] == "aborted"


@pytest.mark.parametrize("body,msg", [
    ('kind = "nope"\n[group]\nmoduli = [4]\n', "kind"),
    ('kind = "frames"\n[group]\nmoduli = [12]\n', "lattice"),
    ('kind = "frames"\n[group]\nmoduli = [12]\n[lattice]\npos_steps = [5]\nfreq_steps = [1]\n', "divide"),
    ('kind = "section6"\n[group]\nmoduli = [2, 3]\n', "single"),
    ('kind = "identities"\n[group]\nmoduli = [4]\n[weight]\ntype = "polynomial"\ns = -1\n', ">= 0"),
    ('kind = "identities"\n[group]\nmoduli = [4]\n[weight]\ntype = "subexponential"\nb = 2\n', "0 < b < 1"),
    ('kind = "identities"\n[group]\nmoduli = [4]\nextra = 1\n', "unknown"),
    ('kind = "identities"\n[group]\nmoduli = [4]\n[window]\ntype = "csv"\npath = "missing.csv"\n', "not found"),
])
def test_invalid_configs(tmp_path, body, msg, capsys):
    p = tmp_path / "bad.toml"
    p.write_text(body)
    with pytest.raises(ConfigError, match=msg):
        load_config(p)
    assert main(["validate", str(p)]) == 2
    assert main(["run", str(p)]) == 2
    assert not (tmp_path / "bad_out").exists()


def test_zero_window_rejected(tmp_path):
    (tmp_path / "g.csv").write_text("index,re,im\n0,0,0\n")
    p = write(tmp_path / "w.toml", """
        kind = "frames"
        [group]
        moduli = [4]
        [lattice]
        pos_steps = [1]
        freq_steps = [1]
        [window]
        type = "csv"
        path = "g.csv"
    """)
    assert main(["validate", str(p)]) == 2


def test_sweep(tmp_path):
    d = tmp_path / "sw"
    d.mkdir()
    for s in (0, 1, 2):
        write(d / f"w{s}.toml", WIENER.format(s=s))
    assert main(["sweep", str(d), "--jobs", "2"]) == 0
    rows = list(csv.DictReader(open(d / "sweep.csv")))
    assert len(rows) == 3
    norms = [float(r["sjostrand_sigma"]) for r in rows]
    assert norms == sorted(norms)


def test_sweep_redundancy_columns(tmp_path):
    d = tmp_path / "fr"
    d.mkdir()
    for i, (a, b) in enumerate([(2, 6), (2, 3), (1, 3)]):
        write(d / f"f{i}.toml", f"""
            kind = "frames"
            [group]
            moduli = [12]
            [lattice]
            pos_steps = [{a}]
            freq_steps = [{b}]
        """)
    assert main(["sweep", str(d)]) == 0
    rows = list(csv.DictReader(open(d / "sweep.csv")))
    assert [float(r["redundancy"]) for r in rows] == [1.0, 2.0, 4.0]
    assert all(r["frame_A"] and r["frame_B"] for r in rows)


def test_sweep_empty_and_mixed(tmp_path):
    e = tmp_path / "empty"
    e.mkdir()
    assert main(["sweep", str(e)]) == 0
    assert (e / "sweep.csv").read_text().strip() == ",".join(SWEEP_COLUMNS)
    m = tmp_path / "mixed"
    m.mkdir()
    write(m / "a.toml", WIENER.format(s=0))
    write(m / "b.toml", 'kind = "identities"\n[group]\nmoduli = [4]\n')
    assert main(["sweep", str(m)]) == 2


def test_csv_roundtrip(tmp_path):
    G = Group((2, 3))
    rng = np.random.default_rng(0)
    f = Signal.random(G, rng)
    write_signal_csv(tmp_path / "f.csv", f)
    assert np.array_equal(read_signal_csv(tmp_path / "f.csv", G).data, f.data)
    s = Symbol.random(G, rng)
    write_symbol_csv(tmp_path / "s.csv", s)
    assert np.array_equal(read_symbol_csv(tmp_path / "s.csv", G).data, s.data)
    with pytest.raises(ValueError):
        read_signal_csv(tmp_path / "f.csv", Group((4,)))


def test_parse_defaults():
    cfg = parse_config({"kind": "identities", "group": {"moduli": [4]}})
    assert cfg.tolerances["identity"] == 1e-10
    assert cfg.window["type"] == "gaussian"


SHIPPED = sorted((Path(__file__).resolve().parents[1] / "configs").rglob("*.toml"))


@pytest.mark.parametrize("path", SHIPPED, ids=lambda p: p.name)
def test_shipped_configs_validate(path):
    assert main(["validate", str(path)]) == 0
