import json
import re
import subprocess
import sys

import pytest

from qcpm.cli import main

SQUARE = {
    "cluster": {
        "n": 2,
        "conductor": 4,
        "generators": [[["0", "-1"], ["1", "0"]], [["1", "0"], ["0", "-1"]]],
        "seeds": [["1", "0"]],
    },
    "radius": "5",
}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_presets_listing(capsys):
    code, out, _ = run(["presets"], capsys)
    assert code == 0
    assert "d10-penrose" in out and "k=5" in out


def test_generate_d10(tmp_path, capsys):
    code, out, _ = run(["generate", "--preset", "d10-penrose", "--radius", "20", "--shift-seed", "42",
                        "--format", "csv,json,svg", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "components: 4" in out
    for ext in ("csv", "json", "svg"):
        assert (tmp_path / f"patch.{ext}").exists()
    doc = json.loads((tmp_path / "patch.json").read_text())
    assert doc["header"]["kappa2"] == "5/2"
    assert doc["header"]["shift_seed"] == 42
    assert len(doc["points"]) == doc["header"]["points"]
    csv_lines = [l for l in (tmp_path / "patch.csv").read_text().splitlines() if not l.startswith("#")]
    assert csv_lines[0].startswith("m_1,m_2,m_3,m_4,m_5,phys_x,phys_y,int_1,int_2,component,margin")
    assert len(csv_lines) - 1 == doc["header"]["points"]
    svg = (tmp_path / "patch.svg").read_text()
    assert set(re.findall(r'class="(comp-\d+)"', svg)) == {"comp-1", "comp-2", "comp-3", "comp-4"}


def test_d8_single_glyph_class(tmp_path, capsys):
    code, out, _ = run(["render", "--preset", "d8", "--radius", "6", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert set(re.findall(r'class="(comp-[\w]+)"', (tmp_path / "patch.svg").read_text())) == {"comp-0"}


def test_render_windows(tmp_path, capsys):
    code, _, _ = run(["render", "--preset", "d10-penrose", "--radius", "2", "--what", "windows", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert (tmp_path / "windows.svg").read_text().count("<polygon") == 4


def test_empty_patch_svg():
    from qcpm.render import patch_svg, windows_svg
    from qcpm.patchgen import generate_patch
    from qcpm.presets import square_cluster
    from qcpm.superspace import decompose
    from qcpm.window import make_window
    import xml.dom.minidom

    dec = decompose(square_cluster())
    p = generate_patch(dec, make_window(dec, 0), 1)
    p.m, p.physical, p.component = p.m[:0], p.physical[:0], p.component[:0]
    xml.dom.minidom.parseString(patch_svg(p))
    xml.dom.minidom.parseString(windows_svg([]))


def test_determinism_and_parallel(tmp_path, capsys):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    base = ["generate", "--preset", "d12", "--radius", "41/2", "--shift-seed", "7", "--format", "csv,json"]
    assert run(base + ["--out", str(a)], capsys)[0] == 0
    assert run(base + ["--out", str(b)], capsys)[0] == 0
    assert run(base + ["--out", str(c), "--jobs", "4"], capsys)[0] == 0
    for name in ("patch.csv", "patch.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes()


def test_emit_config_round_trip(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    run(["generate", "--preset", "d10-penrose", "--radius", "10", "--shift-seed", "3", "--out", str(tmp_path / "one"),
         "--emit-config", str(cfg)], capsys)
    run(["generate", "--config", str(cfg), "--out", str(tmp_path / "two")], capsys)
    assert (tmp_path / "one" / "patch.csv").read_bytes() == (tmp_path / "two" / "patch.csv").read_bytes()


def test_square_custom_config(tmp_path, capsys):
    cfg = tmp_path / "square.json"
    cfg.write_text(json.dumps(SQUARE))
    code, out, _ = run(["generate", "--config", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "classification: Discrete" in out
    assert "points: 81" in out


def test_config_errors(tmp_path, capsys):
    assert run(["generate", "--radius", "5"], capsys)[0] == 2
    assert run(["generate", "--preset", "d8", "--radius", "-3"], capsys)[0] == 2
    assert run(["generate", "--preset", "d8", "--radius", "3", "--epsilon", "0.1"], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"cluster": {"preset": "nope"}, "radius": "3"}))
    assert run(["generate", "--config", str(bad)], capsys)[0] == 2
    broken = dict(SQUARE, cluster=dict(SQUARE["cluster"], generators=[[["2", "0"], ["0", "1"]]]))
    bad.write_text(json.dumps(broken))
    code, _, err = run(["generate", "--config", str(bad)], capsys)
    assert code == 2 and "orthogonal" in err
    with pytest.raises(SystemExit):
        main(["generate", "--preset", "unknown", "--radius", "3"])


def test_boundary_exit_code(tmp_path, capsys):
    code, _, err = run(["generate", "--preset", "d10-penrose", "--radius", "20", "--epsilon", "9e-4",
                        "--out", str(tmp_path)], capsys)
    assert code == 3
    assert "shift-seed" in err


def test_resource_exit_code(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QCPM_NODE_LIMIT", "10")
    assert run(["generate", "--preset", "d10-penrose", "--radius", "20", "--out", str(tmp_path)], capsys)[0] == 4


def test_analyze_checks_patch_hash(tmp_path, capsys):
    run(["generate", "--preset", "d10-penrose", "--radius", "12", "--shift-seed", "1", "--out", str(tmp_path)], capsys)
    patch = str(tmp_path / "patch.json")
    code, out, _ = run(["analyze", "--preset", "d10-penrose", "--radius", "12", "--shift-seed", "1", "--patch", patch,
                        "--analyze", "delone", "--analyze", "occupation", "--out", str(tmp_path)], capsys)
    assert code == 0 and "r_pack" in out
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["occupation"]["mean_fraction"] < 1
    code, _, err = run(["analyze", "--preset", "d10-penrose", "--radius", "12", "--shift-seed", "2", "--patch", patch,
                        "--out", str(tmp_path)], capsys)
    assert code == 2 and "config" in err


def test_diffract_command(tmp_path, capsys):
    code, out, _ = run(["diffract", "--preset", "d10-penrose", "--radius", "8", "--resolution", "21", "--out", str(tmp_path)], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "diffraction.json").read_text())
    assert len(doc["intensity"]) == 21
    assert (tmp_path / "diffraction.svg").exists()


def test_decompose_command(capsys):
    code, out, _ = run(["decompose", "--preset", "d10-penrose"], capsys)
    assert code == 0
    assert "kappa^2=5/2" in out and "1/5" in out
    code, out, _ = run(["decompose", "--preset", "d12", "--json"], capsys)
    assert json.loads(out)["dims"] == [2, 2, 2]


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "qcpm", "presets"], capture_output=True, text=True)
    assert res.returncode == 0 and "icosahedral" in res.stdout
