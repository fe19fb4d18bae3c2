import json

import pytest

from l2alex.cli import dispatch, parse_matrix_file
from l2alex.diagram import TREFOIL_PD


@pytest.fixture
def trefoil_pd_file(tmp_path):
    path = tmp_path / "trefoil.pd"
    path.write_text(TREFOIL_PD.replace(" / ", "\n") + "\n")
    return str(path)


@pytest.fixture
def band_pres_file(tmp_path):
    path = tmp_path / "band.pres"
    path.write_text("gens: g h\nrels: g H\nmark meridian: g\nmark longitude: 1\n")
    return str(path)


def run(argv, capsys):
    code = dispatch(argv)
    out = capsys.readouterr().out
    return code, out


def test_wirtinger_command(trefoil_pd_file, tmp_path, capsys):
    out_file = str(tmp_path / "trefoil.pres")
    code, out = run(["wirtinger", trefoil_pd_file, "--out", out_file], capsys)
    assert code == 0
    assert "gens: a b c" in out
    assert "rels:" in out


def test_alexander_command_pd_and_pres(trefoil_pd_file, tmp_path, capsys):
    code, out = run(["alexander", trefoil_pd_file], capsys)
    assert code == 0
    assert "1 - t + t^2" in out
    pres = tmp_path / "trefoil.pres"
    dispatch(["wirtinger", trefoil_pd_file, "--out", str(pres)])
    capsys.readouterr()
    code, out = run(["alexander", str(pres)], capsys)
    assert code == 0
    assert "1 - t + t^2" in out


def test_l2_exact_command(capsys, tmp_path):
    json_path = str(tmp_path / "report.json")
    code, out = run(
        ["--json", json_path, "l2", "exact", "torus(2,7)", "--t", "2"], capsys
    )
    assert code == 0
    assert "value = 64" in out
    report = json.loads(open(json_path).read())
    assert report["schema"] == 1
    assert report["outputs"]["exponent"] == 6
    assert report["outputs"]["value"] == 64.0


def test_detect_unknot_command(capsys):
    code, out = run(["detect-unknot", "cable(-1,3,unknot)"], capsys)
    assert code == 0
    assert out.strip().endswith("true")
    code, out = run(["detect-unknot", "torus(2,3)"], capsys)
    assert code == 0
    assert out.strip().endswith("false")


def test_construct_commands(band_pres_file, tmp_path, capsys):
    code, out = run(["construct", "torus-pattern", "--p", "2", "--q", "3"], capsys)
    assert code == 0
    assert "gens: x y lam" in out
    code, out = run(
        ["construct", "sum", band_pres_file, band_pres_file], capsys
    )
    assert code == 0
    assert "gens: g h g2 h2" in out
    code, out = run(
        ["construct", "cable", "--p", "2", "--q", "3", band_pres_file], capsys
    )
    assert code == 0
    assert "x" in out and "lam" in out


def test_kb_command(band_pres_file, capsys):
    code, out = run(["kb", band_pres_file], capsys)
    assert code == 0
    assert "confluent" in out


def test_kb_command_failure_exit_code(tmp_path, capsys):
    path = tmp_path / "torus.pres"
    path.write_text("gens: x y\nrels: x x Y Y Y\n")
    code, out = run(["kb", str(path), "--max-rules", "40"], capsys)
    assert code == 3
    assert "partial" in out


def test_fk_command(tmp_path, capsys):
    path = tmp_path / "matrix.fk"
    path.write_text("oracle: abelian 1\nsize: 1 1\ngens: g\n1 1: 1 - 2 g\n")
    json_path = str(tmp_path / "fk.json")
    code, out = run(
        [
            "--json", json_path, "fk", str(path),
            "--method", "series", "--order", "64",
        ],
        capsys,
    )
    assert code == 0
    report = json.loads(open(json_path).read())
    fields = report["outputs"]
    assert set(fields) == {
        "log_value", "value", "method", "params", "tail_proxy",
        "sigma_min", "partial_oracle",
    }
    assert abs(fields["value"] - 2.0) / 2.0 <= 0.02
    code, out = run(
        ["fk", str(path), "--method", "ball", "--radius", "256"], capsys
    )
    assert code == 0


def test_l2_approx_unknot(band_pres_file, capsys):
    code, out = run(
        ["l2", "approx", band_pres_file, "--t", "2", "--method", "series",
         "--order", "16"],
        capsys,
    )
    assert code == 0
    assert "value = 1" in out
    assert "no-evidence-of-kernel" in out


def test_l2_approx_torus_oracle(tmp_path, capsys):
    path = tmp_path / "trefoil2gen.pres"
    path.write_text("gens: a b\nrels: a b a B A B\n")
    code, out = run(
        [
            "l2", "approx", str(path), "--t", "2", "--method", "ball",
            "--radius", "10", "--oracle", "torus", "--p", "2", "--q", "3",
            "--embed", "a = Y x; b = X y y",
        ],
        capsys,
    )
    assert code == 0
    value = float(out.split("value =")[1].split()[0])
    assert abs(value - 4.0) / 4.0 <= 0.15


def test_l2_approx_kb_failure_suggests_exact(tmp_path, capsys):
    path = tmp_path / "granny-ish.pres"
    path.write_text("gens: a b\nrels: a b a B A B\n")
    code = dispatch(["l2", "approx", str(path), "--t", "2", "--max-rules", "20"])
    assert code == 3


def test_tietze_script(tmp_path, band_pres_file, capsys):
    script = tmp_path / "moves.tz"
    script.write_text("Ia 1\n")
    code, out = run(["tietze", band_pres_file, "--script", str(script)], capsys)
    assert code == 0
    assert "normalized equal: True" in out


def test_tietze_random(trefoil_pd_file, tmp_path, capsys):
    pres = tmp_path / "trefoil.pres"
    dispatch(["wirtinger", trefoil_pd_file, "--out", str(pres)])
    capsys.readouterr()
    code, out = run(
        ["tietze", str(pres), "--random", "50", "--seed", "7"], capsys
    )
    assert code == 0
    assert "normalized equal: True" in out


def test_tietze_bad_script_exit_2(tmp_path, band_pres_file, capsys):
    script = tmp_path / "bad.tz"
    script.write_text("Ia 9\n")
    code, _ = run(["tietze", band_pres_file, "--script", str(script)], capsys)
    assert code == 2


def test_unknown_file_exit_2(capsys):
    code, _ = run(["alexander", "/nonexistent/file.pd"], capsys)
    assert code == 2


def test_unknown_subcommand_exit_2(capsys):
    assert dispatch(["frobnicate"]) == 2


def test_json_deterministic(tmp_path, trefoil_pd_file, capsys):
    # identical argv and inputs give byte-identical reports
    j = str(tmp_path / "report.json")
    dispatch(["--json", j, "alexander", trefoil_pd_file])
    first = open(j, "rb").read()
    dispatch(["--json", j, "alexander", trefoil_pd_file])
    capsys.readouterr()
    assert open(j, "rb").read() == first


def test_json_seed_changes_tietze_output(tmp_path, trefoil_pd_file, capsys):
    pres = tmp_path / "t.pres"
    dispatch(["wirtinger", trefoil_pd_file, "--out", str(pres)])
    j = str(tmp_path / "report.json")
    dispatch(["--json", j, "tietze", str(pres), "--random", "5", "--seed", "1"])
    first = open(j, "rb").read()
    dispatch(["--json", j, "tietze", str(pres), "--random", "5", "--seed", "1"])
    second = open(j, "rb").read()
    dispatch(["--json", j, "tietze", str(pres), "--random", "5", "--seed", "2"])
    third = open(j, "rb").read()
    capsys.readouterr()
    assert first == second
    assert json.loads(first)["outputs"] != json.loads(third)["outputs"]


def test_matrix_file_parsing():
    matrix, names = parse_matrix_file(
        "oracle: abelian 1\nsize: 2 2\ngens: g\n"
        "1 1: 1 - 2 g\n2 2: 0.5 + g G\n"
    )
    assert matrix.shape == (2, 2)
    assert matrix[0, 0].terms == {(): 1.0, (1,): -2.0}
    assert matrix[0, 1].terms == {}
    assert matrix[1, 1].terms == {(): 1.5}
    with pytest.raises(ValueError):
        parse_matrix_file("size: 1 1\n1 1: 1\n")


def test_fox_command(tmp_path, capsys):
    path = tmp_path / "trefoil2gen.pres"
    path.write_text("gens: a b\nrels: a b a B A B\n")
    code, out = run(["fox", str(path)], capsys)
    assert code == 0
    assert "d(r1)/d(a) = 1 + a b - a b a B A" in out
    code, out = run(
        ["fox", str(path), "--delete-row", "1", "--twist", "2.0"], capsys
    )
    assert code == 0
    assert "d(r1)/d(b)" in out
