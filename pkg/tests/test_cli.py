from __future__ import annotations

import json

import pytest

from crossmag import cli
from crossmag.verify import TriangleReport

SPECTRUM_HEADER = "sigma_over_omega_b,sigma_rad_s,absorption,node_error"
DELAY_HEADER = "sigma_over_omega_b,sigma_rad_s,re_T_p,im_T_p,intensity,tau_g_seconds,singular_flag"


def run(*argv):
    return cli.main(list(argv))


def payload(path):
    """CSV body without the leading comment line."""
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# crossmag csv v1; manifest=")
    return lines[1:]


def test_steady_prints_json(capsys):
    assert run("steady") == 0
    data = json.loads(capsys.readouterr().out)
    assert data["mode"] == "pinned"
    assert set(data["steady_state"]["m_s"]) == {"re", "im"}
    assert data["rates"]["kappa_x"]["over_omega_b"] == pytest.approx(0.14)
    assert data["steady_state"]["abs_g_eff_over_omega_b"] == pytest.approx(0.554, abs=1e-3)


def test_steady_override(capsys):
    assert run("steady", "--gmb-override", "0.32") == 0
    data = json.loads(capsys.readouterr().out)
    assert data["steady_state"]["abs_g_eff_over_omega_b"] == pytest.approx(0.32)


def test_single_probe_spectrum_is_phase_blind(tmp_path):
    assert run("spectrum", "--xi", "0", "--phi", "0", "--out", str(tmp_path / "a")) == 0
    assert run("spectrum", "--xi", "0", "--phi", "3.14159", "--out", str(tmp_path / "b")) == 0
    a, b = payload(tmp_path / "a" / "spectrum.csv"), payload(tmp_path / "b" / "spectrum.csv")
    assert a == b
    assert a[0] == SPECTRUM_HEADER
    assert len(a) == 2002


def test_spectrum_manifest_and_svg(tmp_path):
    assert run("spectrum", "--out", str(tmp_path), "--svg", "--refine", "--axis", "sigma:-1:1:201") == 0
    manifest = json.loads((tmp_path / "spectrum.manifest.json").read_text())
    assert manifest["outputs"] == ["spectrum.csv", "spectrum.svg"]
    assert manifest["config"]["frequency_units"] == "rad/s"
    assert manifest["summary"]["refined"] is True
    assert (tmp_path / "spectrum.svg").read_text().lstrip().startswith("<?xml")


def test_delay_columns(tmp_path):
    assert run("delay", "--xi", "1", "--phi", "3.14159", "--out", str(tmp_path), "--axis", "sigma:-1:1:11") == 0
    body = payload(tmp_path / "delay.csv")
    assert body[0] == DELAY_HEADER
    assert len(body) == 12


def test_delay_flags_transmission_zero(tmp_path):
    config = tmp_path / "c.toml"
    config.write_text("[couplings]\ngamma_1 = 0.0\n")
    assert run("delay", "--config", str(config), "--out", str(tmp_path), "--axis", "sigma:-1:1:3") == 0
    rows = [r.split(",") for r in payload(tmp_path / "delay.csv")[1:]]
    assert [r[-1] for r in rows] == ["0", "1", "0"]
    assert rows[1][5] == "nan"


def test_sweep2d_layouts(tmp_path):
    args = ("sweep2d", "--axis1", "phi:0:6.283185307179586:5", "--axis2", "xi:0:2:3")
    assert run(*args, "--layout", "long", "--out", str(tmp_path / "l")) == 0
    assert run(*args, "--layout", "matrix", "--out", str(tmp_path / "m")) == 0
    long_rows = payload(tmp_path / "l" / "sweep2d.csv")
    matrix_rows = payload(tmp_path / "m" / "sweep2d.csv")
    assert long_rows[0] == "phi,xi,absorption,node_error"
    assert len(long_rows) == 1 + 15
    assert matrix_rows[0] == "phi\\xi,0.0,1.0,2.0"
    assert len(matrix_rows) == 1 + 5


def test_json_format(tmp_path):
    assert run("spectrum", "--format", "json", "--axis", "xi:0:1:3", "--out", str(tmp_path)) == 0
    data = json.loads((tmp_path / "spectrum.json").read_text())
    assert data["columns"] == ["xi", "absorption", "node_error"]
    assert len(data["rows"]) == 3


def test_figure_rerun_is_byte_identical(tmp_path):
    assert run("fig", "2b", "--out", str(tmp_path / "a")) == 0
    assert run("fig", "2b", "--out", str(tmp_path / "b")) == 0
    for name in ("fig_2b.csv", "fig_2b.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert payload(tmp_path / "a" / "fig_2b.csv")[0] == "curve,sigma_over_omega_b,sigma_rad_s,absorption"


@pytest.mark.parametrize("fig_id", ["6a", "8c", "9"])
def test_other_figures(tmp_path, fig_id):
    assert run("fig", fig_id, "--out", str(tmp_path)) == 0
    assert (tmp_path / f"fig_{fig_id}.svg").exists()


def test_verify_passes(capsys):
    assert run("verify", "--draws", "20", "--seed", "7") == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_verify_breach_has_its_own_exit_code(monkeypatch, capsys):
    import crossmag.verify

    monkeypatch.setattr(crossmag.verify, "oracle_triangle", lambda *a: TriangleReport(1, 1, 7, 1e-3, 0.0))
    assert run("verify", "--draws", "1") == cli.EXIT_VERIFICATION
    assert json.loads(capsys.readouterr().out)["passed"] is False


def test_usage_errors(capsys):
    assert run() == cli.EXIT_USAGE
    assert run("bogus") == cli.EXIT_USAGE
    assert run("spectrum", "--nope") == cli.EXIT_USAGE
    assert run("fig", "10") == cli.EXIT_USAGE


def test_validation_errors(tmp_path, capsys):
    assert run("spectrum", "--xi", "-1", "--out", str(tmp_path)) == cli.EXIT_VALIDATION
    assert run("spectrum", "--axis", "sigma:1:0:5", "--out", str(tmp_path)) == cli.EXIT_VALIDATION
    config = tmp_path / "bad.toml"
    config.write_text("[damping]\nkappa_x = -1.0\n")
    assert run("steady", "--config", str(config)) == cli.EXIT_VALIDATION
    assert "damping.kappa_x" in capsys.readouterr().err
    # the default sphere has no attracting Kerr fixed point
    assert run("steady", "--mode", "selfconsistent") == cli.EXIT_VALIDATION


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert run("spectrum", "--out", str(blocker / "sub")) == cli.EXIT_VALIDATION
