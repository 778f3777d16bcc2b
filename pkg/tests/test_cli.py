import csv

import pytest

from mcdcsk.cli import main
from mcdcsk.figures import RECIPES, emit_figure


def _table(path):
    with open(path) as fh:
        body = [line for line in fh if not line.startswith("#")]
    return list(csv.reader(body))


def test_plan_prints_beta(capsys):
    assert main(["plan", "--m", "16", "--tb", "400", "--bw", "1"]) == 0
    out = capsys.readouterr().out
    assert "beta=20" in out
    assert out.strip().splitlines()[-1].startswith("16,")


def test_plan_infeasible_band_exit_code(capsys):
    assert main(["plan", "--m", "64", "--tb", "4", "--bw", "1"]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_dbr_table(capsys):
    assert main(["dbr", "--m", "2", "3"]) == 0
    lines = capsys.readouterr().out.split()
    assert lines[0] == "M,dbr,reference_share"
    assert lines[1] == "2,0.5,0.5"


def test_simulate_writes_csv(tmp_path):
    out = tmp_path / "sim.csv"
    rc = main(["simulate", "--m", "4", "--beta", "10", "--ebno-start", "2", "--ebno-stop", "3",
               "--max-bits", "3000", "--min-errors", "20", "--analytic", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.startswith("# recipe: simulate")
    rows = _table(out)
    assert rows[0][:4] == ["ebno_db", "errors", "bits", "ber"]
    assert len(rows) == 3 and rows[1][-1] == "awgn_high_sf"


def test_simulate_with_config_and_profile(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("M: 2\nbeta: 40\nebno_db: [10]\nmin_errors: 10\nmax_bits: 2000\nseed: 3\n")
    prof = tmp_path / "prof.yaml"
    prof.write_text("fading: rayleigh\npaths:\n  - {gain: 0.5, delay: 0}\n  - {gain: 0.5, delay: 2}\n")
    out = tmp_path / "o.csv"
    assert main(["simulate", "--config", str(cfg), "--profile", str(prof), "--analytic", "--out", str(out)]) == 0
    assert _table(out)[1][-1] == "rayleigh_integral"


def test_simulate_noiseless_debug(capsys):
    assert main(["simulate", "--m", "8", "--beta", "8", "--ebno-start", "0", "--max-bits", "700",
                 "--min-errors", "1", "--noiseless"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1].split(",")
    assert last[1] == "0" and last[2] == "700"


def test_analyze_methods(tmp_path, capsys):
    assert main(["analyze", "--m", "16", "--beta", "20", "--ebno-start", "5", "--ebno-stop", "6"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "ebno_db,ber,method,M,beta,profile_id"
    assert out[1].split(",")[2] == "awgn_high_sf"
    path = tmp_path / "a.csv"
    assert main(["analyze", "--m", "64", "--beta", "5", "--ebno-start", "5", "--hist-samples", "200000",
                 "--out", str(path)]) == 0
    assert _table(path)[1][2] == "awgn_low_sf"


def test_energy_hist_cli(tmp_path):
    path = tmp_path / "h.csv"
    assert main(["energy-hist", "--beta", "10", "--samples", "100000", "--out", str(path)]) == 0
    rows = _table(path)
    assert rows[0] == ["bin_center", "probability"]
    assert len(rows) == 101


def test_missing_m_is_config_error(capsys):
    assert main(["analyze", "--beta", "5"]) == 2


def test_recipes_have_cli_names():
    assert set(RECIPES) == {"dbr", "energy-histogram", "awgn", "dcsk-vs-mc", "beta-sweep",
                            "rayleigh-l2", "rayleigh-l3", "delay-sweep"}


@pytest.mark.parametrize("name,kw", [
    ("dbr", {}),
    ("energy-histogram", {"n_samples": 100_000}),
    ("awgn", {"max_bits": 2000, "min_errors": 20, "ebno": (5, 6)}),
    ("dcsk-vs-mc", {"max_bits": 2000, "min_errors": 20, "ebno": (5,)}),
    ("beta-sweep", {"max_bits": 2000, "min_errors": 20, "betas": (2, 10)}),
    ("rayleigh-l2", {"max_bits": 2000, "min_errors": 20, "ebno": (10,)}),
    ("rayleigh-l3", {"max_bits": 2000, "min_errors": 20, "ebno": (10,)}),
    ("delay-sweep", {"max_bits": 2000, "min_errors": 20, "tau2": (1, 40)}),
])
def test_figure_recipes_small_budget(tmp_path, name, kw):
    if name == "awgn":
        # keep the low-SF histogram cheap
        import mcdcsk.figures as fig
        orig = fig.awgn_analytic
        fig.awgn_analytic = lambda M, beta, seed=0: orig(M, beta, hist_samples=100_000, seed=seed)
        try:
            paths = emit_figure(name, tmp_path, **kw)
        finally:
            fig.awgn_analytic = orig
    else:
        paths = emit_figure(name, tmp_path, **kw)
    for p in paths:
        text = p.read_text()
        assert text.startswith(f"# recipe: {name}")
        assert "spec_hash:" in text and "version: mcdcsk" in text
        assert len(_table(p)) >= 2


def test_figure_cli(tmp_path, capsys):
    assert main(["figure", "dbr", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "dbr.csv").exists()
