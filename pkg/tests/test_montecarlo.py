import numpy as np
import pytest

from mcdcsk import analysis as an
from mcdcsk.channel import ChannelProfile
from mcdcsk.frame import ConfigurationError, SystemConfig
from mcdcsk.montecarlo import RunSpec, McPoint, run_monte_carlo, simulate_block, sweep_beta, sweep_delay, block_rng


def test_noiseless_runs_error_free():
    spec = RunSpec(SystemConfig(8, 10), ebno_db=(0.0,), min_errors=1, max_bits=50_000, noiseless=True)
    p = run_monte_carlo(spec).points[0]
    assert p.errors == 0 and p.bits == 50_000


def test_noiseless_multipath_small_delay_still_decodes():
    # short delays only scale the reference/data correlation by the path energy
    prof = ChannelProfile.rayleigh([0.5, 0.5], [0, 1])
    flags = simulate_block(SystemConfig(4, 200), prof, 500, block_rng(3, 0, 0))
    assert flags.mean() < 0.02


def test_results_independent_of_worker_count():
    base = dict(config=SystemConfig(4, 16), ebno_db=(4.0, 6.0), min_errors=300, max_bits=400_000, master_seed=11)
    a = run_monte_carlo(RunSpec(**base, workers=1)).points
    b = run_monte_carlo(RunSpec(**base, workers=3)).points
    assert [(p.errors, p.bits) for p in a] == [(p.errors, p.bits) for p in b]


def test_seed_changes_results():
    base = dict(config=SystemConfig(4, 16), ebno_db=(4.0,), min_errors=300, max_bits=400_000)
    a = run_monte_carlo(RunSpec(**base, master_seed=1)).points[0]
    b = run_monte_carlo(RunSpec(**base, master_seed=2)).points[0]
    assert (a.errors, a.bits) != (b.errors, b.bits)


def test_stopping_rule_on_errors():
    spec = RunSpec(SystemConfig(16, 20), ebno_db=(2.0,), min_errors=250, max_bits=10_000_000)
    p = run_monte_carlo(spec).points[0]
    assert p.errors >= 250
    # stopped at the end of the first frame reaching the target
    assert p.errors < 250 + spec.config.bits_per_frame
    assert p.bits % spec.config.bits_per_frame == 0


def test_stopping_rule_on_budget():
    spec = RunSpec(SystemConfig(16, 20), ebno_db=(20.0,), min_errors=1000, max_bits=12_345)
    p = run_monte_carlo(spec).points[0]
    assert p.bits == 12_345 and p.errors < 1000


def test_wilson_interval_contains_estimate():
    p = McPoint(10.0, 50, 10_000)
    lo, hi = p.ci
    assert lo < p.ber < hi
    assert McPoint(10.0, 0, 1000).ci[0] == 0.0


def test_more_subcarriers_help_at_fixed_beta():
    spec = dict(ebno_db=(10.0,), min_errors=400, max_bits=5_000_000)
    b64 = run_monte_carlo(RunSpec(SystemConfig(64, 5), **spec)).points[0]
    b2 = run_monte_carlo(RunSpec(SystemConfig(2, 5), **spec)).points[0]
    assert b64.ci[1] < b2.ci[0]


def test_simulator_agrees_with_independent_noise_form():
    # each row carries its own N0/2 noise, so both signal-noise cross terms appear
    spec = RunSpec(SystemConfig(16, 40), ebno_db=(6.0, 8.0), min_errors=2000, max_bits=5_000_000)
    for p in run_monte_carlo(spec).points:
        ref = an.ber_awgn_high_sf(p.ebno_db, 16, 40, cross_term_factor=2)
        assert abs(np.log10(p.ber / ref)) < 0.06


def test_rayleigh_simulation_tracks_integral():
    prof = ChannelProfile.rayleigh([0.5, 0.5], [0, 2])
    spec = RunSpec(SystemConfig(2, 80), profile=prof, ebno_db=(10.0,), min_errors=1000, max_bits=5_000_000)
    p = run_monte_carlo(spec).points[0]
    assert abs(np.log10(p.ber / an.ber_rayleigh(10.0, 2, 80, prof))) < 0.2


def test_sweep_beta_reports_argmin():
    tmpl = RunSpec(SystemConfig(2, 1), min_errors=200, max_bits=300_000)
    res = sweep_beta(tmpl, [1, 4, 200], 8.0)
    assert res.values == [1, 4, 200] and len(res.points) == 3
    assert res.argmin in (1, 4, 200)
    assert res.points[2].ber > res.points[1].ber  # large beta is noise-dominated


def test_sweep_delay_rejects_zero_delay():
    tmpl = RunSpec(SystemConfig(8, 40), min_errors=10, max_bits=1000)
    with pytest.raises(ConfigurationError):
        sweep_delay(tmpl, [0])


def test_large_delay_spread_degrades_performance():
    tmpl = RunSpec(SystemConfig(16, 40), min_errors=600, max_bits=3_000_000, master_seed=5)
    res = sweep_delay(tmpl, [1, 30], ebno_db=15.0,
                      analytic=lambda prof: an.ber_rayleigh(15.0, 16, 40, prof))
    short, long_ = res.points
    assert long_.ber > 1.5 * short.ber
    assert res.analytic[0] == pytest.approx(res.analytic[1])


@pytest.mark.parametrize("kw", [dict(min_errors=0), dict(max_bits=5, min_errors=10), dict(workers=0),
                                dict(ebno_db=()), dict(ebno_db=(5.0, 3.0))])
def test_runspec_validation(kw):
    with pytest.raises(ConfigurationError):
        RunSpec(SystemConfig(2, 10), **kw)


def test_noise_level_matches_mean_bit_energy():
    spec = RunSpec(SystemConfig(4, 30))
    assert spec.noise_level(0.0) == pytest.approx(40.0)
    assert spec.noise_level(10.0) == pytest.approx(4.0)


def test_csv_output(tmp_path):
    spec = RunSpec(SystemConfig(4, 10), ebno_db=(3.0,), min_errors=50, max_bits=10_000)
    curve = run_monte_carlo(spec, analytic=lambda e: (0.1, "x"))
    path = tmp_path / "c.csv"
    curve.to_csv(path, ["recipe: t"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# recipe: t"
    assert lines[1] == "ebno_db,errors,bits,ber,ci_low,ci_high,analytic_ber,analytic_method"
    assert lines[2].endswith(",0.1,x")
