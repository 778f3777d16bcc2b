import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from mcdcsk.analysis import decision_moments
from mcdcsk.chaos import generate_sequence
from mcdcsk.channel import ChannelProfile, FadingDraw, apply_channel
from mcdcsk.frame import SystemConfig, build_mc_frame
from mcdcsk.receiver import decision_stats, demodulate, demodulate_batch, hard_decision


def test_noiseless_loopback():
    c = generate_sequence(0.37, 20)
    bits = [1, -1, -1, 1, 1]
    out = demodulate(build_mc_frame(bits, c).rows())
    np.testing.assert_array_equal(out.decisions, bits)
    np.testing.assert_allclose(out.decision_variables, np.array(bits) * c.energy, rtol=1e-14)


def test_zero_matrix_ties_to_plus_one():
    out = demodulate(np.zeros((4, 7)))
    assert np.all(out.decision_variables == 0)
    assert np.all(out.decisions == 1)


def test_two_path_brute_force():
    c = generate_sequence(0.29, 4)
    x = list(c.chips)
    bits = [1, -1]
    prof = ChannelProfile.rayleigh([1.0, 1.0], [0, 1])
    rx = apply_channel(build_mc_frame(bits, c).rows(), np.zeros((3, 1)), FadingDraw(np.ones(2)), prof,
                       np.random.default_rng(0))
    out = demodulate(rx)
    ext = [0.0] + x  # nothing was sent before this frame
    for i, b in enumerate(bits):
        d = 0.0
        for k in range(4):
            ref = ext[k + 1] + ext[k]
            d += ref * (b * ref)
        assert out.decision_variables[i] == pytest.approx(d, rel=1e-14)


def test_dimension_error():
    with pytest.raises(ValueError):
        demodulate(np.ones((1, 5)))
    with pytest.raises(ValueError):
        demodulate(np.ones(5))


def test_decision_variables_are_inner_products():
    rx = np.random.default_rng(0).normal(size=(6, 11))
    out = demodulate(rx)
    for i in range(5):
        assert out.decision_variables[i] == pytest.approx(sum(rx[0, k] * rx[i + 1, k] for k in range(11)), rel=1e-12)
    np.testing.assert_array_equal(out.decisions, hard_decision(out.decision_variables))


frames = arrays(np.float64, st.tuples(st.integers(2, 8), st.integers(1, 16)),
                elements=st.floats(-10, 10, allow_nan=False))


@given(frames)
def test_deterministic_and_sign_flip(rx):
    a, b = demodulate(rx), demodulate(rx)
    np.testing.assert_array_equal(a.decision_variables, b.decision_variables)
    flipped = rx.copy()
    flipped[1:] *= -1
    f = demodulate(flipped)
    np.testing.assert_array_equal(f.decision_variables, -a.decision_variables)
    nz = a.decision_variables != 0
    np.testing.assert_array_equal(f.decisions[nz], -a.decisions[nz])


@given(frames, st.floats(0.01, 100))
def test_scale_equivariance(rx, c):
    a = demodulate(rx)
    s = demodulate(c * rx)
    np.testing.assert_allclose(s.decision_variables, c * c * a.decision_variables, rtol=1e-9, atol=1e-9)
    big = np.abs(a.decision_variables) > 1e-6
    np.testing.assert_array_equal(s.decisions[big], a.decisions[big])


def test_batch_matches_single():
    rx = np.random.default_rng(1).normal(size=(5, 4, 9))
    D = demodulate_batch(rx)
    for f in range(5):
        np.testing.assert_allclose(D[f], demodulate(rx[f]).decision_variables, rtol=1e-13)


def test_receiver_output_csv(tmp_path):
    out = demodulate(np.random.default_rng(0).normal(size=(3, 4)))
    out.to_csv(tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == "bit_index,decision_variable,decision" and len(lines) == 3


# -- decision statistics -----------------------------------------------------

CODE80 = generate_sequence(0.1234, 80).chips


def test_noiseless_stats_have_zero_variance():
    mean, var, _ = decision_stats(SystemConfig(2, 80), ChannelProfile.awgn(0.0), 1000,
                                  np.random.default_rng(0), code=CODE80)
    assert var == pytest.approx(0.0, abs=1e-20)
    assert mean == pytest.approx(np.dot(CODE80, CODE80))


def test_variance_matches_independent_noise_oracle():
    # each correlator input carries N0/2 per chip: Var = E*N0 + beta*N0^2/4
    E = float(np.dot(CODE80, CODE80))
    _, var, _ = decision_stats(SystemConfig(2, 80), ChannelProfile.awgn(1.0), 100_000,
                               np.random.default_rng(1), code=CODE80)
    assert var == pytest.approx(E * 1.0 + 80 / 4, rel=0.03)


@pytest.mark.xfail(strict=True, reason="closed-form variance keeps only one of the two signal-by-noise terms")
def test_variance_matches_closed_form_single_cross_term():
    cfg = SystemConfig(2, 80)
    E_b = cfg.M / (cfg.M - 1) * float(np.dot(CODE80, CODE80))
    _, expected = decision_moments(cfg.M, cfg.beta, E_b, 1.0, 1.0)
    _, var, _ = decision_stats(cfg, ChannelProfile.awgn(1.0), 100_000, np.random.default_rng(1), code=CODE80)
    assert var == pytest.approx(expected, rel=0.03)


def test_noise_product_term_scales_with_n0_squared():
    cfg = SystemConfig(2, 400)
    code = generate_sequence(0.31, 400).chips
    v = []
    for N0 in (1.0, 2.0):
        _, var, _ = decision_stats(cfg, ChannelProfile.awgn(N0), 200_000, np.random.default_rng(int(N0)), code=code)
        v.append(var)
    # var(N0) = a*N0 + b*N0^2, solved from the two points
    b = (v[1] - 2 * v[0]) / 2.0
    assert b == pytest.approx(400 / 4, rel=0.1)


def test_fresh_code_mode_mean():
    mean, _, _ = decision_stats(SystemConfig(2, 20), ChannelProfile.awgn(0.5), 50_000, np.random.default_rng(2))
    assert mean == pytest.approx(20.0, rel=0.02)


def test_multipath_mean_with_fixed_fading():
    prof = ChannelProfile.rayleigh([0.5, 0.5], [0, 2], N0=0.5)
    lam = np.array([0.8, 0.6])
    mean, _, _ = decision_stats(SystemConfig(2, 80), prof, 50_000, np.random.default_rng(3),
                                draw=FadingDraw(lam), code=CODE80)
    # oracle: energy of the noiseless two-path received row
    x = np.concatenate([np.zeros(2), CODE80])
    y = lam[0] * x[2:] + lam[1] * x[:-2]
    assert mean == pytest.approx(np.dot(y, y), rel=0.01)
