import math

import numpy as np
import pytest
from scipy.special import gamma as gamma_fn

from stratawave.spectral import (MultiplierAnalysis, SpectralProfile, calderon_constant,
                                 daubechies_check, eval_multiplier, frame_bounds,
                                 heat_power_profile, mexican_hat_profile,
                                 midpoint_error_bound, multi_generator_bounds,
                                 profile_from_name, tabulated_profile,
                                 tightness_asymptotics, zero_lattice_profile,
                                 zero_profile)

A_CBRT2 = 2.0 ** (1.0 / 3.0)


def brute_multiplier(profile, a, lam, jrange=80):
    """Independent oracle: plain summation over a wide j window."""
    js = np.arange(-jrange, jrange + 1)
    return float((profile.F(np.power(a, 2.0 * js) * lam) ** 2).sum())


def test_eval_multiplier_zero_profile():
    val, err = eval_multiplier(zero_profile(), A_CBRT2, 1.0)
    assert val == 0.0 and err == 0.0


def test_eval_multiplier_matches_brute_force():
    prof = mexican_hat_profile()
    for lam in (1.0, 0.37, 5.0):
        val, err = eval_multiplier(prof, A_CBRT2, lam, tol=1e-12)
        assert err <= 1e-12
        assert abs(val - brute_multiplier(prof, A_CBRT2, lam)) < 1e-12


def test_multiplier_periodicity():
    prof = mexican_hat_profile()
    rng = np.random.default_rng(0)
    lams = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), 1000))
    v1, e1 = eval_multiplier(prof, A_CBRT2, lams, tol=1e-12)
    v2, e2 = eval_multiplier(prof, A_CBRT2, lams * A_CBRT2 ** 2, tol=1e-12)
    assert np.max(np.abs(v1 - v2)) <= 2.0 * (e1 + e2) + 1e-13


def test_multiplier_scale_identity():
    prof = mexican_hat_profile()
    lam = 0.73
    base, err = eval_multiplier(prof, A_CBRT2, lam, tol=1e-12)
    for j in range(-5, 6):
        v, e = eval_multiplier(prof, A_CBRT2, lam * A_CBRT2 ** (2 * j), tol=1e-12)
        assert abs(v - base) <= 2.0 * (err + e) + 1e-13


def test_frame_bounds_headline_mexican_hat():
    mb = frame_bounds(mexican_hat_profile(), A_CBRT2, tol=1e-10)
    assert abs(mb.ratio - 1.0) < 5e-5          # 1.0000 to four significant digits
    # complex-Gamma Poisson oracle: m has Fourier coefficients Gamma(2 - i w)
    c = 2.0 * math.log(A_CBRT2)
    g1 = abs(gamma_fn(2.0 - 2j * np.pi / c))
    assert abs(mb.A * c - (1.0 - 2.0 * g1)) < 1e-9
    assert abs(mb.B * c - (1.0 + 2.0 * g1)) < 1e-9
    assert abs(mb.ratio - 1.0 - 4.0 * g1) < 1e-10
    assert abs(mb.I - 1.0) < 1e-10


def test_frame_bounds_zero_lattice_profile():
    prof = zero_lattice_profile(A_CBRT2)
    # the construction vanishes on the whole dilation lattice through lam = 1
    assert brute_multiplier(prof, A_CBRT2, 1.0) < 1e-25
    mb = frame_bounds(prof, A_CBRT2, tol=1e-10)
    assert mb.A < 1e-10
    assert mb.B > 0.1


def test_frame_bounds_near_one_matches_midpoint_prediction():
    prof = mexican_hat_profile()
    env = tightness_asymptotics(prof, 1.01)
    mb = frame_bounds(prof, 1.01, tol=1e-10)
    assert env.certified
    assert mb.A >= env.predicted * (1.0 - env.eps) - 1e-9
    assert mb.B <= env.predicted * (1.0 + env.eps) + 1e-9


def test_frame_bounds_inverse_dilation():
    prof = mexican_hat_profile()
    mb1 = frame_bounds(prof, 1.26, tol=1e-11)
    mb2 = frame_bounds(prof, 1.0 / 1.26, tol=1e-11)
    assert abs(mb1.A - mb2.A) < 1e-10 and abs(mb1.B - mb2.B) < 1e-10


def test_frame_bounds_monotone_refinement():
    prof = mexican_hat_profile()
    loose = frame_bounds(prof, 1.4, tol=1e-8)
    tight = frame_bounds(prof, 1.4, tol=1e-10)
    assert loose.A - loose.tail_err <= tight.A + 1e-12
    assert tight.B <= loose.B + loose.tail_err + 1e-12
    assert tight.tail_err <= loose.tail_err


def test_multiplier_smoothness():
    # finite-difference slope on [1, a^2] stays below the dense Lipschitz estimate
    prof = mexican_hat_profile()
    a = A_CBRT2
    lg = np.linspace(0, math.log(a * a), 4001, endpoint=False)
    vals, _ = eval_multiplier(prof, a, np.exp(lg), tol=1e-12)
    slopes = np.abs(np.diff(vals)) / (lg[1] - lg[0])
    dense = np.abs(np.gradient(vals, lg))
    assert slopes.max() <= dense.max() * 1.5 + 1e-9


def test_calderon_constant_gamma_oracle():
    I1, err1 = calderon_constant(mexican_hat_profile(), tol=1e-12)
    assert abs(I1 - 1.0) < 1e-10          # Gamma(2) = 1
    I2, err2 = calderon_constant(heat_power_profile(2), tol=1e-11)
    assert abs(I2 - 6.0) < 1e-9           # Gamma(4) = 6
    I0, err0 = calderon_constant(zero_profile())
    assert I0 == 0.0


def test_calderon_scale_invariance():
    base = mexican_hat_profile()
    I, err = calderon_constant(base)
    for s in (0.1, 10.0):
        scaled = SpectralProfile(name="scaled", H=lambda lam, s=s: np.exp(-s * lam / 2.0) * s,
                                 k=1)
        Is, errs = calderon_constant(scaled)
        assert abs(Is - I) <= 2.0 * (err + errs) + 1e-10


def test_daubechies_check():
    ok, witness, _ = daubechies_check(mexican_hat_profile(), A_CBRT2)
    assert ok and witness is None
    ok, witness, mb = daubechies_check(zero_lattice_profile(A_CBRT2), A_CBRT2)
    assert not ok
    # witness sits on the vanishing lattice {a^{2j}}, folded into [1, a^2]
    assert brute_multiplier(zero_lattice_profile(A_CBRT2), A_CBRT2, witness) < 1e-12
    ok, witness, _ = daubechies_check(zero_profile(), A_CBRT2)
    assert not ok


def test_tightness_prediction_value():
    env = tightness_asymptotics(mexican_hat_profile(), A_CBRT2)
    assert abs(env.predicted - 3.0 / (2.0 * math.log(2.0))) < 1e-9
    assert not env.certified  # c = (2/3) log 2 > 1/e


def test_tightness_sweep_bounded():
    prof = mexican_hat_profile()
    ratios = []
    for a in (1.26, 1.1, 1.05, 1.02):
        mb = frame_bounds(prof, a, tol=1e-11)
        c = 2.0 * math.log(a)
        ratios.append((mb.ratio - 1.0) / (c * c * math.log(1.0 / c)))
    assert max(ratios) < 1.0  # tiny in practice; bounded is the claim


def test_midpoint_error_bound():
    assert midpoint_error_bound(24.0, 1.0, 1.0) == 1.0
    assert midpoint_error_bound(0.0, 10.0, 0.3) == 0.0
    # f(x) = x^2 on [0, 1], 10 midpoint panels: true error is 1/1200
    xs = (np.arange(10) + 0.5) / 10.0
    true_err = abs(1.0 / 3.0 - float((xs ** 2).sum() * 0.1))
    assert true_err <= midpoint_error_bound(2.0, 1.0, 0.1) + 1e-15
    with pytest.raises(ValueError):
        midpoint_error_bound(-1.0, 1.0, 1.0)


def test_multi_generator_bounds():
    prof = mexican_hat_profile()
    single = frame_bounds(prof, 2.0, tol=1e-10)
    multi = multi_generator_bounds([prof], 2.0, tol=1e-10)
    assert abs(multi.A - single.A) < 1e-9 and abs(multi.B - single.B) < 1e-9
    doubled = multi_generator_bounds([prof, prof], 2.0, tol=1e-10)
    assert abs(doubled.A - 2 * single.A) < 1e-8
    assert abs(doubled.B - 2 * single.B) < 1e-8
    # a second generator placed half a period off flattens the sum: the two
    # multiplier oscillations cancel and the pair is far closer to tight
    shifted = SpectralProfile(name="shifted",
                              H=lambda lam: 2.0 * np.exp(-2.0 * lam / 2.0), k=1)
    other = frame_bounds(shifted, 2.0, tol=1e-10)
    assert abs(other.ratio - single.ratio) < 1e-8   # bounds are scale invariant
    mixed = multi_generator_bounds([prof, shifted], 2.0, tol=1e-10)
    assert mixed.ratio < single.ratio and mixed.ratio < other.ratio
    assert mixed.ratio < 1.001


def test_tabulated_profile():
    lam = np.exp(np.linspace(np.log(1e-6), np.log(50), 4000))
    prof = tabulated_profile(lam, np.exp(-lam / 2.0), k=1)
    assert not prof.certified
    mb = frame_bounds(prof, A_CBRT2, tol=1e-6)
    exact = frame_bounds(mexican_hat_profile(), A_CBRT2, tol=1e-10)
    assert abs(mb.A - exact.A) < 1e-3 and abs(mb.B - exact.B) < 1e-3


def test_profile_from_name():
    assert profile_from_name("mexican-hat").name == "mexican-hat"
    assert profile_from_name("heat-power", k=2).k == 2
    with pytest.raises(ValueError):
        profile_from_name("nope")


def test_envelope_invariant_holds_on_grid():
    for prof in (mexican_hat_profile(), heat_power_profile(2), zero_lattice_profile()):
        lam = np.exp(np.linspace(np.log(1e-8), np.log(1e8), 5001))
        F2 = prof.F(lam) ** 2
        assert np.all(F2 <= prof.envelope_F2(lam) * (1.0 + 1e-9))
        assert prof.F(0.0) == 0.0
