import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from rotsum import contfrac as cf
from rotsum import ergosum as es
from rotsum import observables as obs
from rotsum import sequences as seq
from rotsum import stats as st
from rotsum.errors import ConfigError


# ---------------------------------------------------------------------------
# Instruments
# ---------------------------------------------------------------------------

def test_normal_cdf_values():
    assert st.normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert st.normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-12)
    xs = np.linspace(-6, 6, 101)
    arr = st._normal_cdf_array(xs)
    for x, v in zip(xs, arr):
        assert abs(v - st.normal_cdf(x)) < 1e-13


def test_mixture_cdf_symmetry_and_quadrature():
    assert st.mixture_cdf(0.0) == pytest.approx(0.5, abs=1e-12)
    for t in (-2.0, -0.5, 0.7, 1.9):
        direct, _ = integrate.quad(
            lambda y: st.normal_cdf(t / (math.sqrt(2) * abs(math.cos(math.pi * y))))
            if abs(math.cos(math.pi * y)) > 1e-14 else (1.0 if t > 0 else
                                                        0.5 if t == 0 else 0.0),
            0, 1, limit=400, points=[0.5])
        assert st.mixture_cdf(t) == pytest.approx(direct, abs=5e-7)
        # symmetry F(-t) = 1 - F(t)
        assert st.mixture_cdf(-t) == pytest.approx(1 - st.mixture_cdf(t),
                                                   abs=1e-12)


def test_ks_constant_samples():
    ks = st.ks_statistic(np.zeros(100), st._normal_cdf_array)
    assert ks >= 0.5


def test_ks_two_point_oracle():
    # half the mass at -1, half at +1, against N(0,1): sup gap is at +-1,
    # equal to Phi(1) - 1/2 by the hand computation of the step ECDF
    k = 10000
    samples = np.concatenate([-np.ones(k // 2), np.ones(k // 2)])
    ks = st.ks_statistic(samples, st._normal_cdf_array)
    assert ks == pytest.approx(st.normal_cdf(1.0) - 0.5, abs=1e-9)


def test_ks_self_consistency_seeded():
    rng = np.random.default_rng(123)
    z = rng.standard_normal(10000)
    assert st.ks_statistic(z, st._normal_cdf_array) < 0.03


def test_ks_empty_rejected():
    with pytest.raises(ConfigError):
        st.ks_statistic([], st._normal_cdf_array)


def test_two_sample_ks_identical():
    rng = np.random.default_rng(1)
    z = rng.standard_normal(500)
    assert st.two_sample_ks(z, z) == 0.0


# ---------------------------------------------------------------------------
# Subsequence CLT machinery
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def plan40():
    tr = cf.truncation(cf.clt_design_rule(c=30, beta=2, max_index=48), 46)
    return seq.plan_growth(tr, 2, 40)


def test_sample_sums_zero_plan(plan40):
    ss = st.sample_sums(plan40, obs.Sawtooth(),
                        st.StratifiedSampler(seed=0, size=64), 0)
    assert not np.any(ss.values)


def test_sample_sums_reproducible(plan40):
    sampler = st.StratifiedSampler(seed=5, size=200)
    a = st.sample_sums(plan40, obs.Sawtooth(), sampler, 10)
    b = st.sample_sums(plan40, obs.Sawtooth(), sampler, 10)
    assert np.array_equal(a.values, b.values)
    assert a.prediction == b.prediction == pytest.approx(10 / 12)


def test_sample_sums_mean_small(plan40):
    ss = st.sample_sums(plan40, obs.Sawtooth(),
                        st.StratifiedSampler(seed=2, size=4000), 20)
    k = len(ss.values)
    sd = float(np.std(ss.values))
    assert abs(float(np.mean(ss.values))) <= 3 * sd / math.sqrt(k) + 0.05


def test_plan_extension_block_identity(plan40):
    # S_{L_{n+1}}(x) - S_{L_n}(x) = S_{q_{t_{n+1}}}({x + L_n alpha}), exactly
    tr = plan40.trunc
    phi = obs.indicator(Fraction(1, 3))
    n = 6
    x = Fraction(5, 17)
    s_n = es.ergodic_sum(phi, x, plan40.L[n], tr).value
    s_n1 = es.ergodic_sum(phi, x, plan40.L[n + 1], tr).value
    shift = (x + plan40.L[n] * tr.value) % 1
    block = es.ergodic_sum(phi, shift, plan40.q(n + 1), tr).value
    assert s_n1 - s_n == block


def test_variance_ratio_trend(plan40):
    # empirical variance over the Fourier prediction stays in [0.9, 1.1]
    # across n = 10, 20, 40 (band frozen from seeded runs)
    for n, k in ((10, 4000), (20, 4000), (40, 4000)):
        ss = st.sample_sums(plan40, obs.Sawtooth(),
                            st.StratifiedSampler(seed=7, size=k), n)
        ratio = ss.normalization ** 2 / ss.prediction
        assert 0.9 <= ratio <= 1.1


def test_partial_block_clt(plan40):
    # S_{L_40} - S_{L_20} = S_{L_40 - L_20}({x + L_20 alpha}): the block is
    # again approximately Gaussian with variance ~ the block's hat norms
    tr = plan40.trunc
    phi = obs.Sawtooth()
    m, n, k = 20, 40, 4000
    sampler = st.StratifiedSampler(seed=13, size=k)
    block_len = plan40.L[n] - plan40.L[m]
    alpha_shift = Fraction((plan40.L[m] * tr.p) % tr.q, tr.q)
    vals = []
    for num in sampler.numerators():
        x = (Fraction(int(num), sampler.den) + alpha_shift) % 1
        vals.append(float(es.ergodic_sum(phi, x, block_len, tr).value))
    vals = np.array(vals)
    pred = (n - m) / 12.0
    emp = float(np.mean(vals ** 2))
    assert 0.85 <= emp / pred <= 1.15
    z = vals / math.sqrt(emp)
    assert st.ks_statistic(z, st._normal_cdf_array) <= 0.04


def test_grid_sampler_runs(plan40):
    ss = st.sample_sums(plan40, obs.Sawtooth(), st.GridSampler(size=256), 10)
    assert ss.sampler["kind"] == "grid"
    assert len(ss.values) == 256


def test_clt_experiment_report(plan40):
    rep = st.clt_experiment(plan40, obs.Sawtooth(), 12, 2000, seed=1)
    assert rep.passed
    assert rep.plan_hash == plan40.plan_hash()
    assert "ks" in rep.empirical
    doc = rep.to_json()
    assert "config_hash" in doc
    rep2 = st.clt_experiment(plan40, obs.Sawtooth(), 12, 2000, seed=1)
    assert rep.to_json() == rep2.to_json()


# ---------------------------------------------------------------------------
# Doubling-map experiments
# ---------------------------------------------------------------------------

def test_erdos_fortet_identity():
    rng = np.random.default_rng(8)
    xs = rng.random(20)
    for n in (3, 10, 20):
        assert st.erdos_fortet_identity_error(n, xs) < 1e-9


def test_erdos_fortet_experiment_small():
    rep = st.erdos_fortet_experiment(400, 4000, seed=3)
    assert rep.empirical["ks_mixture"] < 0.05
    assert rep.empirical["ks_best_normal"] > rep.empirical["ks_mixture"]
    assert rep.empirical["variance"] == pytest.approx(1.0, abs=0.15)


def test_gaposhkin_count_exact():
    # I_5 inside [1, 10^6]: sum over m <= 15 of (m + 1)
    assert st.gaposhkin_count(5, 10 ** 6) == sum(m + 1 for m in range(1, 16))
    assert st.gaposhkin_count(5, 10 ** 6) <= (10 ** 6) ** (2 / 5)


def test_gaposhkin_demo_small():
    rep = st.gaposhkin_demo(5, 300, 4000, seed=9)
    assert rep.empirical["mismatches"] == 9  # [1,2], [32..34], [243..246]
    assert rep.empirical["ks_two_sample"] <= 0.05
    assert rep.empirical["sup_diff"] <= rep.prediction["sup_diff_bound"]
    with pytest.raises(ConfigError):
        st.gaposhkin_demo(4, 100, 100, seed=0)


# ---------------------------------------------------------------------------
# Quasi-orthogonality and block variance
# ---------------------------------------------------------------------------

def exact_product_integral(f, l1, g, l2):
    """Exact integral of f(l1 x) g(l2 x) for step observables."""
    breaks = set()
    for phi, l in ((f, l1), (g, l2)):
        for b in phi.breakpoints:
            for j in range(l):
                breaks.add((b + j) / l)
    bs = sorted(breaks)
    total = Fraction(0)
    for i, lo in enumerate(bs):
        hi = bs[i + 1] if i + 1 < len(bs) else Fraction(1)
        mid = (lo + hi) / 2
        total += (f.evaluate(l1 * mid) * g.evaluate(l2 * mid)) * (hi - lo)
    return total


def test_resonance_integral_vs_exact():
    f = obs.indicator(Fraction(1, 3))
    g = obs.half_shifted(Fraction(2, 7))
    for l1, l2 in ((1, 1), (1, 4), (2, 6), (3, 5)):
        exact = float(exact_product_integral(f, l1, g, l2))
        val, tail = st.resonance_integral(f, l1, g, l2, mmax=6000)
        assert abs(val - abs(exact)) <= tail + 1e-6


def test_quasi_orthogonality_self():
    f = obs.indicator(Fraction(1, 3))
    lhs, rhs = st.quasi_orthogonality_check(f, f, 1, 1)
    assert lhs == pytest.approx(float(f.norm_sq()), rel=1e-2)
    assert rhs >= lhs - 1e-9


def test_quasi_orthogonality_phi0_eight():
    st_phi = obs.Sawtooth()
    lhs, rhs = st.quasi_orthogonality_check(st_phi, st_phi, 1, 8)
    # resonance series: sum over m of c_{8m} conj(c_m) = (1/96) exactly
    assert lhs == pytest.approx(1 / 96, rel=1e-2)
    # R(phi0, 8) ||phi0||_2 with R^2 = (1/2 pi^2) sum_{j>=8} j^-2
    r_sq = sum(1 / (2 * math.pi ** 2 * j * j) for j in range(8, 200000))
    assert rhs == pytest.approx(math.sqrt(r_sq) / math.sqrt(12), rel=1e-3)


def test_quasi_orthogonality_random_pairs():
    rng = np.random.default_rng(17)
    pool = [obs.Sawtooth(), obs.indicator(Fraction(1, 3)), obs.half(),
            obs.double_interval(Fraction(1, 5), Fraction(3, 8)),
            obs.half_shifted(Fraction(2, 7))]
    for _ in range(25):
        f = pool[rng.integers(len(pool))]
        g = pool[rng.integers(len(pool))]
        l1 = int(rng.integers(1, 30))
        l2 = l1 * int(rng.integers(2, 12))
        lhs, rhs = st.quasi_orthogonality_check(f, g, l1, l2)
        assert lhs <= rhs + 1e-12


def test_block_variance_ratio_lacunary():
    rng = np.random.default_rng(21)
    pool = [obs.indicator(Fraction(1, 3)), obs.half(),
            obs.half_shifted(Fraction(2, 7)), obs.Sawtooth()]
    for trial in range(3):
        ns, cur = [], 1
        for _ in range(8):
            cur *= int(rng.integers(16, 21))
            ns.append(cur)
        fs = [pool[rng.integers(len(pool))] for _ in ns]
        ratio = st.block_variance_ratio(fs, ns)
        assert 0.5 <= ratio <= 1.5
