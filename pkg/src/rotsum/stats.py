"""Monte Carlo verification instruments: samplers, Kolmogorov-Smirnov
statistics, Gaussian and Gaussian-mixture references, and the experiment
drivers for the subsequence CLT, the Erdos-Fortet mixture limit, the
modified-lacunary-sequence demonstration, and quasi-orthogonality.

Sampling conventions
--------------------
Rotation experiments use stratified random rationals with denominator 2^64:
the exact engine consumes the integer numerators directly.  Doubling-map
experiments (frequencies 2^k or 2^k - 1) instead use the prime denominator
DOUBLING_DEN < 2^52: dyadic rationals collapse under repeated doubling,
while modular doubling by an odd prime keeps exact int64 arithmetic and the
multiplicative order of 2 is astronomically larger than any horizon used
here.

Every sampler is deterministic in (seed, K) and reports are reproducible
bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as _special

from . import __version__ as _VERSION
from .ergosum import ErgodicContext
from .errors import ConfigError
from .observables import Observable, VectorObservable, hat_norm_sq
from .sequences import SubsequencePlan

__all__ = [
    "SampleSet",
    "ExperimentReport",
    "StratifiedSampler",
    "GridSampler",
    "DOUBLING_DEN",
    "normal_cdf",
    "mixture_cdf",
    "ks_statistic",
    "two_sample_ks",
    "sample_sums",
    "clt_experiment",
    "erdos_fortet_experiment",
    "erdos_fortet_identity_error",
    "gaposhkin_count",
    "gaposhkin_demo",
    "quasi_orthogonality_check",
    "resonance_integral",
    "fourier_tail_norm",
    "block_variance_ratio",
    "covariance_2d",
]

# Prime modulus for doubling-map samplers; 2 has multiplicative order
# (DOUBLING_DEN - 1)/2 ~ 2.3e15, so orbits of x -> 2x never cycle at the
# horizons used here, and all residues fit exact int64 arithmetic.
DOUBLING_DEN = 4503599627370449


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StratifiedSampler:
    """K stratified random rationals i*step + U_i over a fixed denominator."""

    seed: int
    size: int
    den: int = 2 ** 64

    def numerators(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        step = self.den // self.size
        offs = rng.integers(0, step, size=self.size, dtype=np.int64)
        base = np.arange(self.size, dtype=object) * step
        return base + offs.astype(object)

    def describe(self) -> dict:
        return {"kind": "stratified", "seed": self.seed, "size": self.size,
                "den": str(self.den)}


@dataclass(frozen=True)
class GridSampler:
    """x_i = i/K: deterministic grid (rational points, exact engine ready)."""

    size: int

    def numerators(self) -> np.ndarray:
        return np.arange(self.size, dtype=object)

    @property
    def den(self) -> int:
        return self.size

    def describe(self) -> dict:
        return {"kind": "grid", "size": self.size, "den": str(self.size)}


@dataclass(frozen=True)
class SampleSet:
    values: np.ndarray
    sampler: dict
    normalization: float
    prediction: float | None = None

    def normalized(self) -> np.ndarray:
        return self.values / self.normalization


@dataclass
class ExperimentReport:
    kind: str
    empirical: dict
    prediction: dict
    tolerance: dict
    passed: bool
    seed: int
    plan_hash: str | None = None
    version: str = _VERSION
    extra: dict = field(default_factory=dict)

    def config_hash(self) -> str:
        doc = json.dumps({"kind": self.kind, "prediction": self.prediction,
                          "tolerance": self.tolerance, "seed": self.seed,
                          "plan": self.plan_hash}, sort_keys=True, default=str)
        return hashlib.sha256(doc.encode()).hexdigest()[:16]

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "empirical": self.empirical,
            "prediction": self.prediction,
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "seed": self.seed,
            "plan_hash": self.plan_hash,
            "config_hash": self.config_hash(),
            "version": self.version,
            "extra": self.extra,
        }
        return json.dumps(doc, sort_keys=True, default=float)


# ---------------------------------------------------------------------------
# Reference distributions
# ---------------------------------------------------------------------------

def normal_cdf(x: float) -> float:
    """Standard normal CDF via the stdlib complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _normal_cdf_array(x: np.ndarray) -> np.ndarray:
    return _special.ndtr(x)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(512)


def mixture_cdf(t) -> np.ndarray:
    """CDF of sqrt(2) |cos(pi Y)| * Z with Y uniform on [0,1], Z standard
    normal:  F(t) = int_0^1 Phi(t / (sqrt(2) |cos(pi y)|)) dy.

    Gauss-Legendre on [0, 1/2] (doubled by symmetry); the y -> 1/2 endpoint
    contributes Phi(+-inf) = step(t), which the saturating integrand handles.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    y = 0.25 * (_GL_NODES + 1.0)          # [0, 1/2]
    w = 0.25 * _GL_WEIGHTS
    sig = math.sqrt(2.0) * np.abs(np.cos(np.pi * y))
    vals = 2.0 * (_normal_cdf_array(t_arr[:, None] / sig[None, :]) @ w)
    return vals if np.ndim(t) else float(vals[0])


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov
# ---------------------------------------------------------------------------

def ks_statistic(samples, cdf) -> float:
    """sup_t |ECDF(t) - cdf(t)| computed at the sorted sample in O(K log K).

    ``cdf`` is a callable applied to the sorted array (vectorized or scalar).
    """
    z = np.sort(np.asarray(samples, dtype=np.float64))
    if z.size == 0:
        raise ConfigError("empty sample")
    try:
        f = np.asarray(cdf(z), dtype=np.float64)
    except Exception:
        f = np.array([cdf(v) for v in z], dtype=np.float64)
    if f.shape != z.shape:
        f = np.array([cdf(v) for v in z], dtype=np.float64)
    n = z.size
    lo = np.arange(0, n) / n
    hi = np.arange(1, n + 1) / n
    return float(max(np.max(f - lo), np.max(hi - f)))


def two_sample_ks(a, b) -> float:
    za, zb = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    allv = np.concatenate([za, zb])
    ca = np.searchsorted(za, allv, side="right") / za.size
    cb = np.searchsorted(zb, allv, side="right") / zb.size
    return float(np.max(np.abs(ca - cb)))


# ---------------------------------------------------------------------------
# Subsequence CLT sampling
# ---------------------------------------------------------------------------

def sample_sums(plan: SubsequencePlan, phi: Observable,
                sampler: StratifiedSampler | GridSampler, n: int) -> SampleSet:
    """Samples of S_{L_n} phi(x) over the sampler's x, exact engine.

    ``normalization`` is the empirical L2 norm; ``prediction`` the Fourier
    variance sum_{k<=n} ||hat_phi_{q_{t_k}}||_2^2.
    """
    if not 0 <= n <= plan.count:
        raise ConfigError("n outside plan range")
    Ln = plan.L[n]
    nums = sampler.numerators()
    if n == 0:
        vals = np.zeros(len(nums))
        return SampleSet(vals, sampler.describe(), 1.0, prediction=0.0)
    ctx = ErgodicContext(phi, plan.trunc, sampler.den)
    vals = np.array([float(ctx.sum_at(int(m), Ln)) for m in nums])
    pred = sum(hat_norm_sq(phi, plan.q(k))[0] for k in range(1, n + 1))
    norm = math.sqrt(float(np.mean(vals ** 2)))
    return SampleSet(vals, sampler.describe(), norm, prediction=pred)


def clt_experiment(plan: SubsequencePlan, phi: Observable, n: int,
                   samples: int, seed: int,
                   ks_tol: float = 0.03,
                   ratio_band: tuple[float, float] = (0.9, 1.1)) -> ExperimentReport:
    """Normalized-sum Gaussianity check along the plan at position n."""
    sampler = StratifiedSampler(seed=seed, size=samples)
    ss = sample_sums(plan, phi, sampler, n)
    emp_var = ss.normalization ** 2
    ratio = emp_var / ss.prediction
    ks = ks_statistic(ss.normalized(), _normal_cdf_array)
    mean = float(np.mean(ss.values))
    passed = (ks <= ks_tol) and (ratio_band[0] <= ratio <= ratio_band[1])
    return ExperimentReport(
        kind="clt_subsequence",
        empirical={"ks": ks, "variance": emp_var, "variance_ratio": ratio,
                   "mean": mean},
        prediction={"variance": ss.prediction, "reference": "N(0,1)"},
        tolerance={"ks": ks_tol, "ratio_band": list(ratio_band)},
        passed=passed,
        seed=seed,
        plan_hash=plan.plan_hash(),
        extra={"n": n, "samples": samples, "observable": getattr(phi, "label", "?")},
    )


# ---------------------------------------------------------------------------
# Doubling-map experiments
# ---------------------------------------------------------------------------

def _doubling_numerators(seed: int, size: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    step = DOUBLING_DEN // size
    return (np.arange(size, dtype=np.int64) * step
            + rng.integers(0, step, size=size, dtype=np.int64))


def _f0_sum(nums: np.ndarray, n: int, shifted_set=None) -> np.ndarray:
    """sum_{k=1..n} f0(e_k x) with f0 = cos(2 pi x) + cos(4 pi x) and
    e_k = 2^k - 1 when shifted_set is None or k in shifted_set, else 2^k.

    Exact residues: r_k = 2^k num mod D by int64 doubling, and the shifted
    frequency uses (2^k - 1) num = r_k - num mod D.
    """
    D = DOUBLING_DEN
    r = nums.copy()
    out = np.zeros(nums.size)
    for k in range(1, n + 1):
        r = 2 * r
        r -= D * (r >= D)
        if shifted_set is None or k in shifted_set:
            t = r - nums
            t += D * (t < 0)
        else:
            t = r
        frac = t.astype(np.float64) / D
        out += np.cos(2 * np.pi * frac) + np.cos(4 * np.pi * frac)
    return out


def erdos_fortet_experiment(n: int, samples: int, seed: int,
                            ks_mix_tol: float = 0.03,
                            gap_tol: float = 0.02) -> ExperimentReport:
    """Distribution of (1/sqrt n) sum f0((2^k - 1) x): converges to the
    sqrt(2)|cos(pi Y)| Gaussian mixture, detectably non-Gaussian.

    Passes when KS(mixture) <= ks_mix_tol and the best-fit single normal is
    worse by at least gap_tol.
    """
    nums = _doubling_numerators(seed, samples)
    z = _f0_sum(nums, n) / math.sqrt(n)
    ks_mix = ks_statistic(z, mixture_cdf)
    sd = math.sqrt(float(np.mean(z ** 2)))
    ks_norm = ks_statistic(z, lambda v: _normal_cdf_array(np.asarray(v) / sd))
    passed = (ks_mix <= ks_mix_tol) and (ks_norm >= ks_mix + gap_tol)
    return ExperimentReport(
        kind="erdos_fortet",
        empirical={"ks_mixture": ks_mix, "ks_best_normal": ks_norm,
                   "variance": sd * sd, "gap": ks_norm - ks_mix},
        prediction={"variance": 1.0, "reference": "sqrt(2)|cos(pi Y)| mixture"},
        tolerance={"ks_mixture": ks_mix_tol, "gap": gap_tol},
        passed=passed,
        seed=seed,
        extra={"n": n, "samples": samples},
    )


def erdos_fortet_identity_error(n: int, xs) -> float:
    """Max error of the cosine rearrangement identity

        sum_{k=1..n} [cos(2 pi (2^k-1)x) + cos(4 pi (2^k-1)x)]
          = cos(2 pi x) + cos(2 pi (2^{n+1}-2)x)
            + 2 cos(pi x) sum_{k=2..n} cos(2 pi (2^k - 3/2) x)

    over the given points (floats)."""
    worst = 0.0
    for x in xs:
        lhs = sum(math.cos(2 * math.pi * (2 ** k - 1) * x)
                  + math.cos(4 * math.pi * (2 ** k - 1) * x)
                  for k in range(1, n + 1))
        rhs = (math.cos(2 * math.pi * x)
               + math.cos(2 * math.pi * (2 ** (n + 1) - 2) * x)
               + 2 * math.cos(math.pi * x)
               * sum(math.cos(2 * math.pi * (2 ** k - 1.5) * x)
                     for k in range(2, n + 1)))
        worst = max(worst, abs(lhs - rhs))
    return worst


def gaposhkin_index_set(a: int, nmax: int) -> set[int]:
    """I_a = union over m of {k : m^a <= k <= m^a + m}, restricted to <= nmax."""
    out: set[int] = set()
    m = 1
    while m ** a <= nmax:
        for k in range(m ** a, min(m ** a + m, nmax) + 1):
            out.add(k)
        m += 1
    return out


def gaposhkin_count(a: int, nmax: int) -> int:
    """#({1..nmax} intersect I_a), exact."""
    return len([k for k in gaposhkin_index_set(a, nmax) if 1 <= k <= nmax])


def gaposhkin_demo(a: int, n: int, samples: int, seed: int,
                   ks_tol: float = 0.02) -> ExperimentReport:
    """Compares the normalized sums over 2^k against the sequence modified to
    2^k - 1 on the sparse index set I_a: the modification is invisible at
    scale sqrt(n)."""
    if a < 5:
        raise ConfigError("exponent a must be >= 5")
    nums = _doubling_numerators(seed, samples)
    mism = gaposhkin_index_set(a, n)
    s_plain = _f0_sum(nums, n, shifted_set=frozenset()) / math.sqrt(n)
    s_mod = _f0_sum(nums, n, shifted_set=mism) / math.sqrt(n)
    ks = two_sample_ks(s_plain, s_mod)
    count = len([k for k in mism if 1 <= k <= n])
    sup_diff = float(np.max(np.abs(s_plain - s_mod)))
    sup_bound = 2.0 * 2.0 * count / math.sqrt(n)  # 2 ||f0||_inf per mismatch
    passed = (ks <= ks_tol) and (sup_diff <= sup_bound)
    return ExperimentReport(
        kind="gaposhkin_modified_sequence",
        empirical={"ks_two_sample": ks, "mismatches": count,
                   "sup_diff": sup_diff, "var_plain": float(np.var(s_plain)),
                   "var_modified": float(np.var(s_mod))},
        prediction={"mismatch_scale": n ** (2.0 / a), "sup_diff_bound": sup_bound},
        tolerance={"ks_two_sample": ks_tol},
        passed=passed,
        seed=seed,
        extra={"a": a, "n": n, "samples": samples},
    )


# ---------------------------------------------------------------------------
# Quasi-orthogonality and block variance
# ---------------------------------------------------------------------------

def _c_coeff(phi: Observable, j: int) -> complex:
    g = phi.fourier_gamma(j)
    return g / j


def _resonance_sum(f: Observable, ka: int, g: Observable, kb: int,
                   mmax: int) -> float:
    """sum over m != 0 of c_{ka m}(f) conj(c_{kb m}(g)); real by conjugate
    symmetry of real observables."""
    from .observables import gamma_array

    gf = gamma_array(f, ka, mmax)
    gg = gamma_array(g, kb, mmax)
    m = np.arange(1, mmax + 1, dtype=np.float64)
    series = (gf * gg.conjugate()) / (ka * kb * m * m)
    return float(2.0 * np.sum(series.real))


def resonance_integral(f: Observable, l1: int, g: Observable, l2: int,
                       mmax: int = 2000) -> tuple[float, float]:
    """(|value|, tail_bound) for int_0^1 f(l1 x) conj(g(l2 x)) dx.

    Only frequencies with l1 k = l2 m resonate: k = (l2/d) m', m = (l1/d) m'
    with d = gcd(l1, l2); the series over m' is truncated at mmax.
    """
    if l1 < 1 or l2 < 1:
        raise ConfigError("multipliers must be positive integers")
    d = math.gcd(l1, l2)
    ka, kb = l2 // d, l1 // d
    val = _resonance_sum(f, ka, g, kb, mmax)
    kf, kg = f.kbound(), g.kbound()
    tail = 2.0 * kf * kg / (ka * kb) / mmax
    return abs(val), tail


def fourier_tail_norm(f: Observable, t: float, jmax: int = 20_000) -> float:
    """Partial sum of R(f, t) = (sum_{|j| >= t} |c_j|^2)^(1/2); an
    underestimate of the true tail norm (no completion term added)."""
    from .observables import Sawtooth, _phase_fracs

    j0 = max(1, math.ceil(t))
    js = np.arange(j0, jmax + 1, dtype=np.float64)
    if isinstance(f, Sawtooth):
        gam_sq = np.full(js.size, 1.0 / (4.0 * math.pi ** 2))
    else:
        acc = np.zeros(js.size, dtype=complex)
        for tp, j in f.jumps().items():
            fr = _phase_fracs(tp, jmax)[j0 - 1:]
            acc += float(j) * np.exp(-2j * math.pi * fr)
        gam_sq = (acc * acc.conjugate()).real / (4.0 * math.pi ** 2)
    return math.sqrt(float(2.0 * np.sum(gam_sq / js ** 2)))


def quasi_orthogonality_check(f: Observable, g: Observable,
                              l1: int, l2: int,
                              mmax: int = 2000) -> tuple[float, float]:
    """Check |int f(l1 x) conj(g(l2 x))| <= R(f, l2/l1) ||g||_2.

    Returns (lhs, rhs) as truncated evaluations; the assertion grants the
    left side its truncation tail, so genuine violations fail while the
    equality case (l1 = l2, f = g, both sides ||f||_2^2) passes.
    """
    if l2 < l1:
        raise ConfigError("need l2 >= l1")
    val, tail = resonance_integral(f, l1, g, l2, mmax=mmax)
    rhs = fourier_tail_norm(f, l2 / l1) * math.sqrt(float(g.norm_sq()))
    if val > rhs + tail + 1e-12:
        raise AssertionError(
            f"quasi-orthogonality violated: {val} > {rhs} + {tail}")
    return val, rhs


def block_variance_ratio(fs: list, ns: list, mmax: int = 2000) -> float:
    """int (sum_k f_k(n_k x))^2 dx / sum_k ||f_k||_2^2 via resonance sums.

    The numerator expands into exact diagonal norms plus pairwise resonance
    integrals (signed real parts, truncation tails included in neither side:
    tails are O(K^2/(rho mmax)) and reported by the caller's tolerance).
    """
    if len(fs) != len(ns):
        raise ConfigError("need one observable per frequency")
    diag = sum(float(f.norm_sq()) for f in fs)
    cross = 0.0
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            d = math.gcd(ns[i], ns[j])
            ka, kb = ns[j] // d, ns[i] // d
            cross += 2.0 * _resonance_sum(fs[i], ka, fs[j], kb, mmax)
    return (diag + cross) / diag


# ---------------------------------------------------------------------------
# Vector CLT
# ---------------------------------------------------------------------------

def covariance_2d(plan: SubsequencePlan, psi: VectorObservable,
                  n: int, samples: int, seed: int,
                  cov_tol: float = 0.1, dir_tol: float = 0.10) -> ExperimentReport:
    """Empirical covariance of n^{-1/2} (S_{L_n} psi1, S_{L_n} psi2) against
    diag(1/2, 1/2), plus directional variances (u^2+v^2)/2 for
    (u,v) in {(1,0), (0,1), (1,1)}.  Requires a parity-certified plan."""
    if not plan.certified.get("parity"):
        raise ConfigError("covariance_2d requires a parity-certified plan")
    if not 1 <= n <= plan.count:
        raise ConfigError("n outside plan range")
    sampler = StratifiedSampler(seed=seed, size=samples)
    nums = sampler.numerators()
    Ln = plan.L[n]
    ctx1 = ErgodicContext(psi.phi1, plan.trunc, sampler.den)
    ctx2 = ErgodicContext(psi.phi2, plan.trunc, sampler.den)
    v1 = np.array([float(ctx1.sum_at(int(m), Ln)) for m in nums]) / math.sqrt(n)
    v2 = np.array([float(ctx2.sum_at(int(m), Ln)) for m in nums]) / math.sqrt(n)
    cov = {
        "c11": float(np.mean(v1 * v1)),
        "c22": float(np.mean(v2 * v2)),
        "c12": float(np.mean(v1 * v2)),
    }
    directions = {}
    ok_dirs = True
    for (u, v) in ((1, 0), (0, 1), (1, 1)):
        var_uv = float(np.mean((u * v1 + v * v2) ** 2))
        pred = (u * u + v * v) / 2.0
        directions[f"({u},{v})"] = {"variance": var_uv, "prediction": pred}
        ok_dirs = ok_dirs and abs(var_uv - pred) <= dir_tol * pred
    ok_cov = (abs(cov["c11"] - 0.5) <= cov_tol
              and abs(cov["c22"] - 0.5) <= cov_tol
              and abs(cov["c12"]) <= cov_tol)
    return ExperimentReport(
        kind="vector_clt_covariance",
        empirical={**cov, "directions": directions},
        prediction={"covariance": [[0.5, 0.0], [0.0, 0.5]]},
        tolerance={"cov_entry": cov_tol, "direction_rel": dir_tol},
        passed=ok_cov and ok_dirs,
        seed=seed,
        plan_hash=plan.plan_hash(),
        extra={"n": n, "samples": samples, "observable": psi.label},
    )
