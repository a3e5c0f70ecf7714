"""Fourier-side variance machinery for ergodic sums over a rotation.

The squared L2 norm of the sum S_n phi expands over frequencies as

    ||S_n phi||_2^2 = sum_{r != 0} |gamma_r|^2 / r^2 * G_n(r alpha),
    G_n(t) = sin^2(n pi t) / sin^2(pi t),

and the Cesaro mean over n has the closed form

    <G_n>(t) = (1/n) sum_{k<n} G_k(t)
             = (1/sin^2 pi t) * [ 1/2 - (1/4n) (1 + sin((2n-1) pi t)/sin(pi t)) ].

Angles are reduced exactly: with alpha = p/q frozen rational, n * r * alpha
mod 2 is integer arithmetic, so G_n is evaluated without float drift even
when n * r is large.  The exact piecewise profile (``ergosum``) is the
oracle of record; the Fourier backend is the scalable route with a reported
tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .contfrac import RationalTruncation
from .errors import ConfigError
from .observables import Observable, Sawtooth
from .ergosum import orbit_sum_profile

__all__ = [
    "gn_kernel",
    "gn_mean",
    "AlphaFourierTable",
    "norm_sq",
    "mean_variance",
    "bound_series",
    "diagnostic_inequalities",
    "VarianceProfile",
    "variance_profile",
]

_INT64_SAFE = 2 ** 62


def gn_kernel(n: int, t: float) -> float:
    """G_n(t) = sin^2(n pi t)/sin^2(pi t); G_n(integer) = n^2 (removable)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    tf = float(t) % 1.0
    s = math.sin(math.pi * tf)
    if abs(s) < 1e-14:
        return float(n * n)
    return (math.sin(math.pi * ((n * tf) % 2.0)) / s) ** 2


def _gn_mean_direct(n: int, t: float) -> float:
    return sum(gn_kernel(k, t) for k in range(n)) / n


def gn_mean(n: int, t: float) -> float:
    """<G_n>(t), Cesaro mean of G_0..G_{n-1}, via the closed form.

    Near t = 0 the closed form cancels catastrophically; below n*t ~ 1e-2
    the O(n) direct sum is used instead (exact limit (n-1)(2n-1)/6 at 0).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tf = float(t) % 1.0
    tf = min(tf, 1.0 - tf)
    if tf == 0.0:
        return (n - 1) * (2 * n - 1) / 6.0
    if n * tf < 1e-2:
        return _gn_mean_direct(n, tf)
    s = math.sin(math.pi * tf)
    ratio = math.sin(math.pi * (((2 * n - 1) * tf) % 2.0)) / s
    return (0.5 - (1.0 + ratio) / (4.0 * n)) / (s * s)


# ---------------------------------------------------------------------------
# Frequency tables
# ---------------------------------------------------------------------------

def _mult_mod(num: int, den: int, rmax: int) -> np.ndarray:
    """(r * num) mod den for r = 1..rmax, as float64-exact int64 when safe."""
    if den < _INT64_SAFE // max(rmax, 1):
        r = np.arange(1, rmax + 1, dtype=np.int64)
        return (r * np.int64(num)) % np.int64(den)
    out = np.empty(rmax, dtype=np.float64)
    cur = 0
    for i in range(rmax):
        cur = (cur + num) % den
        out[i] = cur / den
    return out  # already fractional


class AlphaFourierTable:
    """Distances ||r alpha|| and exactly-reduced kernel angles, r = 1..rmax."""

    def __init__(self, trunc: RationalTruncation, rmax: int):
        trunc.require_window(rmax, "Fourier frequency")
        self.trunc = trunc
        self.rmax = rmax
        p, q = trunc.p, trunc.q
        self._int64 = q < _INT64_SAFE // max(rmax, 1)
        if self._int64:
            self.num = _mult_mod(p, q, rmax)          # int64 residues
            self.frac = self.num.astype(np.float64) / q
            # exact integer min keeps tiny distances at full relative accuracy
            self.dist = np.minimum(self.num, np.int64(q) - self.num).astype(
                np.float64) / q
        else:
            self.frac = _mult_mod(p, q, rmax)          # float fractions
            self.num = None
            self.dist = np.minimum(self.frac, 1.0 - self.frac)
        self.sin_dist = np.sin(np.pi * self.dist)

    def _angle_frac(self, mult: int) -> np.ndarray:
        """{mult * r * alpha} reduced mod 2, as float in [0,2)."""
        q = self.trunc.q
        if self._int64 and mult < _INT64_SAFE // q:
            return ((np.int64(mult) * self.num) % np.int64(2 * q)).astype(
                np.float64) / q
        # fallback: exact python loop on residues
        p = self.trunc.p
        step = (mult * p) % (2 * q)
        out = np.empty(self.rmax)
        cur = 0
        for i in range(self.rmax):
            cur = (cur + step) % (2 * q)
            out[i] = cur / q
        return out

    def gn(self, n: int) -> np.ndarray:
        """G_n(||r alpha||) for r = 1..rmax, exact angle reduction."""
        s_num = np.sin(np.pi * self._angle_frac(n))
        return (s_num / self.sin_dist) ** 2

    def gn_mean(self, n: int) -> np.ndarray:
        # G_k(t) = G_k(1-t), so the closed form may be evaluated at {r alpha}
        # or at the distance interchangeably; the exactly-reduced angle feeds
        # the oscillatory numerator.
        t = self.dist
        s = self.sin_dist
        ratio = np.sin(np.pi * self._angle_frac(2 * n - 1))
        vals = (0.5 - (1.0 + ratio / s) / (4.0 * n)) / (s * s)
        small = n * t < 1e-2
        if np.any(small):
            idx = np.nonzero(small)[0]
            for i in idx:
                vals[i] = _gn_mean_direct(n, float(t[i]))
        return vals


def _gamma_sq_table(phi: Observable, rmax: int) -> np.ndarray:
    """|gamma_r|^2 for r = 1..rmax."""
    if isinstance(phi, Sawtooth):
        return np.full(rmax, 1.0 / (4.0 * math.pi ** 2))
    acc = np.zeros(rmax, dtype=complex)
    for t, j in phi.jumps().items():
        fr = _mult_mod(t.numerator % t.denominator, t.denominator, rmax)
        if fr.dtype != np.float64 or np.max(fr) > 1.0:
            fr = fr.astype(np.float64) / t.denominator
        acc += float(j) * np.exp(-2j * np.pi * fr)
    g = acc / (2j * math.pi)
    return (g * g.conjugate()).real


def norm_sq(phi: Observable, n: int, trunc: RationalTruncation,
            mode: str = "fourier", rmax: int | None = None,
            cap: int = 400_000):
    """||S_n phi||_2^2.

    fourier mode returns (value, tail_bound) with the series truncated at
    rmax (default max(20000, 100 n)); tail <= 2 K^2 n^2 / rmax.
    exact mode returns (Fraction, 0) by piecewise integration (needs
    n * #jumps under the enumeration cap).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return (Fraction(0), 0) if mode == "exact" else (0.0, 0.0)
    if mode == "exact":
        npieces = n * (1 if isinstance(phi, Sawtooth)
                       else len(phi.breakpoints))
        if npieces > cap:
            raise ConfigError(f"profile cap exceeded (n={n}); use fourier mode")
        prof = orbit_sum_profile(phi, n, trunc.value)
        return prof.integral_sq(), 0
    if mode != "fourier":
        raise ConfigError(f"unknown mode {mode!r}")
    if rmax is None:
        rmax = max(20_000, 100 * n)
    table = AlphaFourierTable(trunc, rmax)
    gam2 = _gamma_sq_table(phi, rmax)
    r = np.arange(1, rmax + 1, dtype=np.float64)
    value = float(2.0 * np.sum(gam2 / r ** 2 * table.gn(n)))
    k = phi.kbound()
    tail = 2.0 * k * k * float(n) ** 2 / rmax
    return value, tail


def mean_variance(phi: Observable, n: int, trunc: RationalTruncation,
                  rmax: int | None = None) -> float:
    """<D phi>_n = (1/n) sum_{k<n} ||S_k phi||_2^2 via the closed-form kernel
    mean (avoids the O(n) sum of kernels per frequency)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if rmax is None:
        rmax = max(20_000, 100 * n)
    table = AlphaFourierTable(trunc, rmax)
    gam2 = _gamma_sq_table(phi, rmax)
    r = np.arange(1, rmax + 1, dtype=np.float64)
    return float(2.0 * np.sum(gam2 / r ** 2 * table.gn_mean(n)))


def bound_series(phi: Observable, ell: int, trunc: RationalTruncation):
    """(lower, upper) variance scales at level ell:

        lower = sum_{j<ell} |gamma_{q_j}|^2 a_{j+1}^2
        upper = K^2 * sum_{j<=ell} a_{j+1}^2
    """
    if ell >= trunc.level:
        raise ConfigError("ell must be < truncation level")
    lower = 0.0
    for j in range(ell):
        g = phi.fourier_gamma(trunc.qs[j])
        lower += (g.real * g.real + g.imag * g.imag) * trunc.a(j + 1) ** 2
    k = phi.kbound()
    upper = k * k * sum(trunc.a(j + 1) ** 2 for j in range(ell + 1))
    return lower, upper


def level_of(n: int, trunc: RationalTruncation) -> int:
    """ell with q_ell <= n < q_{ell+1}."""
    ell = 0
    while ell + 1 < len(trunc.qs) and trunc.qs[ell + 1] <= n:
        ell += 1
    return ell


# ---------------------------------------------------------------------------
# Lemma-level inequality diagnostics
# ---------------------------------------------------------------------------

def diagnostic_inequalities(trunc: RationalTruncation, n: int, m: int,
                            kmax: int = 100_000) -> dict:
    """Checks three repartition inequalities for the orbit of 0.

    (i)   sum_{k=1}^{q_n - 1} 1/(k^2 ||k a||^2) <= 6 sum_{j<n} (q_{j+1}/q_j)^2
          (exact rational arithmetic on both sides);
    (ii)  sum_{k >= q_n, ||k a|| <= 1/m} 1/k^2 <= 4 (1/(m q_n) + 1/q_n^2);
    (iii) sum_{k >= q_n, ||k a|| >= 1/m} 1/(k^2 ||k a||^2)
              <= 4 m/q_n + 8 m^2/q_n^2.

    The constants in (ii)/(iii) come from the Denjoy-Koksma block argument
    applied to the window indicator and to x^-2 on [1/m, 1/2].  The infinite
    sums are truncated at ``kmax`` and the truncation tails (1/kmax and
    m^2/kmax) are added to the left-hand sides before asserting.
    """
    if m < 3:
        raise ConfigError("m must be >= 3")
    qn = trunc.qs[n]
    # the scan cannot leave the exact window; a shorter scan only enlarges
    # the (still valid) truncation tails added below
    kmax = min(kmax, trunc.validity_bound - 1)
    if qn > kmax:
        raise ConfigError("q_n beyond the scan range")
    # (i) exact
    lhs1 = Fraction(0)
    for k in range(1, qn):
        d = trunc.distance(k)
        lhs1 += Fraction(1, k * k) / (d * d)
    rhs1 = 6 * sum(Fraction(trunc.qs[j + 1], trunc.qs[j]) ** 2 for j in range(n))
    ok1 = lhs1 <= rhs1
    # (ii)/(iii) vectorized floats with exact residues
    table = AlphaFourierTable(trunc, kmax)
    dist = table.dist
    k = np.arange(1, kmax + 1, dtype=np.float64)
    sel = slice(qn - 1, kmax)
    close = dist[sel] <= 1.0 / m
    inv_k2 = 1.0 / k[sel] ** 2
    lhs2 = float(np.sum(inv_k2[close])) + 1.0 / kmax
    rhs2 = 4.0 * (1.0 / (m * qn) + 1.0 / qn ** 2)
    ok2 = lhs2 <= rhs2
    far = ~close
    lhs3 = float(np.sum(inv_k2[far] / dist[sel][far] ** 2)) + m * m / kmax
    rhs3 = 4.0 * m / qn + 8.0 * m * m / qn ** 2
    ok3 = lhs3 <= rhs3
    report = {
        "orbit_sum": (float(lhs1), float(rhs1), ok1),
        "close_frequencies": (lhs2, rhs2, ok2),
        "far_frequencies": (lhs3, rhs3, ok3),
    }
    if not (ok1 and ok2 and ok3):
        raise AssertionError(f"repartition inequality violated: {report}")
    return report


# ---------------------------------------------------------------------------
# Profiles over n-ranges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarianceProfile:
    ns: tuple[int, ...]
    norm_sq: tuple[float, ...]
    mean_variance: tuple[float, ...]
    lower_series: tuple[float, ...]
    upper_series: tuple[float, ...]
    levels: tuple[int, ...]


def variance_profile(phi: Observable, trunc: RationalTruncation,
                     ns, rmax: int | None = None) -> VarianceProfile:
    ns = tuple(int(v) for v in ns)
    if any(v < 1 for v in ns):
        raise ConfigError("profile indices must be >= 1")
    rm = rmax or max(20_000, 100 * max(ns))
    table = AlphaFourierTable(trunc, rm)
    gam2 = _gamma_sq_table(phi, rm)
    r2 = np.arange(1, rm + 1, dtype=np.float64) ** 2
    w = gam2 / r2
    norms, means, lows, ups, lvls = [], [], [], [], []
    for n in ns:
        norms.append(float(2.0 * np.sum(w * table.gn(n))))
        means.append(float(2.0 * np.sum(w * table.gn_mean(n))))
        ell = level_of(n, trunc)
        lo, up = bound_series(phi, ell, trunc) if ell >= 1 else (0.0, 0.0)
        lows.append(lo)
        ups.append(up)
        lvls.append(ell)
    return VarianceProfile(ns, tuple(norms), tuple(means), tuple(lows),
                           tuple(ups), tuple(lvls))
