"""Ergodic sums S_N phi(x) = sum_{j<N} phi(x + j alpha) over a rational
truncation of alpha, computed exactly.

Two engines:

* ``direct`` -- literal summation, O(N); the oracle for small N.
* ``floorsum`` -- counts orbit visits to each piece of a step function with
  Euclidean floor sums, O(#jumps * log N) big-integer work.  This is what
  makes sums at N with hundreds of digits feasible: with everything written
  over a common denominator L,

      #{j < N : (A + j P) mod L < C}
          = sum_{j<N} ( floor((A + jP)/L) - floor((A - C + jP)/L) ),

  and each floor sum collapses by the Euclid recursion.  The sawtooth
  {x}-1/2 needs a single floor sum via sum {x + j alpha} = N x +
  alpha N(N-1)/2 - sum floor(x + j alpha).

The same module holds the exact piecewise profile of x -> S_n phi(x) for
moderate n (used for exact sup norms and exact L2 integrals), the
periodic-approximation error, and the Ostrowski bound certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .contfrac import RationalTruncation, ostrowski_digits
from .errors import ConfigError
from .observables import Observable, Sawtooth

__all__ = [
    "floor_sum",
    "count_visits",
    "ergodic_sum",
    "ErgodicSumResult",
    "ErgodicContext",
    "OrbitProfile",
    "orbit_sum_profile",
    "diff_profile",
    "approx_error_sq",
    "ostrowski_bound_check",
]


def floor_sum(n: int, a: int, b: int, c: int) -> int:
    """sum_{j=0}^{n-1} floor((a*j + b)/c) in O(log max(a,c)) integer steps.

    c must be >= 1; a and b may be negative (reduced first).
    """
    n, a, b, c = int(n), int(a), int(b), int(c)
    if c <= 0:
        raise ValueError(f"modulus c must be >= 1, got {c}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0
    ans = 0
    if a < 0:
        a2 = a % c
        ans -= n * (n - 1) // 2 * ((a2 - a) // c)
        a = a2
    if b < 0:
        b2 = b % c
        ans -= n * ((b2 - b) // c)
        b = b2
    while True:
        if a >= c:
            ans += n * (n - 1) // 2 * (a // c)
            a %= c
        if b >= c:
            ans += n * (b // c)
            b %= c
        y_max = a * n + b
        if y_max < c:
            return ans
        n, b = divmod(y_max, c)
        c, a = a, c


def _lcm(*vals: int) -> int:
    out = 1
    for v in vals:
        out = out * v // math.gcd(out, v)
    return out


def _residue_count_below(N: int, P: int, A: int, C: int, L: int) -> int:
    """#{j < N : (A + j P) mod L < C} for 0 <= C <= L."""
    if C <= 0:
        return 0
    if C >= L:
        return N
    return floor_sum(N, P, A, L) - floor_sum(N, P, A - C, L)


def count_visits(x, interval: tuple, N: int, trunc: RationalTruncation) -> int:
    """#{0 <= j < N : {x + j alpha} in [u, w)} exactly (alpha = p_M/q_M).

    ``interval`` is (u, w) with exact rational endpoints in [0, 1]; u > w is
    read as the wrap-around interval [u,1) + [0,w).
    """
    N = int(N)
    if N < 0:
        raise ValueError("N must be >= 0")
    if N == 0:
        return 0
    if N > 1:
        trunc.require_window(N - 1, "orbit length")
    u, w = Fraction(interval[0]), Fraction(interval[1])
    x = Fraction(x)
    x -= x.numerator // x.denominator
    L = _lcm(trunc.q, x.denominator, u.denominator, w.denominator)
    P = trunc.p * (L // trunc.q)
    A = x.numerator * (L // x.denominator)
    U = u.numerator * (L // u.denominator)
    W = w.numerator * (L // w.denominator)
    if u <= w:
        return (_residue_count_below(N, P, A, W, L)
                - _residue_count_below(N, P, A, U, L))
    return N - (_residue_count_below(N, P, A, U, L)
                - _residue_count_below(N, P, A, W, L))


@dataclass(frozen=True)
class ErgodicSumResult:
    value: object          # Fraction when exact, else float
    N: int
    engine: str            # "direct" | "floorsum"
    exact: bool


class ErgodicContext:
    """Precomputed integer data for repeated sums of one observable at one
    sample denominator.  ``sum_at(x_num, N)`` evaluates S_N phi(x_num/x_den).
    """

    def __init__(self, phi: Observable, trunc: RationalTruncation, x_den: int,
                 enforce_window: bool = True):
        if x_den < 1:
            raise ConfigError("sample denominator must be >= 1")
        self.phi = phi
        self.trunc = trunc
        self.x_den = int(x_den)
        # the window guards faithfulness to the irrational target; callers
        # rotating by a genuinely rational angle may disable it (the floor
        # sums themselves are exact at every N)
        self.enforce_window = enforce_window
        self.sawtooth = isinstance(phi, Sawtooth)
        if self.sawtooth:
            L = _lcm(trunc.q, self.x_den)
        else:
            dens = [b.denominator for b in phi.breakpoints]
            L = _lcm(trunc.q, self.x_den, *dens)
        self.L = L
        self.P = trunc.p * (L // trunc.q)
        self.x_scale = L // self.x_den
        if not self.sawtooth:
            # S_N = v_last * N + (v_0 - v_last) F(C_0=L->skip)... expressed as
            # v_last*N + sum over interior boundaries C_i of (v_{i-1}-v_i) F(C_i)
            # where F(C) = fs(A) - fs(A-C); the fs(A) coefficients telescope.
            bounds = [b.numerator * (L // b.denominator)
                      for b in phi.breakpoints[1:]]
            vals = list(phi.values)
            self._v_last = vals[-1]
            self._jump_terms = [
                (vals[i] - vals[i + 1], bounds[i]) for i in range(len(bounds))
            ]
            self._lead_coeff = sum(c for c, _ in self._jump_terms)
            self._exact = all(isinstance(v, (Fraction, int)) for v in vals)
        else:
            self._exact = True

    def sum_at(self, x_num: int, N: int):
        """S_N phi(x) for x = x_num/x_den reduced mod 1."""
        N = int(N)
        if N == 0:
            return Fraction(0) if self._exact else 0.0
        if N > 1 and self.enforce_window:
            self.trunc.require_window(N - 1, "orbit length")
        A = (int(x_num) * self.x_scale) % self.L
        L, P = self.L, self.P
        if self.sawtooth:
            fs = floor_sum(N, P, A, L)
            total = Fraction(A * N + P * (N * (N - 1) // 2) - L * fs, L)
            return total - Fraction(N, 2)
        fs_a = floor_sum(N, P, A, L)
        acc = self._v_last * N + self._lead_coeff * fs_a
        for coeff, C in self._jump_terms:
            acc -= coeff * floor_sum(N, P, A - C, L)
        return acc


def ergodic_sum(phi: Observable, x, N: int, trunc: RationalTruncation,
                engine: str = "floorsum") -> ErgodicSumResult:
    """S_N phi(x); the floorsum engine is exact at any N in the window."""
    x = Fraction(x)
    x -= x.numerator // x.denominator
    if engine == "direct":
        val = _direct_sum(phi, x, int(N), trunc)
        return ErgodicSumResult(val, int(N), "direct",
                                isinstance(val, Fraction))
    if engine != "floorsum":
        raise ConfigError(f"unknown engine {engine!r}")
    ctx = ErgodicContext(phi, trunc, x.denominator)
    val = ctx.sum_at(x.numerator, N)
    return ErgodicSumResult(val, int(N), "floorsum", isinstance(val, Fraction))


def _direct_sum(phi: Observable, x: Fraction, N: int, trunc: RationalTruncation):
    if N < 0:
        raise ValueError("N must be >= 0")
    if N > 1:
        trunc.require_window(N - 1, "orbit length")
    L = _lcm(trunc.q, x.denominator)
    P = trunc.p * (L // trunc.q)
    r = (x.numerator * (L // x.denominator)) % L
    if isinstance(phi, Sawtooth):
        total = Fraction(0)
        for _ in range(N):
            total += Fraction(r, L) - Fraction(1, 2)
            r = (r + P) % L
        return total
    bounds = [int(b * L) for b in phi.breakpoints]
    vals = phi.values
    exact = all(isinstance(v, (Fraction, int)) for v in vals)
    total = Fraction(0) if exact else 0.0
    import bisect
    for _ in range(N):
        total += vals[bisect.bisect_right(bounds, r) - 1]
        r = (r + P) % L
    return total


# ---------------------------------------------------------------------------
# Exact piecewise profile of x -> S_n phi(x) for moderate n
# ---------------------------------------------------------------------------

@dataclass
class OrbitProfile:
    """S(x) = slope * x + offsets[i] on [breaks[i], breaks[i+1]) (cyclic)."""

    breaks: list          # Fractions, breaks[0] == 0
    offsets: list         # Fraction/float per piece
    slope: int = 0

    def evaluate(self, x):
        x = Fraction(x)
        x -= x.numerator // x.denominator
        import bisect
        i = bisect.bisect_right(self.breaks, x) - 1
        return self.slope * x + self.offsets[i]

    def piece_bounds(self):
        for i, b in enumerate(self.breaks):
            hi = self.breaks[i + 1] if i + 1 < len(self.breaks) else Fraction(1)
            yield b, hi, self.offsets[i]

    def sup_abs(self):
        """Exact sup of |S| over the circle (piece endpoints suffice)."""
        best = None
        for lo, hi, c in self.piece_bounds():
            for val in (self.slope * lo + c, self.slope * hi + c):
                v = abs(val)
                if best is None or v > best:
                    best = v
        return best

    def integral_sq(self):
        """Exact integral of S^2 over [0,1)."""
        s = self.slope
        total = Fraction(0) if all(isinstance(c, (Fraction, int))
                                   for c in self.offsets) else 0.0
        for lo, hi, c in self.piece_bounds():
            if s == 0:
                total += c * c * (hi - lo)
            else:
                fhi, flo = s * hi + c, s * lo + c
                total += (fhi ** 3 - flo ** 3) / (3 * s)
        return total

    def integral(self):
        s = self.slope
        total = Fraction(0)
        for lo, hi, c in self.piece_bounds():
            total += c * (hi - lo)
            if s:
                total += s * (hi * hi - lo * lo) / 2
        return total


def _merge_jump_points(points):
    """Sort (position, jump) pairs, merging equal positions."""
    points.sort(key=lambda t: t[0])
    merged = []
    for pos, j in points:
        if merged and merged[-1][0] == pos:
            merged[-1][1] += j
        else:
            merged.append([pos, j])
    return [(p, j) for p, j in merged if j != 0]


def orbit_sum_profile(phi: Observable, n: int, rot: Fraction) -> OrbitProfile:
    """Exact profile of x -> sum_{j<n} phi(x + j*rot) for an exact rational
    rotation step ``rot``.  Cost O(n * #jumps * log); intended for moderate n.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    rot = Fraction(rot)
    rot -= rot.numerator // rot.denominator
    if isinstance(phi, Sawtooth):
        pts = []
        for j in range(n):
            t = (-j * rot) % 1
            pts.append((t, Fraction(-1)))
        jumps = _merge_jump_points(pts)
        slope = n
    else:
        base_jumps = phi.jumps()
        pts = []
        for t, jv in base_jumps.items():
            for j in range(n):
                pts.append(((t - j * rot) % 1, jv))
        jumps = _merge_jump_points(pts)
        slope = 0
    breaks = [Fraction(0)] + [p for p, _ in jumps if p != 0]
    # baseline at the midpoint of the first piece, by direct evaluation
    first_hi = breaks[1] if len(breaks) > 1 else Fraction(1)
    x0 = first_hi / 2
    s0 = sum(phi.evaluate(x0 + j * rot) for j in range(n))
    offsets = [s0 - slope * x0]
    jump_at = dict(jumps)
    for b in breaks[1:]:
        offsets.append(offsets[-1] + jump_at[b])
    # wrap consistency: accumulating all jumps around the circle returns to 0
    return OrbitProfile(breaks=breaks, offsets=offsets, slope=slope)


def diff_profile(p1: OrbitProfile, p2: OrbitProfile) -> OrbitProfile:
    """Profile of p1 - p2 on the merged breakpoint set."""
    breaks = sorted(set(p1.breaks) | set(p2.breaks))
    import bisect
    offs = []
    for b in breaks:
        i1 = bisect.bisect_right(p1.breaks, b) - 1
        i2 = bisect.bisect_right(p2.breaks, b) - 1
        offs.append(p1.offsets[i1] - p2.offsets[i2])
    return OrbitProfile(breaks=breaks, offsets=offs, slope=p1.slope - p2.slope)


# ---------------------------------------------------------------------------
# Periodic-approximation error
# ---------------------------------------------------------------------------

def approx_error_sq(phi: Observable, n: int, trunc: RationalTruncation,
                    mode: str = "exact", rmax: int = 2000,
                    cap: int = 400_000):
    """|| S_{q_n} phi - periodized transfer ||_2^2.

    exact mode: both x -> S_{q_n}phi(x) and x -> sum_j phi(x + j/q_n) are
    profiled exactly and the squared difference integrated piece by piece
    (for the sawtooth the linear parts cancel, leaving a pure step profile).

    series mode: the Fourier expansion of the difference, truncated at
    |r| <= rmax; returns (value, tail_bound).
    """
    qn = trunc.qs[n]
    if mode == "exact":
        if qn * 8 > cap:
            raise ConfigError(
                f"profile cap exceeded at q_n={qn}; use series mode")
        prof_a = orbit_sum_profile(phi, qn, trunc.value)
        prof_b = orbit_sum_profile(phi, qn, Fraction(1, qn))
        return diff_profile(prof_a, prof_b).integral_sq()
    if mode != "series":
        raise ConfigError(f"unknown mode {mode!r}")
    return _approx_error_series(phi, n, trunc, rmax)


def _sin_pi_mult(k: int, trunc: RationalTruncation) -> float:
    """sin(pi * k * alpha) with the angle reduced exactly mod 2."""
    num = (k * trunc.p) % (2 * trunc.q)
    return math.sin(math.pi * num / trunc.q)


def _approx_error_series(phi, n, trunc, rmax):
    qn = trunc.qs[n]
    # largest multiple of alpha used below is qn^2 * rmax
    trunc.require_window(qn * qn * rmax, "Fourier multiple")
    k = phi.kbound()
    total = 0.0
    for r in range(1, rmax + 1):
        g_mult = phi.fourier_gamma(r * qn)
        w_mult = abs(g_mult) ** 2 / r ** 2
        # |e^{i pi (qn-1) qn r alpha} * sin(pi qn^2 r alpha)/(qn sin(pi qn r alpha)) - 1|^2
        s_big = _sin_pi_mult(qn * qn * r, trunc)
        s_small = _sin_pi_mult(qn * r, trunc)
        phase_num = ((qn - 1) * qn * r * trunc.p) % (2 * trunc.q)
        phase = math.pi * phase_num / trunc.q
        z = complex(math.cos(phase), math.sin(phase)) * (s_big / (qn * s_small)) - 1.0
        total += 2.0 * w_mult * abs(z) ** 2
        if r % qn != 0:
            g = phi.fourier_gamma(r)
            ratio = _sin_pi_mult(qn * r, trunc) / _sin_pi_mult(r, trunc)
            total += 2.0 * (abs(g) ** 2 / r ** 2) * ratio ** 2
    # |z|^2 <= 4 and the non-multiple ratio is bounded by qn^2; both tails
    # decay like 1/r^2.
    tail = 2.0 * k * k * (4.0 + float(qn) ** 2) / rmax
    return total, tail


# ---------------------------------------------------------------------------
# Ostrowski bound certificate
# ---------------------------------------------------------------------------

def ostrowski_bound_check(phi: Observable, x, N: int,
                          trunc: RationalTruncation):
    """(|S_N phi(x)|, V(phi) * sum_k b_k) with the digits of N; asserts
    LHS <= RHS (sums over denominators are bounded blockwise)."""
    res = ergodic_sum(phi, x, N, trunc)
    lhs = abs(res.value)
    digits = ostrowski_digits(N, trunc)
    rhs = phi.variation() * digits.digit_sum()
    if lhs > rhs:
        raise AssertionError(
            f"Ostrowski bound violated: |S_N|={float(lhs)} > {float(rhs)}")
    return lhs, rhs
