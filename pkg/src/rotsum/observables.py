"""Zero-mean bounded-variation observables on the circle.

Two concrete kinds:

* ``StepFunction`` -- piecewise constant with exact rational breakpoints
  (closed-left / open-right pieces; the value at a breakpoint follows the
  piece to its right).  The variation is the cyclic sum of absolute jumps,
  wrap at 0 included, and the Fourier coefficients have the closed form

      c_r = gamma_r / r,   gamma_r = (1 / 2 pi i) * sum_jumps J * e^{-2 pi i r t},

  so sup_r |gamma_r| <= V/(2 pi) =: K.

* ``Sawtooth`` -- the centered fractional part {x} - 1/2, whose gamma_r is
  the constant i/(2 pi).  It is the normalizing observable for the variance
  machinery and is exactly invariant under the periodization transfer.

The periodization transfer ("hat") of an observable at modulus l is

    hat_phi_l(x) = sum_{r != 0} (gamma_{r l} / r) e^{2 pi i r x},
    hat_phi_l(l x) = sum_{j < l} phi(x + j/l),

which for a step function is again a step function with at most as many
breakpoints (each breakpoint t maps to {l t}).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import ConfigError

__all__ = [
    "StepFunction",
    "Sawtooth",
    "Observable",
    "VectorObservable",
    "SmoothnessBudget",
    "evaluate",
    "fourier_gamma",
    "catalog",
    "hat_observable",
    "hat_norm_sq",
    "PHI0_HAT_NORM_SQ",
]

TWO_PI = 2.0 * math.pi

# Per-term hat norm of the centered fractional part: sum_{r!=0} (1/4pi^2)/r^2
# = (1/4pi^2) * (pi^2/3) = 1/12, independent of the modulus.
PHI0_HAT_NORM_SQ = 1.0 / 12.0


def _frac(x) -> Fraction | float:
    if isinstance(x, Fraction):
        return x - (x.numerator // x.denominator)
    if isinstance(x, int):
        return Fraction(0)
    return x - math.floor(x)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant observable; ``values[i]`` holds on
    [breakpoints[i], breakpoints[i+1]) with the last piece wrapping to 1.

    Breakpoints are exact rationals in [0,1) with breakpoints[0] == 0.
    Values may be Fractions (exact ergodic sums) or floats.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple  # Fraction or float per piece
    label: str = "step"

    def __post_init__(self):
        if not self.breakpoints or self.breakpoints[0] != 0:
            raise ConfigError("breakpoints must start at 0")
        if any(not 0 <= b < 1 for b in self.breakpoints):
            raise ConfigError("breakpoints must lie in [0,1)")
        if any(b2 <= b1 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ConfigError("breakpoints must be strictly increasing")
        if len(self.values) != len(self.breakpoints):
            raise ConfigError("need one value per piece")

    # -- basic structure ----------------------------------------------------

    def piece_index(self, x) -> int:
        x = _frac(x)
        lo, hi = 0, len(self.breakpoints)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.breakpoints[mid] <= x:
                lo = mid
            else:
                hi = mid
        return lo

    def evaluate(self, x):
        return self.values[self.piece_index(x)]

    def lengths(self) -> tuple[Fraction, ...]:
        bs = self.breakpoints
        out = [bs[i + 1] - bs[i] for i in range(len(bs) - 1)]
        out.append(1 - bs[-1])
        return tuple(out)

    def mean(self):
        return sum(v * l for v, l in zip(self.values, self.lengths()))

    def jumps(self) -> dict[Fraction, object]:
        """Jump (value_right - value_left) at each breakpoint, wrap included."""
        out = {}
        k = len(self.values)
        for i, b in enumerate(self.breakpoints):
            j = self.values[i] - self.values[(i - 1) % k]
            if j != 0:
                out[b] = j
        return out

    def variation(self):
        """Cyclic total variation: sum of |jumps| including the wrap at 0."""
        k = len(self.values)
        return sum(abs(self.values[i] - self.values[(i - 1) % k])
                   for i in range(k))

    def kbound(self) -> float:
        """K with |r c_r| <= K for all r != 0; from jumps, K = V/(2 pi)."""
        return float(self.variation()) / TWO_PI

    def norm_sq(self):
        """Exact squared L2 norm."""
        return sum(v * v * l for v, l in zip(self.values, self.lengths()))

    def sup_abs(self):
        return max(abs(v) for v in self.values)

    # -- Fourier ------------------------------------------------------------

    def fourier_gamma(self, r: int) -> complex:
        """gamma_r = r c_r via the jump closed form; |gamma_r| <= K."""
        if r == 0:
            raise ValueError("gamma_r is defined for r != 0")
        acc = 0j
        for t, j in self.jumps().items():
            # exact reduction of r*t mod 1 keeps the phase accurate for huge r
            ph = _frac(r * t) if isinstance(t, Fraction) else (r * t) % 1
            acc += float(j) * cmath.exp(-2j * math.pi * float(ph))
        return acc / (2j * math.pi)

    def shifted(self, delta: Fraction) -> "StepFunction":
        """The observable x -> phi(x + delta), breakpoints renormalized."""
        pieces = sorted(
            (_frac(b - delta), v) for b, v in zip(self.breakpoints, self.values)
        )
        bs = [b for b, _ in pieces]
        vs = [v for _, v in pieces]
        if bs[0] != 0:
            bs.insert(0, Fraction(0))
            vs.insert(0, vs[-1])
        return StepFunction(tuple(bs), tuple(vs), label=f"{self.label}+shift")


@dataclass(frozen=True)
class Sawtooth:
    """The centered fractional part {x} - 1/2."""

    label: str = "phi0"

    def evaluate(self, x):
        return _frac(x) - Fraction(1, 2)

    def mean(self):
        return Fraction(0)

    def variation(self):
        # cyclic convention: continuous rise 1 plus the wrap jump of 1
        return Fraction(2)

    def kbound(self) -> float:
        return 1.0 / TWO_PI

    def norm_sq(self):
        return Fraction(1, 12)

    def sup_abs(self):
        return Fraction(1, 2)

    def fourier_gamma(self, r: int) -> complex:
        if r == 0:
            raise ValueError("gamma_r is defined for r != 0")
        return 1j / TWO_PI  # -1/(2 pi i)


Observable = Union[StepFunction, Sawtooth]


@dataclass(frozen=True)
class VectorObservable:
    """Pair of scalar observables sharing the same rotation."""

    phi1: Observable
    phi2: Observable
    label: str = "vector"

    @property
    def components(self) -> tuple[Observable, Observable]:
        return (self.phi1, self.phi2)


@dataclass(frozen=True)
class SmoothnessBudget:
    """Uniform regularity data: sup-norm and L2-norm bounds plus the Fourier
    tail envelope R(f, t) <= C_R t^{-gamma} (gamma = 1/2, C_R = 2K for BV)."""

    m_inf: float
    phi2: float
    c_r: float
    gamma: float = 0.5

    def __post_init__(self):
        if not (self.m_inf > 0 and self.phi2 > 0 and self.c_r > 0 and self.gamma > 0):
            raise ConfigError("all budget entries must be finite and positive")

    @staticmethod
    def from_observable(phi: Observable) -> "SmoothnessBudget":
        return SmoothnessBudget(
            m_inf=float(phi.sup_abs()),
            phi2=math.sqrt(float(phi.norm_sq())),
            c_r=2.0 * phi.kbound(),
        )

    def tail_envelope(self, t: float) -> float:
        return self.c_r * t ** (-self.gamma)


# ---------------------------------------------------------------------------
# Module-level conveniences
# ---------------------------------------------------------------------------

def evaluate(phi: Observable, x):
    """phi({x}); the piece containing {x} decides (closed-left/open-right)."""
    return phi.evaluate(x)


def fourier_gamma(phi: Observable, r: int) -> complex:
    return phi.fourier_gamma(r)


def _step_from_intervals(intervals, label: str) -> StepFunction:
    """Centered sum of v * 1_{[u,w)}; intervals are (u, w, v) with u < w.

    Builds the breakpoint partition and subtracts the mean so the result is
    exactly centered.
    """
    points = {Fraction(0)}
    for u, w, _ in intervals:
        points.add(Fraction(u))
        points.add(Fraction(w) if w < 1 else Fraction(0))
    bs = sorted(points)
    vals = []
    for i, b in enumerate(bs):
        hi = bs[i + 1] if i + 1 < len(bs) else Fraction(1)
        mid = (b + hi) / 2
        v = Fraction(0)
        for u, w, coeff in intervals:
            if u <= mid < w:
                v += Fraction(coeff)
        vals.append(v)
    mean = sum(
        v * ((bs[i + 1] if i + 1 < len(bs) else Fraction(1)) - bs[i])
        for i, v in enumerate(vals)
    )
    vals = [v - mean for v in vals]
    # merge equal neighbours (cyclically irrelevant duplicates keep V honest)
    mbs, mvs = [bs[0]], [vals[0]]
    for b, v in zip(bs[1:], vals[1:]):
        if v == mvs[-1]:
            continue
        mbs.append(b)
        mvs.append(v)
    return StepFunction(tuple(mbs), tuple(mvs), label=label)


def indicator(beta: Fraction) -> StepFunction:
    """1_{[0,beta)} - beta."""
    beta = Fraction(beta)
    if not 0 < beta < 1:
        raise ConfigError("beta must be in (0,1)")
    return _step_from_intervals([(Fraction(0), beta, 1)], f"indicator(beta={beta})")


def half() -> StepFunction:
    """1_{[0,1/2)} - 1_{[1/2,1)}."""
    return _step_from_intervals(
        [(Fraction(0), Fraction(1, 2), 1), (Fraction(1, 2), Fraction(1), -1)],
        "half",
    )


def double_interval(beta: Fraction, gamma: Fraction) -> StepFunction:
    """1_{[0,beta)} - 1_{[gamma, gamma+beta)} (second interval mod 1)."""
    beta, gamma = Fraction(beta), Fraction(gamma)
    if not (0 < beta < 1 and 0 < gamma < 1):
        raise ConfigError("beta, gamma must be in (0,1)")
    intervals = [(Fraction(0), beta, 1)]
    end = gamma + beta
    if end <= 1:
        intervals.append((gamma, end, -1))
    else:
        intervals.append((gamma, Fraction(1), -1))
        intervals.append((Fraction(0), end - 1, -1))
    return _step_from_intervals(intervals, f"double(beta={beta},gamma={gamma})")


def half_shifted(beta: Fraction) -> StepFunction:
    """1_{[0,beta)} - 1_{[1/2, 1/2+beta)}: only odd frequencies survive."""
    beta = Fraction(beta)
    if not 0 < beta < Fraction(1, 2):
        raise ConfigError("beta must be in (0,1/2)")
    return double_interval(beta, Fraction(1, 2))


def billiard_pair(alpha: Fraction) -> VectorObservable:
    """The odd-frequency pair with widths alpha/2 and 1/2 - alpha/2."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ConfigError("alpha must be in (0,1)")
    phi1 = half_shifted(alpha / 2)
    phi2 = half_shifted(Fraction(1, 2) - alpha / 2)
    return VectorObservable(phi1, phi2, label=f"billiard_pair(alpha={alpha})")


def billiard_displacement(alpha: Fraction) -> VectorObservable:
    """Cell-displacement components of the diagonal billiard:
    psi1 = 1_{[1/2-a/2, 1/2)} - 1_{[1-a/2, 1)},
    psi2 = 1_{[0, 1/2-a/2)} - 1_{[1/2, 1-a/2)}   (a = alpha)."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ConfigError("alpha must be in (0,1)")
    h = alpha / 2
    psi1 = _step_from_intervals(
        [(Fraction(1, 2) - h, Fraction(1, 2), 1), (1 - h, Fraction(1), -1)],
        f"psi1(alpha={alpha})",
    )
    psi2 = _step_from_intervals(
        [(Fraction(0), Fraction(1, 2) - h, 1), (Fraction(1, 2), 1 - h, -1)],
        f"psi2(alpha={alpha})",
    )
    return VectorObservable(psi1, psi2, label=f"billiard_displacement(alpha={alpha})")


_CATALOG = {
    "phi0": lambda **kw: Sawtooth(),
    "indicator": lambda **kw: indicator(kw["beta"]),
    "half": lambda **kw: half(),
    "double_interval": lambda **kw: double_interval(kw["beta"], kw["gamma"]),
    "half_shifted": lambda **kw: half_shifted(kw["beta"]),
    "billiard_pair": lambda **kw: billiard_pair(kw["alpha"]),
    "billiard_displacement": lambda **kw: billiard_displacement(kw["alpha"]),
}


def catalog(name: str, **params):
    """Named observables; interval parameters are exact rationals."""
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise ConfigError(
            f"unknown observable {name!r}; known: {sorted(_CATALOG)}") from None
    try:
        return builder(**params)
    except KeyError as exc:
        raise ConfigError(f"observable {name!r} missing parameter {exc}") from None


# ---------------------------------------------------------------------------
# Periodization transfer
# ---------------------------------------------------------------------------

def hat_observable(phi: Observable, ell: int, cap: int = 200_000) -> Observable:
    """hat_phi_ell with hat_phi_ell(ell x) = sum_{j<ell} phi(x + j/ell).

    For a step function the breakpoints are {ell t mod 1}; enumeration costs
    ell * (#pieces) evaluations and is refused beyond ``cap`` (use
    ``hat_norm_sq`` for the Fourier route instead).
    """
    if ell < 1:
        raise ConfigError("ell must be >= 1")
    if isinstance(phi, Sawtooth):
        return phi  # gamma_{r ell} = gamma_r: the transfer fixes the sawtooth
    if ell == 1:
        return phi
    if ell * len(phi.breakpoints) > cap:
        raise ConfigError(
            f"hat enumeration cap exceeded (ell={ell}); use hat_norm_sq")
    bs = sorted({_frac(ell * t) for t in phi.breakpoints} | {Fraction(0)})
    vals = []
    for i, b in enumerate(bs):
        hi = bs[i + 1] if i + 1 < len(bs) else Fraction(1)
        y = (b + hi) / 2
        vals.append(sum(phi.evaluate((y + j) / ell) for j in range(ell)))
    mbs, mvs = [bs[0]], [vals[0]]
    for b, v in zip(bs[1:], vals[1:]):
        if v == mvs[-1]:
            continue
        mbs.append(b)
        mvs.append(v)
    return StepFunction(tuple(mbs), tuple(mvs), label=f"hat({phi.label},{ell})")


def _phase_fracs(theta: Fraction, rmax: int):
    """{r * theta} for r = 1..rmax as float64, with exact reduction.

    Uses vectorized int64 residues when r*num fits; otherwise an incremental
    big-integer walk (still exact, just slower).
    """
    import numpy as np

    num = theta.numerator % theta.denominator
    den = theta.denominator
    if den < (2 ** 62) // max(rmax, 1):
        r = np.arange(1, rmax + 1, dtype=np.int64)
        return ((r * np.int64(num)) % np.int64(den)).astype(np.float64) / den
    out = np.empty(rmax, dtype=np.float64)
    cur = 0
    for i in range(rmax):
        cur = (cur + num) % den
        out[i] = cur / den
    return out


def gamma_array(phi: Observable, stride, rmax: int):
    """gamma_{stride * r} for r = 1..rmax as a complex vector.

    ``stride`` may be an arbitrarily large integer (or Fraction-compatible):
    each jump phase is reduced exactly once to theta = {stride * t} and then
    walked vectorially.
    """
    import numpy as np

    if isinstance(phi, Sawtooth):
        return np.full(rmax, 1j / TWO_PI, dtype=complex)
    acc = np.zeros(rmax, dtype=complex)
    for t, j in phi.jumps().items():
        theta = _frac(stride * t)
        acc += float(j) * np.exp(-2j * math.pi * _phase_fracs(theta, rmax))
    return acc / (2j * math.pi)


def hat_norm_sq(phi: Observable, ell: int, rmax: int = 4000) -> tuple[float, float]:
    """(value, tail_bound) for ||hat_phi_ell||_2^2 = sum_{r != 0} |gamma_{r ell}|^2 / r^2.

    The sawtooth is exact (1/12, tail 0).  Otherwise the series is truncated
    at |r| <= rmax with tail <= 2 K^2 / rmax.  Phases of gamma_{r ell} are
    reduced exactly even when ell has hundreds of digits.
    """
    import numpy as np

    if ell < 1:
        raise ConfigError("ell must be >= 1")
    if isinstance(phi, Sawtooth):
        return PHI0_HAT_NORM_SQ, 0.0
    k = phi.kbound()
    g = gamma_array(phi, ell, rmax)
    gam_sq = (g * g.conjugate()).real
    r = np.arange(1, rmax + 1, dtype=np.float64)
    total = float(2.0 * np.sum(gam_sq / (r * r)))
    return total, 2.0 * k * k / rmax
