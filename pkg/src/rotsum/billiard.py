"""Rectangular periodic billiard (Lorentz gas) at the diagonal direction.

Obstacles are a x b axis-aligned rectangles centered at the integer lattice,
with the small-obstacle condition a + b <= 1.  A unit-speed ball moves along
slopes +-1 and reflects specularly.  Every reflection toggles the slope, so
the second return to the outgoing-ray section splits into two invariant
copies; on the slope +1 copy the dynamics is conjugate to the rotation by

    alpha = a / (a + b)

via the chart used throughout this module.  With s = a + b, a slope +1 ray
x - y = (m - n) + d meets the obstacle family of diagonal (m - n) iff
|d| <= s/2, and an outgoing state is (direction NE/SW, offset d):

    chart:  NE -> chi = (d + s/2) / (2s) in (0, 1/2),
            SW -> chi = 1 - (d + s/2) / (2s) in (1/2, 1).

Two collisions advance chi by exactly alpha and displace the obstacle index
by 2 * Psi(chi), where the displacement takes the four values

    (0,1) on (0, (1-alpha)/2),   (1,0) on ((1-alpha)/2, 1/2),
    (0,-1) on (1/2, 1-alpha/2),  (-1,0) on (1-alpha/2, 1).

The ray tracer below is deliberately independent of that structure: it walks
x-slabs and intersects rectangles geometrically, in exact rational
arithmetic (slopes +-1 with rational data keep every hit point rational, and
corner hits are exact equality tests).  The cross-check of its cell sequence
against the arithmetic engine is therefore a genuine two-route test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .contfrac import RationalTruncation, from_list, truncation
from .errors import BoundaryError, ConfigError, SingularOrbitError
from .observables import VectorObservable, billiard_displacement
from .ergosum import ErgodicContext
from .sequences import SubsequencePlan
from .stats import ExperimentReport, covariance_2d

__all__ = [
    "ObstacleParams",
    "LatticeState",
    "PathEvent",
    "BilliardOrbit",
    "displacement",
    "psi_components",
    "cell_after",
    "cell_after_direct",
    "section_start",
    "ray_trace",
    "hitting_time",
    "hitting_time_profile",
    "estimate_c",
    "rational_truncation",
    "params_for_plan",
    "mild_hypothesis_values",
    "clt_experiment",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ObstacleParams:
    """Rectangle half-axes aligned sides a (width) and b (height), rational."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (0 < a < 1 and 0 < b < 1):
            raise ConfigError("sides must lie in (0,1)")
        if a + b > 1:
            raise ConfigError(f"small-obstacle condition violated: a+b = {a + b} > 1")

    @property
    def s(self) -> Fraction:
        return self.a + self.b

    @property
    def alpha(self) -> Fraction:
        return self.a / (self.a + self.b)

    @property
    def strict(self) -> bool:
        return self.s < 1


@dataclass(frozen=True)
class LatticeState:
    """Skew-product state: circle coordinate x and a lattice cell z."""

    x: Fraction
    z: tuple[int, int]


@dataclass(frozen=True)
class PathEvent:
    """One obstacle collision: Euclidean time, exact position, obstacle index,
    and which side was struck."""

    time: float
    t_exact: Fraction       # path length in units of |dx| (time = sqrt(2) t)
    position: tuple[Fraction, Fraction]
    obstacle: tuple[int, int]
    side: str               # left|right|top|bottom


@dataclass(frozen=True)
class BilliardOrbit:
    chi: Fraction
    events: tuple[PathEvent, ...]
    start: tuple[Fraction, Fraction]
    direction0: tuple[int, int]

    def cells(self) -> list[tuple[int, int]]:
        """Cell labels after each double collision: (O_{2j} - O_0)/2."""
        out = []
        for j in range(2, len(self.events) + 1, 2):
            om, on = self.events[j - 1].obstacle
            dm, dn = om - 0, on - 0
            if dm % 2 or dn % 2:
                raise AssertionError("obstacle displacement not even")
            out.append((dm // 2, dn // 2))
        return out

    def hitting_time(self) -> float:
        """Path length to the second obstacle collision."""
        if len(self.events) < 2:
            raise ConfigError("orbit too short")
        return self.events[1].time

    def hitting_time_exact(self) -> Fraction:
        if len(self.events) < 2:
            raise ConfigError("orbit too short")
        return self.events[1].t_exact


# ---------------------------------------------------------------------------
# Displacement cocycle and the arithmetic engine
# ---------------------------------------------------------------------------

def _breakpoints(alpha: Fraction) -> tuple[Fraction, ...]:
    return (Fraction(0), Fraction(1, 2) - alpha / 2, Fraction(1, 2),
            1 - alpha / 2)


def displacement(x, params: ObstacleParams) -> tuple[int, int]:
    """Psi(x): the four-valued cell step of one double collision."""
    x = Fraction(x)
    x -= x.numerator // x.denominator
    alpha = params.alpha
    if x in _breakpoints(alpha):
        raise BoundaryError(f"x = {x} is a displacement breakpoint")
    if x < Fraction(1, 2) - alpha / 2:
        return (0, 1)
    if x < Fraction(1, 2):
        return (1, 0)
    if x < 1 - alpha / 2:
        return (0, -1)
    return (-1, 0)


def psi_components(params: ObstacleParams) -> VectorObservable:
    """Psi = (psi1, psi2) as centered step observables."""
    return billiard_displacement(params.alpha)


def step(state: LatticeState, params: ObstacleParams) -> LatticeState:
    """One skew-product move (x, z) -> (x + alpha, z + Psi(x))."""
    dz = displacement(state.x, params)
    x = state.x + params.alpha
    x -= x.numerator // x.denominator
    return LatticeState(x, (state.z[0] + dz[0], state.z[1] + dz[1]))


def cell_after_direct(n: int, x, params: ObstacleParams) -> tuple[int, int]:
    """S(n, Psi)(x) by literal skew-product iteration (exact, O(n))."""
    st = LatticeState(Fraction(x), (0, 0))
    for _ in range(int(n)):
        st = step(st, params)
    return st.z


def rational_truncation(alpha: Fraction) -> RationalTruncation:
    """A truncation whose value is exactly the rational alpha (its full
    continued fraction), for driving the floor-sum engine at rational angles."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ConfigError("alpha must be in (0,1)")
    digits = []
    num, den = alpha.denominator, alpha.numerator  # expand 1/alpha
    while den:
        q, r = divmod(num, den)
        digits.append(q)
        num, den = den, r
    if digits and digits[-1] == 1 and len(digits) > 1:
        digits = digits[:-2] + [digits[-2] + 1]
    if len(digits) < 2:
        digits = digits[:-1] + [digits[-1] - 1, 1] if digits[-1] > 1 else digits + [1]
    spec = from_list(digits)
    tr = truncation(spec, len(digits))
    if tr.value != alpha:
        raise AssertionError("continued-fraction reconstruction failed")
    return tr


def cell_after(n: int, x, params: ObstacleParams,
               trunc: RationalTruncation | None = None) -> tuple[int, int]:
    """S(n, Psi)(x) via two exact floor-sum ergodic sums.

    ``trunc`` must evaluate to alpha = a/(a+b); omitted, the exact rational
    truncation of alpha is built (window = full rational period).
    """
    if trunc is None:
        trunc = rational_truncation(params.alpha)
    elif trunc.value != params.alpha:
        raise ConfigError("truncation value differs from a/(a+b)")
    # the rotation is genuinely rational here, so floor sums are exact at
    # every N and the truncation window does not apply
    vec = psi_components(params)
    x = Fraction(x)
    c1 = ErgodicContext(vec.phi1, trunc, x.denominator, enforce_window=False)
    c2 = ErgodicContext(vec.phi2, trunc, x.denominator, enforce_window=False)
    v1 = c1.sum_at(x.numerator, n)
    v2 = c2.sum_at(x.numerator, n)
    z1, z2 = int(v1), int(v2)
    if z1 != v1 or z2 != v2:
        raise AssertionError("displacement sums must be integers")
    return (z1, z2)


# ---------------------------------------------------------------------------
# Geometry: section chart and the exact ray tracer
# ---------------------------------------------------------------------------

def section_start(chi, params: ObstacleParams):
    """(position on the boundary of obstacle (0,0), direction) for the
    outgoing slope +1 section coordinate chi in (0,1) \\ {1/2}."""
    chi = Fraction(chi)
    chi -= chi.numerator // chi.denominator
    if chi == 0 or chi == Fraction(1, 2):
        raise BoundaryError("chi on the copy boundary")
    a, b, s = params.a, params.b, params.s
    if chi < Fraction(1, 2):
        d = 2 * s * chi - s / 2
        direction = (1, 1)
        if d <= (a - b) / 2:
            pos = (d + b / 2, b / 2)          # leaves through the top
        else:
            pos = (a / 2, a / 2 - d)          # leaves through the right side
    else:
        d = 2 * s * (1 - chi) - s / 2
        direction = (-1, -1)
        if d <= (b - a) / 2:
            pos = (-a / 2, -a / 2 - d)        # leaves through the left side
        else:
            pos = (d - b / 2, -b / 2)         # leaves through the bottom
    return pos, direction


def _first_hit(px: Fraction, py: Fraction, sx: int, sy: int,
               params: ObstacleParams, max_slabs: int = 256):
    """First obstacle intersection of the ray (px,py) + t(sx,sy), t > 0.

    Pure slab-walking geometry in exact rationals; raises
    ``SingularOrbitError`` on exact corner/tangent incidence.
    """
    a, b = params.a, params.b
    ha, hb = a / 2, b / 2
    m0 = math.floor(px) if sx > 0 else math.ceil(px)
    for k in range(max_slabs):
        m = m0 + sx * k
        # t-interval where the x-coordinate crosses the slab of obstacle column m
        if sx > 0:
            tx_lo, tx_hi = m - ha - px, m + ha - px
        else:
            tx_lo, tx_hi = px - (m + ha), px - (m - ha)
        if tx_hi <= 0:
            continue
        y_lo = py + sy * max(tx_lo, Fraction(0))
        y_hi = py + sy * tx_hi
        ylo, yhi = min(y_lo, y_hi), max(y_lo, y_hi)
        n_cands = range(math.ceil(ylo - hb), math.floor(yhi + hb) + 1)
        best = None
        for n in n_cands:
            if sy > 0:
                ty_lo, ty_hi = n - hb - py, n + hb - py
            else:
                ty_lo, ty_hi = py - (n + hb), py - (n - hb)
            t_enter = max(tx_lo, ty_lo)
            t_exit = min(tx_hi, ty_hi)
            if t_enter <= 0 or t_enter > t_exit:
                continue
            if t_enter == t_exit or tx_lo == ty_lo:
                raise SingularOrbitError(
                    f"corner/tangent hit at obstacle ({m},{n})")
            if best is None or t_enter < best[0]:
                if tx_lo > ty_lo:
                    side = "left" if sx > 0 else "right"
                else:
                    side = "bottom" if sy > 0 else "top"
                best = (t_enter, (m, n), side)
        if best is not None:
            t, obstacle, side = best
            return t, (px + sx * t, py + sy * t), obstacle, side
    raise SingularOrbitError("no obstacle found within the slab horizon")


def ray_trace(chi, params: ObstacleParams, collisions: int = 2) -> BilliardOrbit:
    """Event-driven diagonal billiard flow from the section coordinate chi.

    Returns the orbit with ``collisions`` obstacle hits; reflection flips the
    velocity component normal to the struck side.
    """
    if collisions < 1:
        raise ConfigError("need at least one collision")
    pos, (sx, sy) = section_start(chi, params)
    px, py = pos
    events = []
    t_total = Fraction(0)
    for _ in range(collisions):
        t, hit, obstacle, side = _first_hit(px, py, sx, sy, params)
        t_total += t
        events.append(PathEvent(
            time=float(t_total) * SQRT2,
            t_exact=t_total,
            position=hit,
            obstacle=obstacle,
            side=side,
        ))
        px, py = hit
        if side in ("left", "right"):
            sx = -sx
        else:
            sy = -sy
    return BilliardOrbit(chi=Fraction(chi), events=tuple(events),
                         start=pos, direction0=section_start(chi, params)[1])


def hitting_time(chi, params: ObstacleParams) -> float:
    """psi(chi): path length from the section point to the second collision."""
    return ray_trace(chi, params, collisions=2).hitting_time()


# ---------------------------------------------------------------------------
# The hitting-time observable as exact piecewise-linear data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseLinear:
    """g(x) = slopes[i] * x + intercepts[i] on [breaks[i], breaks[i+1]);
    the physical time is sqrt(2) * g."""

    breaks: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]
    intercepts: tuple[Fraction, ...]

    def evaluate(self, x) -> Fraction:
        x = Fraction(x)
        x -= x.numerator // x.denominator
        import bisect
        i = bisect.bisect_right(self.breaks, x) - 1
        return self.slopes[i] * x + self.intercepts[i]

    def mean(self) -> Fraction:
        total = Fraction(0)
        for i, lo in enumerate(self.breaks):
            hi = self.breaks[i + 1] if i + 1 < len(self.breaks) else Fraction(1)
            s, c = self.slopes[i], self.intercepts[i]
            total += s * (hi * hi - lo * lo) / 2 + c * (hi - lo)
        return total

    def fourier_gamma(self, r: int) -> complex:
        """gamma_r = r c_r of the centered function, from slopes and jumps."""
        if r == 0:
            raise ValueError("r != 0")
        two_pi = 2.0 * math.pi
        acc = 0j
        k = len(self.breaks)
        for i in range(k):
            lo = self.breaks[i]
            hi = self.breaks[i + 1] if i + 1 < k else Fraction(1)
            nxt = self.slopes[(i + 1) % k] * (hi % 1) + self.intercepts[(i + 1) % k]
            cur = self.slopes[i] * hi + self.intercepts[i]
            jump = float(nxt - cur)  # jump at the right edge of piece i
            ph = float((r * hi) % 1)
            acc += jump * complex(math.cos(-two_pi * ph), math.sin(-two_pi * ph))
            # slope contribution: integral of s * e^{-2 pi i r x} over the piece
            phl = float((r * lo) % 1)
            e_hi = complex(math.cos(-two_pi * ph), math.sin(-two_pi * ph))
            e_lo = complex(math.cos(-two_pi * phl), math.sin(-two_pi * phl))
            acc += float(self.slopes[i]) * (e_hi - e_lo) / (-2j * math.pi * r)
        return acc / (2j * math.pi)


def hitting_time_profile(params: ObstacleParams) -> PiecewiseLinear:
    """Exact piecewise-linear chart of psi/sqrt(2) in the section coordinate.

    Candidate breakpoints are the collision sub-case boundaries; slopes and
    intercepts are fitted from two exact ray traces per piece and validated
    at a third point.
    """
    a, b, s = params.a, params.b, params.s

    def chi_ne(d):
        return (d + s / 2) / (2 * s)

    def chi_sw(d):
        return 1 - (d + s / 2) / (2 * s)

    cand = {Fraction(0), Fraction(1, 2), Fraction(1)}
    for d in ((b - 3 * a) / 2, (b - a) / 2, (3 * b - a) / 2, (a - b) / 2):
        if -s / 2 <= d <= s / 2:
            cand.add(chi_ne(d))
    for d in ((a - 3 * b) / 2, (a - b) / 2, (3 * a - b) / 2, (b - a) / 2):
        if -s / 2 <= d <= s / 2:
            cand.add(chi_sw(d))
    breaks = sorted(v for v in cand if 0 <= v < 1)
    slopes, intercepts = [], []
    for i, lo in enumerate(breaks):
        hi = breaks[i + 1] if i + 1 < len(breaks) else Fraction(1)
        x1 = lo + (hi - lo) / 5
        x2 = lo + 3 * (hi - lo) / 5
        x3 = lo + 4 * (hi - lo) / 7
        y1 = ray_trace(x1, params, 2).hitting_time_exact()
        y2 = ray_trace(x2, params, 2).hitting_time_exact()
        slope = (y2 - y1) / (x2 - x1)
        intercept = y1 - slope * x1
        y3 = ray_trace(x3, params, 2).hitting_time_exact()
        if slope * x3 + intercept != y3:
            raise AssertionError(
                f"hitting time not affine on piece [{lo},{hi})")
        slopes.append(slope)
        intercepts.append(intercept)
    return PiecewiseLinear(tuple(breaks), tuple(slopes), tuple(intercepts))


def estimate_c(params: ObstacleParams, n_starts: int = 2000, seed: int = 0):
    """(monte_carlo, quadrature): mean hitting time by seeded random starts
    and by exact integration of the piecewise-linear chart."""
    rng = np.random.default_rng(seed)
    prof = hitting_time_profile(params)
    exact = float(prof.mean()) * SQRT2
    total = 0.0
    count = 0
    den = 2 ** 40
    while count < n_starts:
        chi = Fraction(int(rng.integers(1, den)), den)
        try:
            total += hitting_time(chi, params)
        except (SingularOrbitError, BoundaryError):
            continue
        count += 1
    return total / count, exact


# ---------------------------------------------------------------------------
# CLT experiment
# ---------------------------------------------------------------------------

def params_for_plan(trunc: RationalTruncation, scale: Fraction = Fraction(1)) -> ObstacleParams:
    """Obstacle sides realizing alpha = trunc.value: a = alpha*s, b = (1-alpha)*s."""
    scale = Fraction(scale)
    if not 0 < scale <= 1:
        raise ConfigError("scale must be in (0,1]")
    alpha = trunc.value
    return ObstacleParams(a=alpha * scale, b=(1 - alpha) * scale)


def mild_hypothesis_values(spec, ns) -> list[float]:
    """n^{-1/2} sum_{j <= ln n} a_{j+1} over the given horizons; tends to 0
    for tame quotient growth."""
    out = []
    for n in ns:
        j_max = int(math.log(n))
        total = sum(spec.a(j + 1) for j in range(1, j_max + 1))
        out.append(total / math.sqrt(n))
    return out


def clt_experiment(params: ObstacleParams, plan: SubsequencePlan, n: int,
                   samples: int, seed: int,
                   drift_ns=(10, 20, 40), rmax_drift: int = 20_000) -> ExperimentReport:
    """Vector CLT of the displacement cocycle along the plan, plus the
    hitting-time drift check ||psi0_{L_m}||_2^2 / m over drift positions.

    The drift norms use the truncated Fourier series of the centered
    piecewise-linear hitting time (truncation reported, not bounded: the
    astronomical L_m rules out exact integration)."""
    if plan.trunc.value != params.alpha:
        raise ConfigError("plan truncation does not drive this obstacle shape")
    vec = psi_components(params)
    report = covariance_2d(plan, vec, n, samples, seed)
    prof = hitting_time_profile(params)
    mean = prof.mean()
    from .variance import AlphaFourierTable
    table = AlphaFourierTable(plan.trunc, rmax_drift)
    gam2 = np.array([abs(prof.fourier_gamma(r)) ** 2
                     for r in range(1, rmax_drift + 1)])
    r2 = np.arange(1, rmax_drift + 1, dtype=np.float64) ** 2
    drift = {}
    for m in drift_ns:
        if m > plan.count:
            continue
        Lm = plan.L[m]
        val = float(2.0 * np.sum(gam2 / r2 * table.gn(Lm)))
        drift[str(m)] = 2.0 * val / m  # physical time scale: psi = sqrt2 * g
    report.kind = "billiard_clt"
    report.extra.update({
        "psi_mean_time": float(mean) * SQRT2,
        "psi0_norm_sq_over_n": drift,
        "drift_rmax": rmax_drift,
        "params": {"a": str(params.a), "b": str(params.b)},
    })
    report.extra["drift_bounded"] = (
        max(drift.values()) <= 4.0 * min(drift.values()) + 1e-9 if drift else None)
    return report
