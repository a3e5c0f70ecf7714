"""Exact continued-fraction engine.

An irrational rotation number alpha is specified by its partial quotients
a_1, a_2, ... (``PartialQuotientSpec``).  All downstream arithmetic uses the
"truncate and exactify" scheme: pick a level M beyond every index an
experiment will touch, treat alpha as exactly p_M/q_M, and compute in exact
rationals (``RationalTruncation``).  For k < q_{M-1} the rotation by p_M/q_M
is combinatorially indistinguishable from the rotation by alpha, so counting
arguments are exact; outside that window the API raises ``PrecisionError``
rather than silently degrading.

Convergents satisfy

    q_{n+1} = a_{n+1} q_n + q_{n-1},   p_{n+1} = a_{n+1} p_n + p_{n-1},
    p_{n-1} q_n - p_n q_{n-1} = (-1)^n,

with p_{-1}=1, p_0=0, q_{-1}=0, q_0=1.  Everything is big-integer exact:
designed rotation numbers used by the subsequence experiments have
denominators with hundreds of digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import ConfigError, PrecisionError, SpecExhaustedError

__all__ = [
    "PartialQuotientSpec",
    "Convergent",
    "RationalTruncation",
    "OstrowskiDigits",
    "convergents",
    "nearest_integer_distance",
    "ostrowski_digits",
    "design_alpha",
    "beta_from_ostrowski",
    "golden",
    "sqrt2m1",
    "from_list",
    "from_rule",
    "clt_design_rule",
    "parity_design_rule",
]


def _next_odd(n: int) -> int:
    return n if n % 2 == 1 else n + 1


# ---------------------------------------------------------------------------
# Named rule registry.  A rule maps a 1-based index k to the partial quotient
# a_k; registering by name keeps specs JSON-serializable and reproducible.
# ---------------------------------------------------------------------------

def _rule_golden(k: int, params: dict) -> int:
    return 1


def _rule_sqrt2m1(k: int, params: dict) -> int:
    # sqrt(2) - 1 = [0; 2, 2, 2, ...]
    return 2


def _rule_clt_design(k: int, params: dict) -> int:
    # a_1 = 1; a_m = ceil(c * (m-1)^beta) for m >= 2.  Every index m >= 2 is a
    # usable growth slot: a_{t+1} >= c * t^beta >= t^beta for c >= 1, so a
    # greedy plan certifies the growth exponent beta with t_k = k.
    c = params.get("c", 30)
    beta = params.get("beta", 2)
    if k == 1:
        return 1
    v = c * (k - 1) ** beta
    iv = int(v)
    return iv if iv == v else iv + 1


def _rule_parity_design(k: int, params: dict) -> int:
    # All quotients odd, so the (p_n, q_n) parities cycle with period 3:
    #   n = 0 mod 3 -> (even, odd),  n = 1 mod 3 -> (odd, odd),
    #   n = 2 mod 3 -> (odd, even).
    # Plan slots alternate t = 3j+1 (p odd) and t = 3j+3 (p even); the boosted
    # quotients sit at slot indices t+1, i.e. at k = 3j+2 and 3j+4.
    c = params.get("c", 30)
    beta = params.get("beta", 2)
    if k == 1 or k % 3 == 0:
        return 1
    if k % 3 == 2:
        pos = 2 * (k // 3) + 1  # plan position using this boost (odd)
    else:  # k % 3 == 1, k >= 4
        pos = 2 * ((k - 1) // 3)  # plan position (even)
    v = c * pos ** beta
    iv = int(v)
    if iv != v:
        iv += 1
    return _next_odd(max(iv, 1))


_RULES: dict[str, Callable[[int, dict], int]] = {
    "golden": _rule_golden,
    "sqrt2m1": _rule_sqrt2m1,
    "clt_design": _rule_clt_design,
    "parity_design": _rule_parity_design,
}


@dataclass(frozen=True)
class PartialQuotientSpec:
    """Defines alpha = [0; a_1, a_2, ...] by an explicit list or a named rule.

    ``max_index`` is the largest k for which a_k is realizable; asking beyond
    it raises ``SpecExhaustedError``.  Every a_k must be >= 1.
    """

    name: str
    max_index: int
    quotients: tuple[int, ...] | None = None
    params: dict = field(default_factory=dict)
    rule: Callable[[int, dict], int] | None = None

    def __post_init__(self):
        if self.max_index < 1:
            raise ConfigError("max_index must be >= 1")
        if self.quotients is not None:
            if len(self.quotients) < self.max_index:
                raise ConfigError("explicit quotient list shorter than max_index")
            if any(a < 1 for a in self.quotients):
                raise ConfigError("all partial quotients must be >= 1")

    def a(self, k: int) -> int:
        """Partial quotient a_k (1-based)."""
        if k < 1:
            raise ConfigError(f"partial-quotient index must be >= 1, got {k}")
        if k > self.max_index:
            raise SpecExhaustedError(
                f"spec exhausted: a_{k} requested but max_index={self.max_index}"
            )
        if self.quotients is not None:
            return self.quotients[k - 1]
        fn = self.rule if self.rule is not None else _RULES[self.name]
        v = fn(k, self.params)
        if v < 1:
            raise ConfigError(f"rule produced a_{k}={v} < 1")
        return v

    def prefix(self, n: int) -> list[int]:
        return [self.a(k) for k in range(1, n + 1)]

    def to_json(self) -> str:
        if self.quotients is not None:
            doc = {"kind": "list", "quotients": list(self.quotients),
                   "max_index": self.max_index}
        else:
            if self.rule is not None and self.name not in _RULES:
                raise ConfigError("custom callable rules are not serializable")
            doc = {"kind": "rule", "name": self.name, "params": self.params,
                   "max_index": self.max_index}
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "PartialQuotientSpec":
        doc = json.loads(text)
        if doc["kind"] == "list":
            return from_list(doc["quotients"])
        name = doc["name"]
        if name not in _RULES:
            raise ConfigError(f"unknown rule name {name!r}")
        return PartialQuotientSpec(name=name, max_index=doc["max_index"],
                                   params=doc.get("params", {}))


def golden(max_index: int = 64) -> PartialQuotientSpec:
    """alpha = (sqrt(5)-1)/2, all partial quotients 1, Fibonacci denominators."""
    return PartialQuotientSpec(name="golden", max_index=max_index)


def sqrt2m1(max_index: int = 48) -> PartialQuotientSpec:
    """alpha = sqrt(2)-1 = [0; 2, 2, 2, ...]."""
    return PartialQuotientSpec(name="sqrt2m1", max_index=max_index)


def from_list(quotients: Sequence[int]) -> PartialQuotientSpec:
    qs = tuple(int(a) for a in quotients)
    return PartialQuotientSpec(name="list", max_index=len(qs), quotients=qs)


def from_rule(name: str, fn: Callable[[int, dict], int], max_index: int,
              params: dict | None = None) -> PartialQuotientSpec:
    return PartialQuotientSpec(name=name, max_index=max_index,
                               params=dict(params or {}), rule=fn)


def clt_design_rule(c: int = 30, beta: int = 2, max_index: int = 64) -> PartialQuotientSpec:
    """Rotation number with a_{k} ~ c*(k-1)^beta: every slot is a growth slot."""
    if c < 1:
        raise ConfigError("boost factor c must be >= 1")
    return PartialQuotientSpec(name="clt_design", max_index=max_index,
                               params={"c": c, "beta": beta})


def parity_design_rule(c: int = 30, beta: int = 2, max_index: int = 160) -> PartialQuotientSpec:
    """All-odd quotients with boosted slots arranged so that q_{t_k} is odd,
    p_{t_k} alternates even/odd along the plan positions, and the growth
    condition a_{t_k+1} >= k^beta holds."""
    if c < 1:
        raise ConfigError("boost factor c must be >= 1")
    return PartialQuotientSpec(name="parity_design", max_index=max_index,
                               params={"c": c, "beta": beta})


# ---------------------------------------------------------------------------
# Convergents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Convergent:
    """Exact convergent p_n/q_n (index -1 is the seed (1, 0))."""
    n: int
    p: int
    q: int


def convergents(spec: PartialQuotientSpec, n: int) -> list[Convergent]:
    """Convergents 0..n of the spec, big-integer exact."""
    if n > spec.max_index:
        raise SpecExhaustedError(
            f"spec exhausted: convergent {n} needs a_{n}, max_index={spec.max_index}"
        )
    p_prev, p_cur = 1, 0  # p_{-1}, p_0
    q_prev, q_cur = 0, 1
    out = [Convergent(0, 0, 1)]
    for k in range(1, n + 1):
        a = spec.a(k)
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        out.append(Convergent(k, p_cur, q_cur))
    return out


# ---------------------------------------------------------------------------
# Rational truncation: alpha frozen as p_M/q_M
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalTruncation:
    """alpha treated as exactly p_M/q_M.

    Valid requests keep every integer multiple below q_{M-1}; inside that
    window distances ||k alpha|| computed on the truncation coincide with the
    combinatorics of the irrational rotation.
    """

    spec: PartialQuotientSpec
    level: int
    ps: tuple[int, ...]  # p_0 .. p_M
    qs: tuple[int, ...]  # q_0 .. q_M

    @property
    def p(self) -> int:
        return self.ps[-1]

    @property
    def q(self) -> int:
        return self.qs[-1]

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def validity_bound(self) -> int:
        """Largest N such that all k < N are inside the exact window."""
        return self.qs[self.level - 1]

    def a(self, k: int) -> int:
        return self.spec.a(k)

    def require_window(self, k: int, what: str = "multiple") -> None:
        if not 1 <= k < self.validity_bound:
            raise PrecisionError(
                f"precision exhausted: {what} {k} outside window [1, q_(M-1)) "
                f"= [1, {self.validity_bound}); rebuild with a deeper level",
                required_level=self.level + 2,
            )

    def distance(self, k: int) -> Fraction:
        """||k * p_M/q_M|| as an exact rational, for 1 <= k < q_{M-1}."""
        self.require_window(int(k))
        r = (int(k) * self.p) % self.q
        return Fraction(min(r, self.q - r), self.q)

    def frac_multiple(self, k: int) -> Fraction:
        """{k * p_M/q_M} in [0,1) as an exact rational (window-checked)."""
        self.require_window(int(k))
        return Fraction((int(k) * self.p) % self.q, self.q)

    def denominator_distance(self, n: int) -> Fraction:
        """||q_n alpha|| exactly; defined for 0 <= n <= M-1."""
        if not 0 <= n < self.level:
            raise PrecisionError(
                f"||q_{n} alpha|| needs level > {n + 1}", required_level=n + 2)
        # |q_n p_M - p_n q_M| / q_M, exact by the continuant identity
        return Fraction(abs(self.qs[n] * self.p - self.ps[n] * self.q), self.q)

    def to_json(self) -> str:
        doc = {
            "spec": json.loads(self.spec.to_json()),
            "level": self.level,
            "p": str(self.p),
            "q": str(self.q),
        }
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "RationalTruncation":
        doc = json.loads(text)
        spec = PartialQuotientSpec.from_json(json.dumps(doc["spec"]))
        trunc = truncation(spec, doc["level"])
        if str(trunc.p) != doc["p"] or str(trunc.q) != doc["q"]:
            raise ConfigError("truncation JSON does not match its spec")
        return trunc


def truncation(spec: PartialQuotientSpec, level: int) -> RationalTruncation:
    """Freeze the spec at p_level/q_level."""
    if level < 2:
        raise ConfigError("truncation level must be >= 2 for a nonempty window")
    cs = convergents(spec, level)
    return RationalTruncation(
        spec=spec,
        level=level,
        ps=tuple(c.p for c in cs),
        qs=tuple(c.q for c in cs),
    )


def design_alpha(rule: PartialQuotientSpec | Callable[[int], int],
                 levels: int, guard: int = 5):
    """Build (spec, truncation) whose truncation level exceeds every index the
    experiment will query by ``guard`` levels.

    ``rule`` is either a ready spec or a callable k -> a_k (1-based).
    """
    if guard < 2:
        raise ConfigError("guard must be >= 2 (validity window would be empty)")
    if isinstance(rule, PartialQuotientSpec):
        spec = rule
    else:
        fn = rule
        spec = from_rule("custom", lambda k, params: fn(k), levels + guard)
    level = levels + guard
    if level > spec.max_index:
        raise SpecExhaustedError(
            f"design needs level {level} but spec max_index={spec.max_index}")
    return spec, truncation(spec, level)


def nearest_integer_distance(k: int, trunc: RationalTruncation) -> Fraction:
    """||k alpha|| on the truncation, window-enforced."""
    return trunc.distance(k)


# ---------------------------------------------------------------------------
# Ostrowski numeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OstrowskiDigits:
    """Greedy expansion N = sum_k b_k q_k with the digit constraints
    0 <= b_0 <= a_1 - 1,  0 <= b_k <= a_{k+1} (k < m),  1 <= b_m <= a_{m+1}."""

    digits: tuple[int, ...]        # b_0 .. b_m
    partial_sums: tuple[int, ...]  # N_0 .. N_m, N_l = sum_{k<=l} b_k q_k

    @property
    def m(self) -> int:
        return len(self.digits) - 1

    @property
    def value(self) -> int:
        return self.partial_sums[-1]

    def digit_sum(self) -> int:
        return sum(self.digits)


def ostrowski_digits(N: int, trunc: RationalTruncation) -> OstrowskiDigits:
    """Most-significant-first greedy expansion of N >= 1 in the basis (q_k)."""
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    qs = trunc.qs
    # need q_{m+1} > N realizable
    if N >= qs[trunc.level]:
        raise SpecExhaustedError(
            f"N={N} needs denominators beyond level {trunc.level}")
    m = trunc.level - 1
    while m > 0 and qs[m] > N:
        m -= 1
    digits = [0] * (m + 1)
    rem = N
    for k in range(m, -1, -1):
        digits[k], rem = divmod(rem, qs[k])
    assert rem == 0
    sums, acc = [], 0
    for k in range(m + 1):
        acc += digits[k] * qs[k]
        sums.append(acc)
    return OstrowskiDigits(digits=tuple(digits), partial_sums=tuple(sums))


def beta_from_ostrowski(b: Sequence[int] | dict[int, int],
                        trunc: RationalTruncation) -> Fraction:
    """beta = sum_n b_n q_n alpha mod 1, exactly, all indices inside the window."""
    if isinstance(b, dict):
        items = sorted(b.items())
    else:
        items = [(n, v) for n, v in enumerate(b)]
    total = Fraction(0)
    for n, coeff in items:
        if coeff == 0:
            continue
        if not 0 <= n < trunc.level - 1:
            raise PrecisionError(
                f"Ostrowski index {n} outside validity window (level {trunc.level})",
                required_level=n + 3,
            )
        total += coeff * trunc.qs[n] * trunc.value
    frac = total - total.numerator // total.denominator
    return frac if frac >= 0 else frac + 1
