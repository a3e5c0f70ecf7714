"""Command-line front end.

Subcommands: cf, ostrowski, sum, variance, plan, clt, erdos-fortet,
gaposhkin, billiard, billiard-clt.  Outputs are RFC-4180 CSV (data tables,
big integers as decimal strings) or single-line JSON reports; identical
configuration and seed produce byte-identical output.  ROTSUM_THREADS is
read and recorded for reproducibility (current engines are single-process).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from . import billiard as bil
from . import contfrac as cf
from . import observables as obs
from . import sequences as seq
from . import stats as st
from . import variance as var
from .errors import ConfigError, PrecisionError, RotsumError


# ---------------------------------------------------------------------------
# Config plumbing
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    alpha: str = "golden"
    observable: str = "phi0"
    beta: float = 2.0
    terms: int = 40
    samples: int = 20000
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    options: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {"command": self.command, "alpha": self.alpha,
               "observable": self.observable, "beta": self.beta,
               "terms": self.terms, "samples": self.samples,
               "seed": self.seed, "out": self.out, "format": self.fmt,
               "options": self.options,
               "threads": os.environ.get("ROTSUM_THREADS", "1")}
        return json.dumps(doc, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "RunConfig":
        doc = json.loads(text)
        return RunConfig(command=doc["command"], alpha=doc["alpha"],
                         observable=doc["observable"], beta=doc["beta"],
                         terms=doc["terms"], samples=doc["samples"],
                         seed=doc["seed"], out=doc["out"], fmt=doc["format"],
                         options=doc.get("options", {}))

    def hash(self) -> str:
        # the output path is not semantic: identical experiments hashed
        # identically wherever they are written
        doc = json.loads(self.to_json())
        doc.pop("out", None)
        return hashlib.sha256(
            json.dumps(doc, sort_keys=True).encode()).hexdigest()[:16]


def parse_alpha(text: str, levels: int, guard: int = 5):
    """'golden' | 'sqrt2m1' | 'list:1,2,3' | 'clt:c=30' | 'parity:c=30'."""
    if text == "golden":
        spec = cf.golden(max_index=levels + guard)
    elif text == "sqrt2m1":
        spec = cf.sqrt2m1(max_index=levels + guard)
    elif text.startswith("list:"):
        vals = [int(v) for v in text[5:].split(",") if v]
        spec = cf.from_list(vals)
        levels = min(levels, len(vals) - guard)
        if levels < 1:
            raise ConfigError("explicit list too short for the guard")
    elif text.startswith("clt:") or text == "clt":
        kw = _parse_kw(text[4:] if ":" in text else "")
        spec = cf.clt_design_rule(c=int(kw.get("c", 30)),
                                  beta=int(kw.get("beta", 2)),
                                  max_index=levels + guard)
    elif text.startswith("parity:") or text == "parity":
        kw = _parse_kw(text[7:] if ":" in text else "")
        spec = cf.parity_design_rule(c=int(kw.get("c", 30)),
                                     beta=int(kw.get("beta", 2)),
                                     max_index=levels + guard)
    else:
        raise ConfigError(f"cannot parse alpha spec {text!r}")
    return cf.truncation(spec, min(spec.max_index, levels + guard))


def _parse_kw(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if not part:
            continue
        k, _, v = part.partition("=")
        out[k.strip()] = v.strip()
    return out


def parse_observable(text: str):
    """'phi0' | 'indicator:beta=1/3' | 'half' | 'double_interval:beta=..,gamma=..' ..."""
    name, _, rest = text.partition(":")
    kw = {k: Fraction(v) for k, v in _parse_kw(rest).items()}
    return obs.catalog(name, **kw)


def _emit(rows: list[dict], cfg: RunConfig, header: list[str]) -> str:
    if cfg.fmt == "json":
        return "\n".join(json.dumps(r, sort_keys=True, default=str)
                         for r in rows) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: str(v) for k, v in r.items()})
    return buf.getvalue()


def _write(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_cf(cfg: RunConfig) -> str:
    n = cfg.terms
    tr = parse_alpha(cfg.alpha, n)
    rows = []
    for k in range(1, min(n, tr.level) + 1):
        rows.append({"n": k, "a_n": tr.a(k), "p_n": tr.ps[k], "q_n": tr.qs[k]})
    _write(_emit(rows, cfg, ["n", "a_n", "p_n", "q_n"]), cfg)
    return f"cf: {len(rows)} convergents of {cfg.alpha}"


def _cmd_ostrowski(cfg: RunConfig) -> str:
    N = int(cfg.options.get("N", 10))
    tr = parse_alpha(cfg.alpha, max(cfg.terms, 40))
    digits = cf.ostrowski_digits(N, tr)
    rows = [{"k": k, "b_k": b, "q_k": tr.qs[k], "N_k": digits.partial_sums[k]}
            for k, b in enumerate(digits.digits)]
    _write(_emit(rows, cfg, ["k", "b_k", "q_k", "N_k"]), cfg)
    return f"ostrowski: N={N} -> digit sum {digits.digit_sum()}"


def _cmd_sum(cfg: RunConfig) -> str:
    from .ergosum import ErgodicContext
    N = int(cfg.options.get("N", 1000))
    grid = int(cfg.options.get("grid", 64))
    tr = parse_alpha(cfg.alpha, max(cfg.terms, 48))
    phi = parse_observable(cfg.observable)
    ctx = ErgodicContext(phi, tr, grid)
    rows = []
    for i in range(grid):
        val = ctx.sum_at(i, N)
        rows.append({"x": f"{i}/{grid}", "sum": float(val)})
    _write(_emit(rows, cfg, ["x", "sum"]), cfg)
    return f"sum: S_N over {grid} grid points, N={N}"


def _cmd_variance(cfg: RunConfig) -> str:
    nmax = int(cfg.options.get("nmax", 200))
    tr = parse_alpha(cfg.alpha, 48)
    phi = parse_observable(cfg.observable)
    ns = sorted({max(1, round(nmax ** (i / 39))) for i in range(40)})
    prof = var.variance_profile(phi, tr, ns)
    rows = [{"n": n, "norm_sq": prof.norm_sq[i],
             "mean_variance": prof.mean_variance[i],
             "lower_series": prof.lower_series[i],
             "upper_series": prof.upper_series[i],
             "level": prof.levels[i]} for i, n in enumerate(prof.ns)]
    _write(_emit(rows, cfg, ["n", "norm_sq", "mean_variance", "lower_series",
                             "upper_series", "level"]), cfg)
    return f"variance: {len(rows)} rows up to n={nmax}"


def _plan_for(cfg: RunConfig, parity: bool):
    levels = 3 * cfg.terms + 8 if parity else cfg.terms + 8
    alpha = cfg.alpha
    if alpha in ("golden", "sqrt2m1") or alpha.startswith("list:"):
        tr = parse_alpha(alpha, levels)
    else:
        tr = parse_alpha(alpha if ":" in alpha or alpha in ("clt", "parity")
                         else ("parity" if parity else "clt"), levels)
    if parity:
        return seq.plan_parity(tr, cfg.beta, cfg.terms)
    return seq.plan_growth(tr, cfg.beta, cfg.terms)


def _cmd_plan(cfg: RunConfig) -> str:
    parity = bool(int(cfg.options.get("parity", 0)))
    plan = _plan_for(cfg, parity)
    _write(plan.to_json() + "\n", cfg)
    return f"plan: {plan.count} terms, certified={plan.certified}"


def _cmd_clt(cfg: RunConfig) -> str:
    plan = _plan_for(cfg, parity=False)
    phi = parse_observable(cfg.observable)
    rep = st.clt_experiment(plan, phi, cfg.terms, cfg.samples, cfg.seed)
    rep.extra["config_hash"] = cfg.hash()
    if "samples_csv" in cfg.options:
        ss = st.sample_sums(plan, phi,
                            st.StratifiedSampler(seed=cfg.seed,
                                                 size=cfg.samples), cfg.terms)
        with open(cfg.options["samples_csv"], "w", newline="") as fh:
            fh.write("index,value\r\n")
            for i, v in enumerate(ss.values):
                fh.write(f"{i},{v!r}\r\n")
    _write(rep.to_json() + "\n", cfg)
    return (f"clt: KS={rep.empirical['ks']:.4f} "
            f"ratio={rep.empirical['variance_ratio']:.4f} passed={rep.passed}")


def _cmd_erdos_fortet(cfg: RunConfig) -> str:
    n = int(cfg.options.get("n", 500))
    rep = st.erdos_fortet_experiment(n, cfg.samples, cfg.seed)
    rep.extra["config_hash"] = cfg.hash()
    _write(rep.to_json() + "\n", cfg)
    return (f"erdos-fortet: KS(mix)={rep.empirical['ks_mixture']:.4f} "
            f"gap={rep.empirical['gap']:.4f} passed={rep.passed}")


def _cmd_gaposhkin(cfg: RunConfig) -> str:
    n = int(cfg.options.get("n", 500))
    a = int(cfg.options.get("a", 5))
    rep = st.gaposhkin_demo(a, n, cfg.samples, cfg.seed)
    rep.extra["config_hash"] = cfg.hash()
    _write(rep.to_json() + "\n", cfg)
    return (f"gaposhkin: KS={rep.empirical['ks_two_sample']:.4f} "
            f"mismatches={rep.empirical['mismatches']} passed={rep.passed}")


def _cmd_billiard(cfg: RunConfig) -> str:
    a = Fraction(cfg.options.get("a", "2/5"))
    b = Fraction(cfg.options.get("b", "2/5"))
    collisions = int(cfg.options.get("collisions", 50))
    if "x" in cfg.options:
        x = Fraction(cfg.options["x"])
    else:
        # seeded random section start
        import numpy as np
        rng = np.random.default_rng(cfg.seed)
        x = Fraction(int(rng.integers(1, 2 ** 40)), 2 ** 40)
    params = bil.ObstacleParams(a=a, b=b)
    orbit = bil.ray_trace(x, params, collisions=collisions)
    rows = []
    for ev in orbit.events:
        rows.append({"t": ev.time, "x": float(ev.position[0]),
                     "y": float(ev.position[1]),
                     "cell_i": ev.obstacle[0], "cell_j": ev.obstacle[1],
                     "side": ev.side})
    _write(_emit(rows, cfg, ["t", "x", "y", "cell_i", "cell_j", "side"]), cfg)
    return f"billiard: {collisions} collisions from x={x}"


def _cmd_billiard_clt(cfg: RunConfig) -> str:
    plan = _plan_for(cfg, parity=True)
    scale = Fraction(cfg.options.get("scale", "1"))
    params = bil.params_for_plan(plan.trunc, scale=scale)
    rep = bil.clt_experiment(params, plan, cfg.terms, cfg.samples, cfg.seed)
    rep.extra["config_hash"] = cfg.hash()
    _write(rep.to_json() + "\n", cfg)
    return (f"billiard-clt: c11={rep.empirical['c11']:.3f} "
            f"c22={rep.empirical['c22']:.3f} passed={rep.passed}")


_HANDLERS = {
    "cf": _cmd_cf,
    "ostrowski": _cmd_ostrowski,
    "sum": _cmd_sum,
    "variance": _cmd_variance,
    "plan": _cmd_plan,
    "clt": _cmd_clt,
    "erdos-fortet": _cmd_erdos_fortet,
    "gaposhkin": _cmd_gaposhkin,
    "billiard": _cmd_billiard,
    "billiard-clt": _cmd_billiard_clt,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rotsum",
        description="Exact ergodic sums over circle rotations: continued "
                    "fractions, variance bounds, subsequence CLT experiments "
                    "and the rectangular periodic billiard.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _HANDLERS:
        p = sub.add_parser(name)
        p.add_argument("--alpha", default="golden",
                       help="golden|sqrt2m1|list:..|clt:c=30|parity:c=30")
        p.add_argument("--observable", default="phi0",
                       help="phi0|indicator:beta=1/3|half|double_interval:...|"
                            "half_shifted:beta=1/5")
        p.add_argument("--beta", type=float, default=2.0,
                       help="growth exponent of the plan")
        p.add_argument("--terms", "--n", dest="terms", type=int, default=40)
        p.add_argument("--samples", type=int, default=20000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"),
                       default="csv")
        p.add_argument("--opt", action="append", default=[],
                       help="extra key=value options (N, grid, nmax, scale, "
                            "parity, n, samples_csv)")
        if name in ("billiard", "billiard-clt"):
            p.add_argument("--a", default=None, help="obstacle width (rational)")
            p.add_argument("--b", default=None, help="obstacle height (rational)")
            p.add_argument("--collisions", type=int, default=None)
            p.add_argument("--x", default=None, help="section start (rational)")
    return ap


def config_from_args(args) -> RunConfig:
    options = _parse_kw(",".join(args.opt))
    for key in ("a", "b", "collisions", "x"):
        val = getattr(args, key, None)
        if val is not None:
            options[key] = str(val)
    return RunConfig(command=args.command, alpha=args.alpha,
                     observable=args.observable, beta=args.beta,
                     terms=args.terms, samples=args.samples, seed=args.seed,
                     out=args.out, fmt=args.fmt, options=options)


def run(cfg: RunConfig) -> int:
    try:
        summary = _HANDLERS[cfg.command](cfg)
    except PrecisionError as exc:
        hint = (f" (rebuild at level >= {exc.required_level})"
                if exc.required_level else "")
        print(f"error: {exc}{hint}", file=sys.stderr)
        return 2
    except (RotsumError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"{summary} [config {cfg.hash()}, v{__version__}]", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
