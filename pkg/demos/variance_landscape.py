#!/usr/bin/env python3
"""The variance landscape of ergodic sums over a rotation.

Two regimes coexist: along the denominators q_n the sums stay uniformly
bounded (so the variance does too), while between denominators the variance
climbs to a scale set by the next partial quotient.  The script prints the
profile for the centered fractional part and shows how one huge quotient
reshapes the landscape.
"""

import math

from rotsum import contfrac as cf
from rotsum import observables as obs
from rotsum import variance as var


def main():
    phi = obs.Sawtooth()
    print("=== golden rotation (all quotients 1): flat landscape ===")
    tr = cf.truncation(cf.golden(45), 43)
    prof = var.variance_profile(phi, tr, [1, 3, 8, 21, 55, 144, 377, 987])
    print(f"  {'n':>5} {'norm_sq':>10} {'mean_var':>10} {'lower':>8} {'upper':>8}")
    for i, n in enumerate(prof.ns):
        print(f"  {n:>5} {prof.norm_sq[i]:>10.4f} {prof.mean_variance[i]:>10.4f}"
              f" {prof.lower_series[i]:>8.4f} {prof.upper_series[i]:>8.4f}")
    print("  lower series = l/(4 pi^2) for the golden rotation:",
          f"{10 / (4 * math.pi ** 2):.4f} at l=10")

    print("\n=== one huge quotient: a spike between denominators ===")
    for big in (10, 100, 1000):
        quots = [1, 1, 1, 1, big] + [1] * 14
        tr2 = cf.truncation(cf.from_list(quots), len(quots))
        q4, q5 = tr2.qs[4], tr2.qs[5]
        at_q4 = float(var.norm_sq(phi, q4, tr2, mode="exact")[0])
        mid = float(var.norm_sq(phi, (q4 + q5) // 2, tr2, mode="exact")[0])
        print(f"  a_5={big:>4}: ||S_(q_4)||^2 = {at_q4:.4f} (bounded), "
              f"mid-range norm^2 = {mid:.2f} (grows with a_5)")

    print("\n=== repartition inequalities (exact left sides) ===")
    rep = var.diagnostic_inequalities(tr, 8, 10)
    for name, (lhs, rhs, ok) in rep.items():
        print(f"  {name}: {lhs:.4f} <= {rhs:.4f}  [{'ok' if ok else 'FAIL'}]")


if __name__ == "__main__":
    main()
