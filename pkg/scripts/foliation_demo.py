#!/usr/bin/env python3
"""Build, validate, and take the limit of leaf-system sketches for a twist.

Shows the three stories in one sitting: the integrable sketch for each
boundary condition k, its structural validation, and the invariant circles
picked out in the high-iterate limit when k_n / n approaches an irrational
rotation number.
"""

import argparse
import math

from symdyn import foliation, library


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--omega", type=float, default=library.GOLDEN_MEAN)
    args = parser.parse_args()

    profile = library.radial_twist_25().profile
    for k in (1, 2, 5):
        sketch = foliation.build_integrable_sketch(profile, n=1, k=k)
        report = foliation.validate(sketch)
        shape = "simple" if report.simple else "non-simple"
        print(f"k={k}: {len(sketch.nodes)} node(s), {len(sketch.leaves)} rigid "
              f"leaf(s), {shape}, valid={report.valid}")
        for leaf in sketch.leaves:
            print(f"   {leaf.kind:13s} ends={leaf.ends} area={leaf.area:.6f}")

    wiggly = library.wiggly_profile()
    omega = args.omega
    limit = foliation.asymptotic_circles(wiggly, (0.0, 0.0), omega,
                                         lambda n: math.floor(n * omega))
    print(f"\nwiggly profile, omega={omega:.6f}: {len(limit.circles)} circle(s)")
    for c in limit.circles:
        print(f"   r={c.radius:.6f}  rotation={c.rotation:.6f}  zero-area leaf locus")
    print("regions:", [(round(lo, 4), round(hi, 4)) for lo, hi in limit.regions])


if __name__ == "__main__":
    main()
