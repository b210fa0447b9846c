"""Affine surface area along inscribed polygons converging to the disc.

Prints, for m = 4, 8, ..., the support gap to the unit disc and the values
of the area, the polar area and Omega; Omega stays 0 while its limit is 2 pi.
"""

import argparse
import math

from cvgeom import bodies as bd
from cvgeom import polytope as pt
from cvgeom import valuations as val


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max", type=int, default=512, help="largest polygon size")
    ap.add_argument("--p", type=float, default=1.0, help="L_p exponent of the affine area")
    args = ap.parse_args()

    disc = bd.Ball(1.0, 2)
    omega = val.lp_affine_surface_area(args.p, 2)
    dirs = pt.fibonacci_directions(4096, 2)
    print(f"{'m':>5} {'gap':>12} {'area':>12} {'polar area':>12} {'Omega':>8}")
    m = 4
    while m <= args.max:
        P = pt.inscribed_ngon(m)
        print(f"{m:5d} {pt.support_gap(P, disc, dirs):12.4e} {float(P.volume):12.8f} "
              f"{float(pt.polar(P).volume):12.8f} {float(omega(P)):8.3f}")
        m *= 2
    print(f"{'disc':>5} {0.0:12.4e} {math.pi:12.8f} {math.pi:12.8f} {omega(disc):8.3f}")


if __name__ == "__main__":
    main()
