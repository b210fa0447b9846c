"""Volume products of a few symmetric bodies in the plane, compared with
the lower value 8 of the square and the value pi^2 of the disc."""

import math

from cvgeom import bodies as bd
from cvgeom import polytope as pt


def main():
    rows = [("square", pt.cube(2)), ("cross-polytope", pt.cross_polytope(2))]
    rows += [(f"inscribed {m}-gon", pt.inscribed_ngon(m)) for m in (6, 8, 12, 64)]
    print(f"{'body':>18} {'V(K) V(K*)':>14}  exact")
    for name, P in rows:
        prod = P.volume * pt.polar(P).volume
        print(f"{name:>18} {float(prod):14.10f}  {prod if prod.denominator < 10**6 else '-'}")
    for name, K in [("disc", bd.Piecewise2D.disc()),
                    ("ellipse 2 x 1/2", bd.Ellipsoid([[2.0, 0.0], [0.0, 0.5]]))]:
        print(f"{name:>18} {K.volume() * K.polar_volume():14.10f}  -")
    print(f"{'pi^2':>18} {math.pi**2:14.10f}")


if __name__ == "__main__":
    main()
