"""Successive minima of star bodies, exact and budgeted.

Walks through the two solver modes: the exact iterative-deepening solver
for bounded bodies, and the budgeted upper-bound solver for unbounded ones
(where no finite computation can certify the true minima).
"""

import math

import starlat as sl


def main():
    print("== exact minima, bounded bodies ==")
    for label, cols in [("integer lattice", [[1, 0], [0, 1]]),
                        ("hexagonal", [[1, 0.5], [0, math.sqrt(3) / 2]]),
                        ("stretched", [[2, 0], [0, 3]])]:
        L = sl.make_lattice(cols)
        for body in (sl.pnorm_ball(2, 2), sl.pnorm_ball(2, math.inf)):
            res = sl.successive_minima_exact(body, L)
            w = ", ".join(str(p.coeffs) for p in res.witnesses)
            print(f"  {label:14s} {body.label:10s} "
                  f"lambda = {res.values}  witnesses {w}")

    print()
    print("== budgeted upper bounds, hyperbola body ==")
    f = sl.hyperbolic(2)
    Z2 = sl.make_lattice([[1, 0], [0, 1]])
    gold = sl.golden_lattice()
    print("  the hyperbola body |x*y|^(1/2) <= 1 is unbounded, so the")
    print("  solver reports upper bounds within a Euclidean search radius:")
    for name, L in (("integer lattice", Z2), ("golden lattice", gold)):
        for budget in (2.0, 10.0, 50.0):
            res = sl.minima_upper_bound(f, L, budget)
            print(f"  {name:15s} budget {budget:5.1f} -> "
                  f"lambda-hat = ({res.values[0]:.4f}, {res.values[1]:.4f})")
    print()
    print("  the integer lattice hits 0 instantly (the axes lie in the")
    print("  body); the golden lattice is admissible, its norm form keeps")
    print("  every nonzero point at distance >= 1, so (1, 1) is exact.")


if __name__ == "__main__":
    main()
