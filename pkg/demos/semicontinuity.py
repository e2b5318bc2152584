"""Continuity behavior of successive minima under converging schedules.

For bounded bodies the minima vary continuously in the body and the
lattice; for unbounded bodies only upper semicontinuity survives, and the
minima can drop discontinuously in the limit.  The golden lattice under
the hyperbola body is the classical discontinuity point: its own budgeted
lambda-hat_2 is 1, yet lattices arbitrarily close to it have lambda-hat_2
below 1/2.
"""

import math

import starlat as sl


def main():
    ball = sl.pnorm_ball(2, 2)
    L = sl.make_lattice([[1, 0], [0, 1]])

    print("== bounded case: minima converge along the schedule ==")
    rep = sl.semicontinuity_probe(
        f_seq=lambda n: sl.inflate_body(ball, 1.0 + 1.0 / n),
        L_seq=lambda n: sl.perturb_basis(L, 0.2 / n, seed=n),
        f=ball, L=L, n_max=8, slack=lambda n: 10.0 / n)
    print(f"reference lambda = {rep.reference}")
    for e in rep.entries:
        vals = ", ".join(f"{v:.4f}" for v in e.values)
        print(f"  n={e.n}: ({vals})  slack 10/n = {e.slack:.3f}  "
              f"converged: {e.converged}")

    print()
    print("== unbounded case: only the upper inequality survives ==")
    gold = sl.golden_lattice()
    rep = sl.semicontinuity_probe(
        f_seq=lambda n: sl.hyperbolic(2),
        L_seq=lambda n: sl.perturb_basis(gold, 0.1 / n, seed=n),
        f=sl.hyperbolic(2), L=gold, n_max=8,
        slack=lambda n: 10.0 / n, budget=50.0)
    print(f"reference lambda-hat (budget 50) = {rep.reference}")
    for e in rep.entries:
        vals = ", ".join(f"{v:.4f}" for v in e.values)
        print(f"  n={e.n}: ({vals})  below reference + slack: {e.upper_ok}")

    print()
    print("== discontinuity at the golden lattice ==")
    demo = sl.noncontinuity_demo(epsilon=0.05, radius_budget=60.0, seed=11,
                                 attempts=300)
    print(f"searched {demo.attempts} perturbations of size <= 0.05")
    if demo.found:
        print(f"found lambda-hat_2 = {demo.values[1]:.4f} < 0.5 "
              f"(golden lattice itself has 1.0)")
        for p in demo.witnesses:
            f2 = abs(p.coords[0] * p.coords[1])
            print(f"  witness {p.coeffs}: |x1*x2| = {f2:.4f}")
    else:
        print(f"no drop below 0.5 found; best seen {demo.best_lambda2:.4f}")
        print("(existence is only guaranteed arbitrarily close to the "
              "lattice, not within a fixed search budget)")


if __name__ == "__main__":
    main()
