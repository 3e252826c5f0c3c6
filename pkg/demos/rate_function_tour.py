"""A tour of the deviation rate functions.

Walks the three rate families (right and left tails of the scaled max,
right tail of the scaled min) across the shape parameter alpha, checks the
structural identities they satisfy, and shows the one case where the
published display form must be handled with care.

Run time is well under a second; everything is closed form.
"""

import math

import numpy as np

from chiral_ldp import (
    kappa,
    mdp_max_left_const,
    mdp_max_right_const,
    rate_max_left,
    rate_max_left_infinity_consistent,
    rate_max_right,
    rate_min_right,
)

ALPHAS = (0.0, 0.5, 1.0, 4.0, math.inf)


def section(title):
    print()
    print(title)
    print("-" * len(title))


section("Right tail of the scaled max: I(x) over alpha")
xs = (1.0, 1.2, 1.5, 2.0, 3.0)
print("alpha \\ x " + "".join(f"{x:>10.2f}" for x in xs))
for alpha in ALPHAS:
    row = [rate_max_right(alpha, x).value for x in xs]
    label = "inf" if math.isinf(alpha) else f"{alpha:.1f}"
    print(f"{label:>9} " + "".join(f"{v:>10.5f}" for v in row))
print()
print("The x=1 column is identically zero: deviations start at the bulk edge.")
print("Rates grow with alpha; a thicker rectangular block stiffens the tail.")

section("The saddle parameter kappa behind every formula")
print("kappa(alpha, x) solves kappa (kappa + alpha) = (1 + alpha) x^2:")
for alpha in (0.0, 1.0, 4.0):
    for x in (1.5, 3.0):
        k = kappa(alpha, x)
        resid = k * (k + alpha) - (1.0 + alpha) * x * x
        print(f"  alpha={alpha:<4} x={x:<4} kappa={k:.6f}  residual={resid:+.1e}")

section("Left tail of the scaled max: speed n^2")
for alpha in ALPHAS:
    vals = [rate_max_left(alpha, x).value for x in (0.4, 0.7, 0.9)]
    label = "inf" if math.isinf(alpha) else f"{alpha:.1f}"
    print(f"  alpha={label:>4}: " + "  ".join(f"I({x})={v:.5f}"
          for x, v in zip((0.4, 0.7, 0.9), vals)))
print()
print("Note the alpha=inf row: the published limiting display is NOT the")
print("pointwise limit of the finite-alpha rates and goes negative:")
ev = rate_max_left(math.inf, 0.5)
print(f"  display form at x=0.5: {ev.value:+.5f}  (branch {ev.branch})")
print(f"  warning: {ev.warning}")
print(f"  consistent limit:      {rate_max_left_infinity_consistent(0.5):+.5f}")

section("Right tail of the scaled min")
print("The min rate has two analytic branches that meet continuously at x=1:")
for alpha in (0.0, 1.0, 4.0):
    below = rate_min_right(alpha, 1.0 - 1e-12).value
    at = rate_min_right(alpha, 1.0).value
    print(f"  alpha={alpha}: J(1-) = {below:.12f}, J(1) = {at:.12f}, "
          f"jump {abs(below - at):.1e}")
values = [rate_min_right(0.0, x).value for x in (0.25, 0.5, 1.0, 2.0, 4.0)]
print("  alpha=0 profile:", "  ".join(f"{v:.5f}" for v in values))
print("  (x^2/2 below 1, then 2x - 3/2 - log x above)")

section("Moderate-deviation constants")
print("Right tail (speed n l^2) and left tail (speed n^2 l^3) constants:")
for alpha in (0.0, 1.0, 10.0, math.inf):
    r = mdp_max_right_const(alpha)
    l = mdp_max_left_const(alpha)
    label = "inf" if math.isinf(alpha) else f"{alpha:.1f}"
    print(f"  alpha={label:>4}: right {r:.6f}  left {l:.6f}")
print()
print("At alpha=0 these are 1 and 4/27:", mdp_max_right_const(0.0),
      mdp_max_left_const(0.0), "=", 4 / 27)
print()
print("Every number above came from closed-form evaluation; the convergence")
print("demo checks them against exact finite-n probabilities.")
