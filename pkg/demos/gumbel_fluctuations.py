"""Typical fluctuations of the scaled max: the Gumbel window.

Between the bulk edge and the large-deviation regime sits the fluctuation
scale, where P(max >= 1 + y_n(g)) approaches the Gumbel upper tail
1 - exp(-exp(-g)).  The centering sequence y_n(g) involves a two-term
iterated logarithm and is where a subtle constant matters: the library
carries both the self-consistent centering and the published display
centering, and this script shows which one the exact probabilities track.

Run time is a couple of seconds, dominated by the n=2000 tail evaluation.
"""

import math

from chiral_ldp import clt_check

for n in (500, 2000):
    rows = clt_check(n, 0)
    print(f"n = {n}, v = 0")
    print("-" * 14)
    print(f"{'g':>4} {'exact':>10} {'gumbel':>10} {'gap':>9} "
          f"{'display gap':>12}")
    for r in rows:
        print(f"{r.g_arg:>4.1f} {r.exact:>10.5f} {r.target:>10.5f} "
              f"{r.abs_gap:>9.4f} {r.abs_gap_display:>12.4f}")
    print()

print("Both rows converge under the self-consistent centering (gap column)")
print("and sit a fixed distance away under the display centering: the two")
print("sequences differ by log(2 pi)/2 =", f"{math.log(2 * math.pi) / 2:.4f}",
      "inside the doubly-logarithmic term,")
print("which shifts the Gumbel argument by a constant and never decays.")
print()
print("Convergence is slow (iterated logarithms), so even n = 2000 shows a")
print("visible residual at g = 0; the g = 2 column, deeper in the tail,")
print("is already accurate to about one percent.")
