"""Strong-stability and algebraic-stability bookkeeping for the registry.

Two tables.  The first lists each built-in method's radius of absolute
monotonicity C and the largest relaxation parameter gamma* that keeps a
strong-stability bound intact (methods with C = 0 have no such bound, so
no gamma* either).  The second classifies the stability matrix
M = B A + A' B - b b': explicit methods are never algebraically stable,
while the two reference implicit schemes show what the labels look like.

Run from the repository root:  python3 demos/ssp_properties.py
"""

from relaxrk.analysis import algebraic_stability_matrix, gamma_star, ssp_coefficient
from relaxrk.tableau import REGISTRY_NAMES, ButcherTableau, builtin

print(f"{'method':12s} {'stages':>6s} {'C':>10s} {'gamma*':>12s}")
for name in REGISTRY_NAMES:
    tab = builtin(name)
    rep = ssp_coefficient(tab)
    if rep.ssp_coeff > 0.0:
        gs = f"{gamma_star(tab):.8f}"
    else:
        gs = "-"
    print(f"{name:12s} {tab.stages:6d} {rep.ssp_coeff:10.6f} {gs:>12s}")

midpoint = ButcherTableau("implicit midpoint", [[0.5]], [1.0])
beuler = ButcherTableau("backward Euler", [[1.0]], [1.0])

print()
print(f"{'method':18s} {'classification':>22s} {'min eig of M':>14s}")
for tab in [builtin(n) for n in REGISTRY_NAMES] + [midpoint, beuler]:
    rep = algebraic_stability_matrix(tab)
    print(f"{tab.name:18s} {rep.classification:>22s} {rep.eigenvalues.min():14.3e}")
