"""Linear stability of the relaxed update: regions grow as gamma shrinks.

Scaling the update by gamma < 1 damps every mode, so the stability region
of R_gamma(z) = 1 + gamma * sum(alpha_k z^k) nests monotonically: smaller
gamma, bigger region.  On the imaginary axis the relaxed method of even
order picks up a genuine stability interval even where the unrelaxed one
has none, which the printed E-polynomial coefficients make quantitative.

Run from the repository root:  python3 demos/stability_regions.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from relaxrk.analysis import (
    e_polynomial,
    imaginary_interval,
    region_boundary,
    stability_polynomial,
    stability_region_scan,
)
from relaxrk.tableau import builtin

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

tab = builtin("RK(4,4)")
sp = stability_polynomial(tab)
print("alpha_k =", sp.alpha)

fig, ax = plt.subplots(figsize=(6.2, 5.4))
for g in (0.7, 1.0, 1.3):
    scan = stability_region_scan(sp, g, (-5.0, 1.0), (0.0, 5.0), 201)
    pts = region_boundary(scan)
    ax.plot(pts[:, 0], pts[:, 1], ".", ms=2, label=f"gamma = {g}")
    ival = imaginary_interval(sp, g)
    ep = e_polynomial(sp, g)
    lead = next((c for c in ep.coeffs[2:] if abs(c) > 1e-12), 0.0)
    print(f"gamma {g}: imaginary interval [0, {ival:.4f}], leading E coeff {lead:+.4e}")

# second-order methods have no imaginary-axis interval at gamma = 1 but
# gain one as soon as gamma < 1
sp22 = stability_polynomial(builtin("SSPRK(2,2)"))
for g in (1.0, 0.9):
    print(f"SSPRK(2,2) gamma {g}: imaginary interval [0, {imaginary_interval(sp22, g):.4f}]")

ax.set_xlabel("Re z")
ax.set_ylabel("Im z")
ax.set_title("RK(4,4): |R_gamma(z)| = 1 in the upper half plane")
ax.set_aspect("equal")
ax.legend()
ax.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(out / "stability_regions.png", dpi=150)
print(f"wrote {out / 'stability_regions.png'}")
