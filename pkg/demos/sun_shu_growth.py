"""A dissipative linear system where the unrelaxed step still expands.

The 3x3 upper-triangular system u' = A u is dissipative (the symmetric part
of A is negative semidefinite), so the true norm never grows.  Yet the norm
of the RK(4,4) one-step map R(dt A) exceeds 1 for moderate dt: started from
the top right singular vector, the unrelaxed step expands the norm before
the transient dies away.  Relaxation picks gamma from the dissipation the
stages report, so its norm never exceeds the starting value.

Run from the repository root:  python3 demos/sun_shu_growth.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from relaxrk.analysis import stability_polynomial
from relaxrk.problems import sun_shu, sun_shu_svd
from relaxrk.relaxation import integrate
from relaxrk.tableau import builtin

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

prob = sun_shu()
tab = builtin("RK(4,4)")
sp = stability_polynomial(tab)

for dt in (0.5, 0.7):
    sigma, _ = sun_shu_svd(dt, sp)
    print(f"dt = {dt}: largest singular value of R(dt A) = {sigma:.10f}")

dt = 0.7
_, v = sun_shu_svd(dt, sp)
fig, ax = plt.subplots(figsize=(7, 4.2))
for mode, style in (("baseline", "-"), ("rrk", ":")):
    traj = integrate(tab, prob, 0.0, v, dt, 35.0, mode)
    norms = np.sqrt(traj.energy)
    print(f"{mode:9s} max norm over [0, 35] = {norms.max():.6f} (start 1.0)")
    ax.plot(traj.t, norms, style, label=mode)

ax.set_xlabel("t")
ax.set_ylabel("|u|")
ax.set_title(f"RK(4,4) from the worst-case direction, dt = {dt}")
ax.legend()
ax.grid(alpha=0.3)
fig.tight_layout()
fig.savefig(out / "sun_shu_growth.png", dpi=150)
print(f"wrote {out / 'sun_shu_growth.png'}")
