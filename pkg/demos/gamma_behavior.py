"""How far the relaxation parameter sits from 1 as the step shrinks.

For a method of order p the single-step deviation |gamma - 1| scales like
dt^p: relaxation is a small correction, not a different method.  The
measured slopes printed below back that up for every built-in tableau.

Run from the repository root:  python3 demos/gamma_behavior.py
"""

import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from relaxrk.problems import oscillator
from relaxrk.relaxation import gamma_study
from relaxrk.tableau import REGISTRY_NAMES, REGISTRY_ORDERS, builtin

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

prob = oscillator()
dts = [0.5 * 2.0**-k for k in range(7)]

fig, ax = plt.subplots(figsize=(7, 4.6))
for name in REGISTRY_NAMES:
    devs, slope = gamma_study(builtin(name), prob, 0.0, prob.u0, dts)
    print(f"{name:12s} order {REGISTRY_ORDERS[name]}: slope {slope:.3f}")
    ax.loglog(dts, devs, "o-", label=f"{name} (slope {slope:.2f})")

ax.set_xlabel("dt")
ax.set_ylabel("|gamma - 1| after one step")
ax.set_title("Single-step relaxation deviation on the oscillator")
ax.legend(fontsize=8)
ax.grid(True, which="both", alpha=0.3)
fig.tight_layout()
fig.savefig(out / "gamma_behavior.png", dpi=150)
print(f"wrote {out / 'gamma_behavior.png'}")
