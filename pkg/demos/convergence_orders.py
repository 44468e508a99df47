"""Convergence study: relaxation keeps the order, relabeling drops one.

The rrk mode moves the clock to t + gamma*dt and stays at the method's
design order p.  The idt mode reuses the relaxed update but pretends the
step was dt, which costs one order.  On the oscillator some methods hide
that loss behind superconvergence; Burgers with the conservative flux shows
it plainly, so both tables are printed.

Run from the repository root:  python3 demos/convergence_orders.py
"""

import dataclasses
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from relaxrk.problems import BurgersConfig, burgers, oscillator
from relaxrk.relaxation import convergence_study, make_reference_exact
from relaxrk.tableau import REGISTRY_NAMES, REGISTRY_ORDERS, builtin

out = pathlib.Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

osc = oscillator()
bur = burgers(BurgersConfig(n=50, flux="conservative"))
bur = dataclasses.replace(bur, exact=make_reference_exact(bur, dt=2e-5))

runs = [
    ("oscillator", osc, 5.0, [0.5 / 2**k for k in range(5)]),
    ("burgers", bur, 0.03, [0.012 / 2**k for k in range(4)]),
]

fig, axes = plt.subplots(1, 2, figsize=(11, 4.6))
for ax, (label, prob, t_end, dts) in zip(axes, runs):
    print(f"--- {label}, errors at t = {t_end} ---")
    for name in REGISTRY_NAMES:
        tab = builtin(name)
        p = REGISTRY_ORDERS[name]
        for mode, style in (("rrk", "-"), ("idt", "--")):
            pts, slope = convergence_study(tab, prob, prob.t0, prob.u0, dts, t_end, mode)
            print(f"{name:12s} {mode:4s}  slope {slope:5.2f}  (design order {p})")
            ax.loglog([pt[0] for pt in pts], [pt[1] for pt in pts], style,
                      marker="o", ms=3, label=f"{name} {mode}")
    ax.set_xlabel("dt")
    ax.set_ylabel("error at t_end")
    ax.set_title(label)
    ax.grid(True, which="both", alpha=0.3)
axes[0].legend(fontsize=7)
fig.tight_layout()
fig.savefig(out / "convergence_orders.png", dpi=150)
print(f"wrote {out / 'convergence_orders.png'}")
