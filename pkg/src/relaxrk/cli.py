"""Command line experiment runner.

Every library capability is exposed as a subcommand that writes CSV
artifacts plus a JSON manifest describing the run.  Re-running the same
manifest (``relaxrk --manifest <path>``) reproduces the CSV files byte for
byte: floats are written in shortest round-trip form and all randomness is
seeded.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical abort
(nonpositive gamma or non-finite state), with the failing step index on
stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    region_boundary,
    ssp_coefficient,
    stability_polynomial,
    stability_region_scan,
)
from .problems import (
    BurgersConfig,
    burgers,
    burgers_grid,
    dt_max,
    mode_amplification,
    oscillator,
    spectral_advection,
    sun_shu,
)
from .relaxation import (
    MODES,
    IntegrationError,
    convergence_study,
    gamma_study,
    integrate,
    make_reference_exact,
)
from .tableau import REGISTRY_NAMES, builtin, load_tableau_file, validate

PROBLEMS = ("oscillator", "sunshu", "advection", "burgers-cons", "burgers-diss")

SUBCOMMANDS = (
    "list-methods",
    "validate",
    "integrate",
    "convergence",
    "gamma-study",
    "energy",
    "stability-region",
    "ssp-table",
    "modes",
)


class UsageError(ValueError):
    """Bad flag combination or unresolvable configuration."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _slug(name: str) -> str:
    return re.sub(r"[^0-9a-z]+", "", name.lower())


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    s = str(x)
    if "," in s or '"' in s:  # method names like SSPRK(3,3) need quoting
        s = '"' + s.replace('"', '""') + '"'
    return s


def _csv_line(row) -> str:
    return ",".join(_fmt(x) for x in row)


def _write_csv(path: Path, header: str, rows) -> str:
    lines = [header]
    lines.extend(_csv_line(row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def _default_dts(problem: str):
    if problem in ("oscillator", "sunshu"):
        return [0.5 / 2**k for k in range(5)]
    if problem.startswith("burgers"):
        return [0.012 / 2**k for k in range(4)]
    return None


def _resolve_methods(args):
    """Return the list of tableaux selected by --method / --tableau-file."""
    if args.tableau_file is not None:
        tab = load_tableau_file(args.tableau_file)
        if args.method:
            tab = dataclasses.replace(tab, name=args.method[0])
        return [tab]
    names = args.method or list(REGISTRY_NAMES)
    return [builtin(n) for n in names]


def _resolve_one_method(args):
    if args.method is None and args.tableau_file is None:
        raise UsageError("this subcommand needs --method or --tableau-file")
    tabs = _resolve_methods(args)
    if len(tabs) != 1:
        raise UsageError("this subcommand takes exactly one --method")
    return tabs[0]


def _resolve_problem(args):
    if args.problem is None:
        raise UsageError("missing --problem")
    if args.problem == "oscillator":
        return oscillator()
    if args.problem == "sunshu":
        return sun_shu()
    if args.problem == "advection":
        ic = "sech2" if args.seed is None else "white_noise"
        return spectral_advection(args.m, ic=ic, seed=args.seed)
    if args.problem in ("burgers-cons", "burgers-diss"):
        flux = "conservative" if args.problem == "burgers-cons" else "dissipative"
        cfg = BurgersConfig(n=args.n, flux=flux, epsilon=args.eps)
        return burgers(cfg)
    raise UsageError(f"unknown problem {args.problem!r}")


def _resolve_dt(args, tab) -> float:
    """dt is given directly except on advection, which is mu-parameterized."""
    if args.problem == "advection":
        if args.mu is None or args.dt is not None:
            raise UsageError("advection runs take --mu (not --dt)")
        sp = stability_polynomial(tab)
        return float(args.mu) * dt_max(sp, 1.0, args.m)
    if args.dt is None or args.mu is not None:
        raise UsageError("this problem takes --dt (--mu is advection-only)")
    return float(args.dt)


def _require_t_end(args) -> float:
    if args.t_end is None:
        raise UsageError("missing --t-end")
    return float(args.t_end)


def _state_grid(prob):
    if prob.name.startswith("burgers"):
        return "x", burgers_grid(prob.dim)
    if prob.name.startswith("advection"):
        return "x", 2.0 * np.pi * np.arange(prob.dim) / prob.dim
    return "index", np.arange(prob.dim)


def cmd_list_methods(args, out_dir):
    print("method,stages,order,ssp_coeff,gamma_star")
    for name in REGISTRY_NAMES:
        tab = builtin(name)
        diag = validate(tab)
        rep = ssp_coefficient(tab)
        gs = rep.gamma_star if rep.gamma_star is not None else ""
        print(_csv_line((name, tab.stages, diag.order, rep.ssp_coeff, gs)))
    return []


def cmd_validate(args, out_dir):
    tab = _resolve_one_method(args)
    diag = validate(tab)
    worst = max((r for tr, r in diag.residuals if tr.order <= diag.order), default=0.0)
    print(f"name: {tab.name}")
    print(f"stages: {tab.stages}")
    print(f"order: {diag.order}")
    print(f"explicit: {diag.explicit}")
    print(f"c_consistent: {diag.c_consistent}")
    print(f"nonneg_weights: {diag.nonneg_weights}")
    print(f"positivity_sum: {_fmt(diag.positivity_sum)}")
    print(f"max_residual_through_order: {_fmt(worst)}")
    return []


def cmd_integrate(args, out_dir):
    tab = _resolve_one_method(args)
    prob = _resolve_problem(args)
    dt = _resolve_dt(args, tab)
    t_end = _require_t_end(args)
    traj = integrate(tab, prob, prob.t0, prob.u0, dt, t_end, args.mode)
    slug = _slug(tab.name)
    rows = zip(traj.t, traj.gamma, traj.energy)
    paths = [
        _write_csv(out_dir / f"trajectory_{slug}_{args.mode}.csv", "t,gamma,energy", rows)
    ]
    if args.dump_state:
        label, grid = _state_grid(prob)
        rows = zip(grid, traj.states[-1])
        paths.append(
            _write_csv(out_dir / f"state_{slug}_{args.mode}.csv", f"{label},u", rows)
        )
    for w in traj.metadata["warnings"]:
        print(w, file=sys.stderr)
    return paths


def cmd_energy(args, out_dir):
    tab = _resolve_one_method(args)
    prob = _resolve_problem(args)
    dt = _resolve_dt(args, tab)
    t_end = _require_t_end(args)
    traj = integrate(tab, prob, prob.t0, prob.u0, dt, t_end, args.mode)
    slug = _slug(tab.name)
    rows = zip(traj.t, traj.energy)
    return [_write_csv(out_dir / f"energy_{slug}_{args.mode}.csv", "t,energy", rows)]


def cmd_convergence(args, out_dir):
    tabs = _resolve_methods(args)
    prob = _resolve_problem(args)
    t_end = _require_t_end(args)
    dts = args.dts or _default_dts(args.problem)
    if dts is None:
        raise UsageError("this problem needs an explicit --dts list")
    if prob.exact is None:
        ref_dt = min(dts) / 32.0
        prob = dataclasses.replace(prob, exact=make_reference_exact(prob, dt=ref_dt))
    rows = []
    for tab in tabs:
        points, slope = convergence_study(
            tab, prob, prob.t0, prob.u0, dts, t_end, args.mode
        )
        for dt, err, achieved, _ in points:
            rows.append((tab.name, args.mode, dt, err, achieved, slope))
    header = "method,mode,dt,error,achieved_t,slope"
    return [_write_csv(out_dir / "convergence.csv", header, rows)]


def cmd_gamma_study(args, out_dir):
    tabs = _resolve_methods(args)
    prob = _resolve_problem(args)
    dts = args.dts or _default_dts(args.problem)
    if dts is None:
        raise UsageError("this problem needs an explicit --dts list")
    rows = []
    for tab in tabs:
        points, slope = gamma_study(tab, prob, prob.t0, prob.u0, dts)
        for dt, dev in points:
            rows.append((tab.name, dt, dev, slope))
    return [_write_csv(out_dir / "gamma_study.csv", "method,dt,gamma_dev,slope", rows)]


def cmd_stability_region(args, out_dir):
    tabs = _resolve_methods(args)
    gammas = args.gamma or [1.0]
    paths = []
    for tab in tabs:
        sp = stability_polynomial(tab)
        slug = _slug(tab.name)
        for g in gammas:
            scan = stability_region_scan(sp, g)
            rows = []
            for i, im in enumerate(scan.im):
                for j, re_ in enumerate(scan.re):
                    rows.append((re_, im, bool(scan.stable[i, j])))
            paths.append(
                _write_csv(out_dir / f"region_{slug}_g{g}.csv", "re,im,stable", rows)
            )
            boundary = region_boundary(scan)
            paths.append(
                _write_csv(out_dir / f"boundary_{slug}_g{g}.csv", "re,im", boundary)
            )
    return paths


def cmd_ssp_table(args, out_dir):
    rows = []
    for name in REGISTRY_NAMES:
        tab = builtin(name)
        diag = validate(tab)
        rep = ssp_coefficient(tab)
        gs = rep.gamma_star if rep.gamma_star is not None else ""
        rows.append((name, tab.stages, diag.order, rep.ssp_coeff, gs))
    header = "method,stages,order,ssp_coeff,gamma_star"
    return [_write_csv(out_dir / "ssp_table.csv", header, rows)]


def cmd_modes(args, out_dir):
    if args.problem != "advection":
        raise UsageError("modes runs on --problem advection")
    tab = _resolve_one_method(args)
    prob = _resolve_problem(args)
    dt = _resolve_dt(args, tab)
    t_end = _require_t_end(args)
    traj = integrate(tab, prob, prob.t0, prob.u0, dt, t_end, args.mode)
    xi, rel = mode_amplification(prob.u0, traj.states[-1], prob.dim)
    slug = _slug(tab.name)
    rows = zip(xi, rel)
    return [_write_csv(out_dir / f"modes_{slug}_{args.mode}.csv", "xi,rel_change", rows)]


DISPATCH = {
    "list-methods": cmd_list_methods,
    "validate": cmd_validate,
    "integrate": cmd_integrate,
    "convergence": cmd_convergence,
    "gamma-study": cmd_gamma_study,
    "energy": cmd_energy,
    "stability-region": cmd_stability_region,
    "ssp-table": cmd_ssp_table,
    "modes": cmd_modes,
}

# every flag a manifest can carry, with its default; replay starts from these
ARG_FIELDS = {
    "method": None,
    "mode": "rrk",
    "problem": None,
    "dt": None,
    "mu": None,
    "t_end": None,
    "m": 128,
    "n": 50,
    "eps": 0.01,
    "seed": None,
    "dts": None,
    "gamma": None,
    "out": ".",
    "tableau_file": None,
    "dump_state": False,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="relaxrk", description=__doc__.splitlines()[0])
    parser.add_argument("--manifest", help="replay a previously written manifest")
    parser.add_argument("--version", action="version", version=f"relaxrk {__version__}")
    sub = parser.add_subparsers(dest="subcommand")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, prog=f"relaxrk {name}")
        p.add_argument("--method", action="append")
        p.add_argument("--mode", choices=MODES, default="rrk")
        p.add_argument("--problem", choices=PROBLEMS)
        p.add_argument("--dt", type=float)
        p.add_argument("--mu", type=float)
        p.add_argument("--t-end", dest="t_end", type=float)
        p.add_argument("--m", type=int, default=128)
        p.add_argument("--n", type=int, default=50)
        p.add_argument("--eps", type=float, default=0.01)
        p.add_argument("--seed", type=int)
        p.add_argument("--dts", type=float, nargs="+")
        p.add_argument("--gamma", type=float, nargs="+")
        p.add_argument("--out", default=".")
        p.add_argument("--tableau-file", dest="tableau_file")
        p.add_argument("--dump-state", dest="dump_state", action="store_true")
    return parser


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _write_manifest(subcommand, args, out_dir: Path, outputs) -> None:
    manifest = {
        "subcommand": subcommand,
        "args": {k: _jsonable(getattr(args, k)) for k in ARG_FIELDS},
        "outputs": sorted(str(p) for p in outputs),
        "version": __version__,
    }
    text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    (out_dir / "manifest.json").write_text(text)


def _load_manifest(path):
    data = json.loads(Path(path).read_text())
    subcommand = data["subcommand"]
    if subcommand not in DISPATCH:
        raise UsageError(f"manifest names unknown subcommand {subcommand!r}")
    values = dict(ARG_FIELDS)
    for k, v in data.get("args", {}).items():
        if k not in ARG_FIELDS:
            raise UsageError(f"manifest carries unknown field {k!r}")
        values[k] = v
    return subcommand, argparse.Namespace(**values)


def _run(subcommand, args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = DISPATCH[subcommand](args, out_dir)
    if outputs:
        _write_manifest(subcommand, args, out_dir, outputs)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.manifest is not None:
            subcommand, args = _load_manifest(args.manifest)
        elif args.subcommand is None:
            parser.error("missing subcommand (or --manifest)")
        else:
            subcommand = args.subcommand
        return _run(subcommand, args)
    except IntegrationError as exc:
        where = "" if exc.step_index is None else f" at step {exc.step_index}"
        print(f"relaxrk: numerical abort{where}: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"relaxrk: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
