"""Write CSV data behind the three figures into an output directory.

fig1: WKB-gauge walls of a silica-like C3-C4 well at 0.001, 0.1, 10 neV
fig2: walls at 0.01 neV for porosity presets 0, 50, 90 %
fig3: R against kappa*b for the same models and for the pure C4 curve
plus the universal C4 wall table.

Usage: python scripts/reproduce_figures.py [outdir] [--threads N]
"""

import argparse
import math
from pathlib import Path

import numpy as np

from qrefl import gauge, scatter
from qrefl.cli import fmt
from qrefl.potentials import C3C4, PRESET_ELL, SILICA_LIKE_C3, PureC4, ScatteringProblem
from qrefl.units import HYDROGEN, convert_energy


def write(path, header, cols, rows):
    lines = [f"# {h}" for h in header] + [",".join(cols)]
    lines += [",".join(fmt(v) for v in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    print("wrote", path)


def wall(model, e_nev, path):
    p = ScatteringProblem(model, HYDROGEN, convert_energy(e_nev, "neV", "hartree"))
    prof = gauge.wkb_gauge(p, p.z_scale * np.logspace(-3, 3, 601))
    write(path, [f"{model.label} E={e_nev} neV", f"E_bold = {fmt(prof.e_bold)}"],
          ["z_a0", "z_bold", "V_bold"], list(prof))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", nargs="?", default="figure_data")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)

    uc = gauge.universal_curve(np.linspace(-5, 5, 1001))
    write(out / "universal.csv", ["universal pure C4 wall"], ["u", "z_bold", "V_bold"],
          zip(uc.u, uc.z_bold, uc.v_bold))

    silica = C3C4.from_ell(PRESET_ELL[0], c3=SILICA_LIKE_C3, label="eta=0%")
    for e in (0.001, 0.1, 10.0):
        wall(silica, e, out / f"fig1_E{e}neV.csv")

    models = {eta: C3C4.from_ell(PRESET_ELL[eta], c3=SILICA_LIKE_C3, label=f"eta={eta}%")
              for eta in (0, 50, 90)}
    for eta, m in models.items():
        wall(m, 0.01, out / f"fig2_eta{eta}.csv")

    kb = np.logspace(-3, math.log10(3.0), 40)
    c4 = ScatteringProblem.from_kappa_ell(PureC4.from_ell(PRESET_ELL[0]), 1.0)
    ref = scatter.reflection_scan(c4, kb / c4.ell, workers=args.threads)
    write(out / "fig3_c4.csv", ["pure C4, b = ell"], ["kappa_b", "R"], zip(kb, ref.R))
    e001 = convert_energy(0.01, "neV", "hartree")
    for eta, m in models.items():
        p = ScatteringProblem.from_kappa_ell(m, 1.0)
        small = np.logspace(-4, math.log10(5e-3), 6) / p.ell
        fit = scatter.extract_b(scatter.reflection_scan(p, small, workers=args.threads))
        sc = scatter.reflection_scan(p, kb / fit.b, workers=args.threads)
        point = scatter.solve_one_way(ScatteringProblem(m, HYDROGEN, e001))
        write(out / f"fig3_eta{eta}.csv",
              [f"{m.label}", f"b = {fmt(fit.b)} a0, ell = {fmt(p.ell)} a0",
               f"E=0.01neV point: kappa_b = {fmt(point.kappa * fit.b)}, R = {fmt(point.R)}"],
              ["kappa_b", "R"], zip(kb, sc.R))


if __name__ == "__main__":
    main()
