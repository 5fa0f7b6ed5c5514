"""Low-energy parameter b for every porosity preset (C3-C4 model, fixed C3).

Usage: python scripts/b_table.py [--c3 0.05] [--threads N]
"""

import argparse
import math

import numpy as np

from qrefl import scatter
from qrefl.potentials import C3C4, PRESET_ELL, SILICA_LIKE_C3, PureC4, ScatteringProblem


def fit_b(model, threads):
    p = ScatteringProblem.from_kappa_ell(model, 1.0)
    ks = np.logspace(-4, math.log10(5e-3), 8) / p.ell
    return p.ell, scatter.extract_b(scatter.reflection_scan(p, ks, workers=threads))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--c3", type=float, default=SILICA_LIKE_C3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    print("eta_pct,ell_a0,b_c4_a0,b_c3c4_a0,b_over_ell")
    for eta, ell in PRESET_ELL.items():
        _, c4 = fit_b(PureC4.from_ell(ell), args.threads)
        _, fit = fit_b(C3C4.from_ell(ell, c3=args.c3), args.threads)
        print(f"{eta},{ell},{c4.b:.2f},{fit.b:.2f},{fit.b / ell:.4f}")


if __name__ == "__main__":
    main()
