"""Regenerate tests/fixtures/c4_oracle.csv from the Numerov oracle.

Usage: python scripts/make_oracle_fixture.py
"""

from pathlib import Path

from qrefl import __version__
from qrefl.oracle import DEFAULT_STEPS, numerov_oracle

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "c4_oracle.csv"
KAPPA_ELL = (0.1, 0.5, 1.0)


def main():
    lines = [
        f"# pure C4 reflection probabilities, Numerov oracle, qrefl {__version__}",
        f"# wall coordinate, steps {DEFAULT_STEPS}, Richardson on h^4",
        "# R_h columns are the raw sweeps (convergence evidence)",
        "kappa_ell,R,error_bar,R_h1,R_h2,R_h3",
    ]
    for kl in KAPPA_ELL:
        o = numerov_oracle(kl)
        vals = [kl, o.R, o.error_bar, *o.levels]
        lines.append(",".join(repr(float(v)) for v in vals))
    OUT.write_text("\n".join(lines) + "\n")
    print(OUT.read_text())


if __name__ == "__main__":
    main()
