#!/usr/bin/env python3
"""NMI vs antenna count for all five topologies.

Produces two CSVs: unconstrained arrays at half-wavelength spacing and
space-constrained arrays with diagonal D = 7.77 wavelengths.
"""

import sys
from pathlib import Path

from arraynmi.cli import main

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results")


def run():
    OUT.mkdir(parents=True, exist_ok=True)
    common = ["--m", "4,16,36,64,100,144", "--angles", "measured",
              "--mc-samples", "0", "--seed", "1"]
    main(["sweep-m", *common, "--d", "0.5",
          "--out", str(OUT / "nmi_vs_m_unconstrained.csv")])
    main(["sweep-m", *common, "--D", "7.77",
          "--out", str(OUT / "nmi_vs_m_constrained.csv")])


if __name__ == "__main__":
    run()
