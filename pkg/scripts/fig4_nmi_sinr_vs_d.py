#!/usr/bin/env python3
"""NMI and mean MMSE SINR vs constraint diagonal D at M = 100, L = 4 users.

Uplink SNR is calibrated so the median received SNR is -5 dB.
"""

import sys
from pathlib import Path

from arraynmi.cli import main

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results")

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    grid = ",".join(str(round(m * 7.77, 4)) for m in (0.25, 0.5, 1, 2, 4, 8, 12))
    main(["sweep-d", "--m", "100", "--D", grid, "--sinr-drops", "200",
          "--sinr-average", "db", "--seed", "1",
          "--out", str(OUT / "nmi_sinr_vs_d.csv")])
