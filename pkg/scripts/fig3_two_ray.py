#!/usr/bin/env python3
"""Two-ray interference vs angular offset, M = 100 under the D = 7.77 constraint.

One broadside ray, the second offset in azimuth, elevation, or both.
"""

import sys
from pathlib import Path

from arraynmi.cli import main

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("results")

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    main(["two-ray", "--m", "100", "--D", "7.77",
          "--max-offset-deg", "15", "--offset-step-deg", "0.25",
          "--out", str(OUT / "two_ray.csv")])
