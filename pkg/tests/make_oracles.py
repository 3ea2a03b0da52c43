"""Regenerate the frozen special-function oracle table.

Run from the repository root::

    python3 tests/make_oracles.py

The table holds 1000 log-spaced points on [1e-6, 100] with J0, N0 and H0
from the 50-digit series oracles in ``oracles.py``, written with 20
significant digits.
"""
import os
import sys

import numpy as np

sys.path.insert(0, os.path.dirname(__file__))
import oracles  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "relscatter", "data", "specfun_oracle.csv")


def main():
    rho = np.geomspace(1e-6, 100.0, 1000)
    with open(OUT, "w") as fh:
        fh.write("rho,j0,n0,h0\n")
        for x in rho:
            x = float(x)
            vals = [oracles.j0(x), oracles.n0(x), oracles.h0(x)]
            fh.write(repr(x) + "," + ",".join(oracles.mp.nstr(v, 20) for v in vals) + "\n")


if __name__ == "__main__":
    main()
