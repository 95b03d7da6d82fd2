"""Covering error of a perfectly correlated bit against its three bounds.

Run with ``python demos/covering_bit.py``. The exact error halves from M=1
to M=2 and then decays slowly; the exponent bound tracks it from above
while both converses stay at or below it.
"""

import numpy as np

from convexsplit import convex_split as cs
from convexsplit import testkit as tk

rho = tk.classical_embed([[0.5, 0.0], [0.0, 0.5]])
inst = cs.ConvexSplitInstance(rho, np.eye(2) / 2)

print(f"{'M':>3} {'exact':>8} {'upper':>8} {'converse':>9} {'strong':>8}")
for M in range(1, 10):
    x = inst.at(M)
    print(f"{M:>3} {cs.covering_error_exact(x):8.4f} {cs.exponent_upper_bound(x).value:8.4f} "
          f"{cs.oneshot_converse_lower_bound(x).value:9.4f} {cs.strong_converse_lower_bound(x).value:8.4f}")
