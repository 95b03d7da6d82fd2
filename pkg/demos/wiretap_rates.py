"""Privacy error bound of the bundled wiretap example over message rates.

At a single copy the bound itself is loose. The witness exponents are the
informative part: some randomization rate log K makes both positive
exactly when ``log M < I(X:B) - I(X:E)``.
"""

import numpy as np

from convexsplit import applications as apps
from convexsplit.cli import resolve_path
from convexsplit.io import load_bundle

state = load_bundle(resolve_path("bundled:wiretap_example"))["states"]["rho_XBE"]
first = apps.wiretap_bound(state, 0.0)
gap = first.params["I_XB"] - first.params["I_XE"]
print(f"I(X:B) - I(X:E) = {gap:.4f} nats")
for logm in np.linspace(0, 1.5 * gap, 7):
    b = apps.wiretap_bound(state, float(logm))
    w = b.params["witness"]
    print(f"log M = {logm:.3f}  bound {b.epsilon_bound:.4f}  region {b.positivity_region!s:5}  "
          f"witness log K {w['logK']:.3f} exponents ({w['packing_exponent']:+.4f}, {w['covering_exponent']:+.4f})")
