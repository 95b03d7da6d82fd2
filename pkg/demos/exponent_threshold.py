"""Sign change of the two exponents as log M crosses the mutual information.

Below ``I(rho||tau)`` only the strong-converse exponent is positive, above
it only the achievability exponent is.
"""

import numpy as np

from convexsplit import convex_split as cs
from convexsplit import divergences as dv
from convexsplit import information as info
from convexsplit import testkit as tk

rng = np.random.default_rng(7)
rho, tau = tk.random_bipartite(2, 2, rng), tk.random_density(2, seed=rng)
inst = cs.ConvexSplitInstance(rho, tau)
i = info.generalized_mutual_information(rho, tau, (2, 2))
curve = info.sandwiched_renyi_information_curve(rho, tau, cs.ALPHA_EXPONENT, (2, 2))
ref = np.kron(tau, inst.rho_B)
petz = [dv.petz_renyi(rho, ref, 2 - 1 / a) for a in cs.ALPHA_STRONG]

print(f"I(rho||tau) = {i:.4f} nats")
for logm in np.linspace(max(i - 0.5, 0), i + 0.5, 11):
    up = max((a - 1) / a * (logm - r.value) for a, r in zip(cs.ALPHA_EXPONENT, curve))
    sc = max((1 - a) / a * (p - logm) for a, p in zip(cs.ALPHA_STRONG, petz))
    print(f"log M = {logm:.3f}  achievability {up:+.5f}  strong converse {sc:+.5f}")
