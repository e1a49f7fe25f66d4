"""A tour of the numerical Bergman kernel on a few planar fibers.

Run with ``python demos/kernel_tour.py``.  Each step prints a computed value
next to a closed form where one is known.
"""

import numpy as np

from bergvar.bergman import eval_kernel, weight_preset
from bergvar.domains import family_preset
from bergvar.variation import Resolution, fiber_space

zero = weight_preset("zero")

print("1. Unit disk.  K(z, conj w) = 1 / (pi (1 - z conj w)^2).")
disk = fiber_space(family_preset("fixed_disk"), zero, 0)
for z, w in [(0, 0), (0.5, 0.5), (0.3 + 0.2j, -0.4j)]:
    exact = 1 / (np.pi * (1 - z * np.conj(w)) ** 2)
    print(f"   K({z}, conj {w}) = {complex(eval_kernel(disk, z, w)):.12f}   exact {exact:.12f}")
print(f"   Gram residual of the orthonormal basis: {disk.gram_residual():.1e}, rank {disk.rank}")

print("\n2. Scaled disk |zeta| < |1 + t|.  The diagonal at the origin is 1 / (pi |1 + t|^2).")
fam = family_preset("scaled_disk")
for t in [0, 0.2, 0.3j]:
    sp = fiber_space(fam, zero, t)
    print(f"   t = {t}:  K(0, 0) = {eval_kernel(sp, 0, 0).real:.12f}   exact {1 / (np.pi * abs(1 + t) ** 2):.12f}")

print("\n3. Squeezed disk |zeta|^2 - 1 + Re(t zeta^2) < 0: an ellipse with no simple closed form.")
fam = family_preset("squeezed_disk")
for N in (12, 24, 36):
    sp = fiber_space(fam, zero, 0.3, Resolution(N=N))
    print(f"   N = {N:2d}:  K(0.2, conj 0.2) = {eval_kernel(sp, 0.2, 0.2).real:.12f}")

print("\n4. A weight phi = |zeta|^2 on the unit disk.  The kernel is no longer the unweighted one,")
print("   but it still reproduces holomorphic functions against e^{-phi} dA.")
wsp = fiber_space(family_preset("fixed_disk"), weight_preset("abs2"), 0)
f = wsp.basis(wsp.quad.interior_nodes) @ np.array([1, 0.5, -0.2j] + [0] * (wsp.rank - 3))
z0 = 0.3 - 0.1j
repro = np.sum(eval_kernel(wsp, np.full(f.shape, z0), wsp.quad.interior_nodes) * f * wsp.measure)
direct = wsp.basis(np.array([z0])) @ np.array([1, 0.5, -0.2j] + [0] * (wsp.rank - 3))
print(f"   <f, K(., conj z0)> = {complex(repro):.12f}   f(z0) = {complex(direct[0]):.12f}")
