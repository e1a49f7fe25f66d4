"""How the Bergman kernel moves with the fiber, checked against finite differences.

Run with ``python demos/variation_formulas.py``.  Every formula value is set
next to a Richardson-extrapolated finite difference of the kernel in ``t``.
"""

import numpy as np

from bergvar.bergman import PolyField, weight_preset
from bergvar.domains import family_preset
from bergvar.variation import (
    fiber_integral_derivative,
    fiber_space,
    first_variation,
    l2_identity_check,
    nakano_form,
    second_variation_planar,
)

zero = weight_preset("zero")
scaled, squeezed = family_preset("scaled_disk"), family_preset("squeezed_disk")


def show(label, rep):
    print(f"   {label:<34} formula {rep.formula:.10f}   FD {rep.oracle:.10f}   rel {rep.rel_residual:.1e}")


print("1. Fiber integrals.  d/dt of an integral over D_t is an interior term plus a boundary")
print("   contraction with the quasi-Kahler-Einstein field.")
show("area of the scaled disk (exact pi)", fiber_integral_derivative(scaled, "one", 0))
show("|zeta - t|^2 over the squeezed disk", fiber_integral_derivative(squeezed, "t_coupled", 0.2 + 0.1j))

print("\n2. First variation of the kernel: a weight term minus a boundary term.")
show("scaled disk K(0,0) (exact -1/pi)", first_variation(scaled, zero, 0, 0, 0))
show("squeezed disk K(0.2, conj -0.1i)", first_variation(squeezed, zero, 0.2 + 0.1j, 0.2, -0.1j))
show("squeezed disk, weight |zeta|^2", first_variation(squeezed, weight_preset("abs2"), 0.1, 0.1, 0.2j))

print("\n3. Second variation: boundary + derivative-kernel + harmonic terms.")
for label, fam, t in [("scaled disk at t=0", scaled, 0), ("squeezed disk at t=0", squeezed, 0),
                      ("squeezed disk at t=0.2", squeezed, 0.2)]:
    r = second_variation_planar(fam, t, 0, 0)
    terms = ", ".join(f"{k} {r.terms[k].real:+.6f}" for k in ("boundary", "derivative_kernel", "harmonic"))
    show(label, r)
    print(f"      terms: {terms}")
print(f"   (scaled disk expectation: 0, 1/pi = {1 / np.pi:.6f}, 0)")

print("\n4. Norm split of b = g dmubar into a dbar-exact part and a harmonic part (g = zeta on the disk).")
nb, na, nb1, resid = l2_identity_check(fiber_space(family_preset("fixed_disk"), zero, 0),
                                       PolyField(np.array([[0], [1]], dtype=complex)))
print(f"   |b|^2 = {nb:.10f}, |a|^2 = {na:.10f}, |b1|^2 = {nb1:.1e}, residual {resid:.1e}  (pi/2 = {np.pi / 2:.10f})")

print("\n5. The Nakano form on r points: zero for the Levi-flat scaled disk, positive for the squeezed disk.")
for label, fam in [("scaled disk", scaled), ("squeezed disk", squeezed)]:
    for r in (1, 2, 3):
        n = nakano_form(fam, zero, 0, [0, 0.3, -0.2 + 0.25j][:r])
        print(f"   {label:<14} r={r}: eigenvalues {np.array2string(n.eigenvalues, precision=6)}")
print(f"   (squeezed disk r=1 expectation 1/(4 pi) = {1 / (4 * np.pi):.6f})")
