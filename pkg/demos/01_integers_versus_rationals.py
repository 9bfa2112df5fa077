"""
Integers see more than the rationals
====================================

The mapping torus of a degree-two self-map of the circle has the group
BS(1,2) as fundamental group.  Over Q both directions of its deck group
look finite; over Z one of them does not.
"""

from sigmakit import QQ, ZZ, Character, builtin, sigma_membership, sphere_scan, verify_no_witness

C = builtin("bs12")
print("cell ranks:", C.ranks)
print("d2 =", C.d(2).get(0, 0), " d1 =", C.d(1).get(0, 1))

up, down = Character([1]), Character([-1])

for ring in (QQ, ZZ):
    for xi in (up, down):
        v = sigma_membership(C, xi, 1, ring)
        print(f"over {ring}, xi={xi}: {v.status.value} ({v.layer})")

# the negative answer carries a witness that can be re-checked on its own
no = sigma_membership(C, up, 1, ZZ)
w = no.witness
print(f"witness: degree-{w.degree} cycle over {w.field} ({w.coefficients}), modulus {w.modulus}, prime {w.prime}")
print("re-checked:", verify_no_witness(C, up, 1, w))

# a full scan turns the verdicts into a statement about the cover
for c in sphere_scan(C, 1, ZZ).conclusions:
    print("-", c.statement, c.provenance)
