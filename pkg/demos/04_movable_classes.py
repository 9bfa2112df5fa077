"""
Which homology classes escape to infinity?
==========================================

In the wedge of a circle and a 2-sphere the point class can be pushed off
to infinity in either direction, while the sphere class cannot.
"""

from sigmakit import QQ, Character, builtin, movable_to_infinity

C = builtin("wedge-s1-s2")
xi = Character([1])

point = {0: C.one()}
m = movable_to_infinity(C, 0, point, xi)
print("point class:", m.status.value)
print("  Delta =", m.delta, "  filling =", {j: str(v) for j, v in m.filling.items()})
print("  d(filling) = Delta * z:", m.check(C, 0, point))

sphere = {0: C.one().change_ring(QQ)}
for direction in (xi, -xi):
    r = movable_to_infinity(C, 2, sphere, direction, QQ)
    print(f"sphere class towards {direction}: {r.status.value} ({r.reason})")
