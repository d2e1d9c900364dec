#!/usr/bin/env python3
"""Tour of access-structure modelling: antichains, duality, purification.

Deterministic, stdout only.  Run as: python3 demos/01_access_structures.py
"""

from qssbounds import (
    csirmaz,
    dual,
    from_minimal_sets,
    is_quantum,
    is_self_dual,
    purify,
    theorem3_reference_bound,
)


def show(title, structure):
    sets = "; ".join(str(m) for m in structure.minimal_sets)
    print(f"{title}: n={structure.n}  minimal sets {sets}")
    print(f"    quantum: {is_quantum(structure)}   self-dual: {is_self_dual(structure)}")


print("== a 4-player structure and its transforms ==")
gamma4 = from_minimal_sets(4, [[1, 2], [1, 3], [2, 3, 4]])
show("gamma4", gamma4)

X = gamma4.subset([1, 2, 3])
Y = gamma4.subset([2, 3])
print(f"    {X} authorized? {gamma4.is_authorized(X)}; {Y} authorized? {gamma4.is_authorized(Y)}")

show("dual(gamma4)", dual(gamma4))
print(f"    dual is an involution: {dual(dual(gamma4)) == gamma4}")

bar = purify(gamma4)
show("purify(gamma4)", bar)
print("    every original subset keeps its status; the new party 5 joins")
print("    one side of each complementary unauthorized pair.")

print()
print("== the staircase family ==")
for n in (4, 5, 9):
    s, params = csirmaz(n)
    sets = "; ".join(str(m) for m in s.minimal_sets)
    print(f"n={n}: k={params.k}, {len(s.minimal_sets)} minimal sets: {sets}")
print()
print("closed-form share-size references (largest share / secret):")
for k in (2, 3, 4):
    print(f"    k={k}: {theorem3_reference_bound(k)}")
