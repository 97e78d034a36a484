"""Ancilla-bounded growth: when z fresh wires must host l new entries.

With z ancillas there are only 2^z - 1 nonzero ancilla patterns. If l fits
(l <= 2^z - 1) each pattern hosts one entry and the result is balanced;
otherwise every ancilla pattern is spread over l'' = l / l' index patterns
and the new entries land lighter than the old ones.
"""

import json
import math

from qdbsim import extend_imbalanced, plan_extend_imbalanced, prepare_general

# Three new entries through two ancillas: exactly the 2^2 - 1 nonzero
# patterns, one entry each, so everything stays uniform.
plan = plan_extend_imbalanced(4, 3, 2)
report = {key: v for key, v in plan.to_report().items() if key != "amplification"}
print("plan for k=4, l=3, z=2:")
print(json.dumps(report, indent=2))

db = prepare_general(4, data={1: "1"})
db = extend_imbalanced(db, 3, 2)
print(f"\nresult: k={db.k}, balanced={db.amplitude_profile is None}")
for j in db.layout.labels:
    print(f"  |{j}|: {abs(db.amplitude(j)):.6f}")
db.check()

# Overload the ancillas: 6 new entries through z=2 (only 3 patterns).
# Each pattern is spread over l'' = 2 index patterns; gamma < beta.
plan = plan_extend_imbalanced(4, 6, 2)
print(f"\nk=4, l=6, z=2: l'={plan.l_prime}, l''={plan.l_double_prime}, "
      f"balanced={plan.balanced}")
print(f"  alpha (reservoir)  {plan.alpha:.6f}")
print(f"  beta  (old entry)  {plan.beta:.6f}")
print(f"  gamma (new entry)  {plan.gamma:.6f}")

db2 = prepare_general(4, data={1: "1"})
db2 = extend_imbalanced(db2, 6, 2)
print(f"result: k={db2.k}, profile={ {j: round(v, 6) for j, v in (db2.amplitude_profile or {}).items()} }")
got = sorted({round(abs(db2.amplitude(j)), 9) for j in db2.layout.labels if j})
print(f"distinct nonreservoir moduli: {got}")
db2.check()

# The index-spread stage has two interchangeable implementations; both land
# on the same state.
db3 = prepare_general(4)
db3 = extend_imbalanced(db3, 6, 2, route="marker")
print(f"\nmarker route agrees: "
      f"{all(abs(abs(db2.amplitude(j)) - abs(db3.amplitude(j))) < 1e-12 for j in db2.layout.labels)}")

# Weight can also be reserved at preparation time: a database built with
# prepare_general(k, l) already holds the loaded reservoir, so the extension
# skips the amplification rounds and goes straight to spreading.
db4 = extend_imbalanced(prepare_general(4, l=6), 6, 2)
print(f"preloaded route agrees: "
      f"{all(abs(abs(db2.amplitude(j)) - abs(db4.amplitude(j))) < 1e-12 for j in db2.layout.labels)}")

# Weight check: the totals still sum to 1.
total = sum(abs(db2.amplitude(j)) ** 2 for j in db2.layout.labels)
print(f"total probability over the {db2.k} patterns: {total:.12f}")
assert math.isclose(total, 1.0, abs_tol=1e-9)
