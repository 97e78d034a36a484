"""Deleting and reordering entries.

Removal comes in two flavors: a unitary merge that pours the doomed entry's
weight back into the reservoir (succeeds always, data is wiped first), and a
projective cut that measures "somewhere else?" and keeps the survivors
(usually succeeds, certifies the entry is gone). Reordering is a permutation
of index patterns, conditioned on the data register staying put.
"""

import math

from qdbsim import (
    permute,
    prepare_general,
    remove_projective,
    remove_reservoir,
    transpose_entries,
)

db = prepare_general(5, data={1: "1", 3: "1"})
print(f"start: k={db.k}, l={db.l}, data={dict(db.descriptor.data)}")

# Reservoir removal: entry 3's weight moves to entry 0; k drops, l grows.
db = remove_reservoir(db, 3)
print(f"\nafter remove_reservoir(3): k={db.k}, l={db.l}, "
      f"labels={db.layout.labels}")
print(f"reservoir now {abs(db.reservoir_amplitude()):.6f} "
      f"(expect {math.sqrt(2/5):.6f})")
db.check()

# Projective removal: succeeds with probability (k+l-1)/(k+l) here.
db2 = prepare_general(4, data={2: "1"})
outcome = remove_projective(db2, 1)
print(f"\nremove_projective(1) on k=4: success probability "
      f"{outcome.success_probability:.4f}")
ok = outcome.success_state
print(f"survivors: labels={ok.layout.labels}, "
      f"amplitudes all {abs(ok.amplitude(0)):.6f} "
      f"(expect {1/math.sqrt(3):.6f})")
fail_support = [i for i, a in enumerate(outcome.failure_state.amplitudes)
                if abs(a) > 1e-12]
print(f"failure branch statevector is also returned; its support "
      f"{fail_support} is entry 1's pattern alone")

# Permutations act on index patterns only. A transposition is the smallest;
# dicts may name just the moved labels (everyone else stays put).
db3 = prepare_general(4, data={1: "01", 2: "10"})
db3 = transpose_entries(db3, 1, 2)
print(f"\nafter transposing 1 <-> 2: data={dict(db3.descriptor.data)}")
db3 = permute(db3, {1: 3, 3: 1})
print(f"after permute {{1: 3, 3: 1}}: data={dict(db3.descriptor.data)}")
db3.check()

# The reservoir can join a cycle only while it carries no extra weight and
# the entry moving onto label 0 is empty.
db4 = prepare_general(3)
db4 = permute(db4, [1, 0, 2])
print(f"\nreservoir swapped with empty entry 1: labels {db4.layout.labels} ok")
db4.check()
