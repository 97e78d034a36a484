"""Preparing databases: uniform spreads, reservoirs, and data words.

A database over k entries is a uniform superposition of k index patterns,
each tagged with a data word. Entry 0 is special: it always holds the empty
word and can carry extra weight (the "reservoir") that later pays for new
entries.
"""

import math

from qdbsim import prepare_balanced, prepare_general

# A plain 6-entry database: every entry at amplitude 1/sqrt(6).
db = prepare_general(6)
print(f"k={db.k} entries on {db.n_qubits} qubits")
print(f"entry amplitude   {abs(db.amplitude(3)):.6f}  (expect {1/math.sqrt(6):.6f})")

# Reserve weight for 4 future entries: the reservoir carries sqrt(5/10).
db = prepare_general(6, l=4)
print(f"\nwith l=4 reserved:")
print(f"reservoir         {abs(db.reservoir_amplitude()):.6f}  (expect {math.sqrt(5/10):.6f})")
print(f"entry amplitude   {abs(db.amplitude(1)):.6f}  (expect {math.sqrt(1/10):.6f})")

# Data words ride along in the data register, one word per index pattern.
db = prepare_general(5, data={1: "01", 2: "10", 4: "11"})
print(f"\nwith data words: {db.descriptor.data}")
db.check()  # closed-form amplitudes, phase uniformity, no stray support
print("check() passed")

# Power-of-two counts collapse to a depth-1 circuit of plain half-splits.
db8 = prepare_general(8)
kinds = {g.kind for g in db8.circuit.gates}
print(f"\nk=8 circuit: {len(db8.circuit)} gates, kinds {kinds}, "
      f"depth {db8.circuit.metrics().depth}")
bal = prepare_balanced(8)
print("matches the Hadamard-transform route:",
      abs(abs(bal.state.amplitudes[0]) - abs(db8.state.amplitudes[0])) < 1e-15)

# The build circuit is replayable text.
print("\nfirst lines of the emitted circuit:")
print("\n".join(db.emit().splitlines()[:6]))
