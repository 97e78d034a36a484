"""Writing and reading entries without collapsing the database.

Writes are XOR toggles (or conditional swaps) on the data register, steered
by index-pattern controls. Reads either copy a word out through a CNOT fan
(keeping the database intact) or project onto one index pattern (destroying
it but certifying the answer).
"""

from qdbsim import (
    prepare_general,
    read_copy,
    read_copy_all,
    read_projective,
    schmidt,
    write,
    write_swap_conditional,
)

db = prepare_general(4, data={1: "01"})
print("start:", dict(db.descriptor.data))

# XOR-write toggles bits under the entry's pattern controls. The sensor
# register that drives the toggles is verified unentangled and dropped.
db = write(db, 2, "11")
db = write(db, 1, "11")     # 01 ^ 11 = 10
print("after writes:", dict(db.descriptor.data))
db.check()

# Copy-read fans the word onto fresh wires, which stay attached.
copied = read_copy(db, 2)
rep = schmidt(copied.state, copied.copy_qubits)
print(f"\nread_copy(2): copy register on qubits {copied.copy_qubits}, "
      f"rank {rep.schmidt_rank}, entropy {rep.entropy_bits:.3f} bits")

# Copying ALL entries at once entangles the copies with the index register
# exactly when two occupied entries store different words.
all_copied = read_copy_all(db)
rep = schmidt(all_copied.state, all_copied.copy_qubits)
print(f"read_copy_all: rank {rep.schmidt_rank}, "
      f"entropy {rep.entropy_bits:.3f} bits (words differ -> entangled)")

# A swap-write drags the OLD word out into the sensor. If the old word
# differs across branches the sensor comes back entangled - that is the
# price of learning what used to be there.
db2 = prepare_general(4, data={1: "01"})
swapped = write_swap_conditional(db2, 3, "10")
rep = schmidt(swapped.state, swapped.sensor_qubits)
print(f"\nswap '10' into empty entry 3: sensor purity {rep.purity:.4f} "
      f"(entangled={rep.entangled})")

# Projective read: measure the index register, keep the lucky branch.
db3 = prepare_general(4, data={2: "11"})
data_state, prob = read_projective(db3, 2)
print(f"\nread_projective(2): probability {prob:.4f} (expect 0.2500)")
print("post-measurement data amplitudes:",
      [f"{a.real:+.3f}" for a in data_state.amplitudes])
