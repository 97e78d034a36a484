"""Why growth is not a fixed gadget: one unitary cannot extend every database.

A single unitary preserves inner products. But "add l empty entries" maps
two k-entry databases differing in a single stored word - overlap
(k-1)/k - to states with overlap (k-1+l)/(k+l). Those agree only when the
databases were identical to begin with, so any fixed circuit must fail on
some pair. That is why extend() consumes the build circuit of the specific
database it grows.
"""

from qdbsim import check_no_unitary_extend

# Same shape (k=3), different words in entry 1, grown by one entry each.
report = check_no_unitary_extend(3, 1, data_a={}, data_b={1: 1})
print(f"k={report.k} grown by l={report.l}")
print(f"overlap before extension: {report.overlap_before:.6f} "
      f"(closed form {report.closed_before:.6f})")
print(f"overlap after extension:  {report.overlap_after:.6f} "
      f"(closed form {report.closed_after:.6f})")
print(f"inner product preserved:  {report.preserved}")

# Identical databases are of course fine - and this is the ONLY case.
same = check_no_unitary_extend(3, 1, data_a={1: 1}, data_b={1: 1})
print(f"\nidentical pair: before {same.overlap_before:.6f}, "
      f"after {same.overlap_after:.6f}, preserved: {same.preserved}")

# The gap shrinks as k grows but never closes.
print("\n  k   before      after       gap")
for k in (2, 3, 5, 9, 17):
    r = check_no_unitary_extend(k, 1)
    print(f"  {k:2d}  {r.overlap_before:.6f}   {r.overlap_after:.6f}   "
          f"{r.overlap_after - r.overlap_before:+.6f}")
