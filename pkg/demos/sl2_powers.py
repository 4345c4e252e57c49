"""
How many copies of SL(2,4) are still 2-generated?
=================================================

A pair of tuples generates a direct power of a simple group exactly when
every coordinate pair generates and no two coordinate pairs are related by
an automorphism.  Counting automorphism classes of generating pairs gives
the largest such power.
"""

from gengraph.group_core import cached_group
from gengraph.product_graphs import power_adjacent
from gengraph.profinite_tower import delta_p, random_power_tuples_fail

rep = delta_p(2)
print("generating pairs", rep.pairs, "automorphisms", rep.automorphisms, "free:", rep.free)
print("classes", rep.delta)

# one representative per class still generates the 19th power
S = cached_group("SL2(4)")
wx, wy = rep.witness
print("witness tuple generates S^19:", power_adjacent(S, rep.delta, wx, wy))

# with one more coordinate two pairs must fall in the same class
print("adjacent tuples in S^20 out of 5000 draws:", random_power_tuples_fail(2, samples=5000))

big = delta_p(3)
print("SL(2,8):", big.pairs, "/", big.automorphisms, "=", big.delta)
