"""
Walks in a product of generating graphs
=======================================

Shortest paths in each factor can be padded to a common length and run in
parallel.  Padding moves back and forth along an edge, so a factor standing
still needs an even number of spare steps.
"""

from gengraph.group_core import cached_group
from gengraph.errors import ParityObstruction
from gengraph.gen_graph import generating_graph
from gengraph.product_graphs import ProductGraph, WalkCertificate, lift_path, product_distance, shortest_path, validate_walk

A = generating_graph(cached_group("SL2(4)"))
B = generating_graph(cached_group("Sym(4)"))
P = ProductGraph([A, B])
print("product has", P.size, "vertices")

x = (int(A.vertices[0]), int(B.vertices[0]))
pa = shortest_path(A, x[0], int(A.vertices[10]))
pb = shortest_path(B, x[1], int(B.vertices[5]))
print("factor path lengths", pa.length, pb.length)

for m in range(max(pa.length, pb.length), 5):
    w = lift_path([A, B], [pa, pb], m)
    print("lifted to length", m, "valid:", validate_walk(P, w))

###############################################################################
# One factor fixed, the other moving by a single edge.

stay = WalkCertificate([x[0]], x[0], x[0])
step = shortest_path(B, x[1], int(B.vertices[1])) if B.adjacent(x[1], int(B.vertices[1])) else pb
try:
    lift_path([A, B], [stay, step], 1)
except ParityObstruction as exc:
    print("length 1 impossible:", exc)
d = product_distance(P, x, (x[0], step.end))
print("exact distance", d.exact)
