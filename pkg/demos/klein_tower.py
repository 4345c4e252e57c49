"""
Densities along a tower of Klein extensions
===========================================

``KleinCp3(3)`` and ``KleinCp3(3,5)`` are successive quotients of one
another.  The proportion of non-isolated elements drops with each prime,
while the degree of a fixed element keeps growing.
"""

import numpy as np

from gengraph.gen_graph import non_isolated_mask
from gengraph.profinite_tower import build_tower, degree_growth, measure_v, v_consistency

T = build_tower("klein-cp3", [3, 5])

for k in range(2):
    r = measure_v(T, k)
    print(f"level {k}: |V| = {r.count}/{r.order} = {r.density}  (closed form {r.predicted}, by {r.method})")

# a sampled estimate for the larger level, with its Wilson interval
r = measure_v(T, 1, samples=2000, seed=0)
print("sampled", r.hits, "of", r.samples, "interval", np.round(r.interval, 4))

###############################################################################
# Non-isolated elements map to non-isolated elements; the reverse can fail.

c = v_consistency(T)
print("consistent:", c.ok, " isolated lifts of good images:", c.converse_gaps)

top = T.levels[1].group
g = int(np.flatnonzero(non_isolated_mask(top))[0])
gr = degree_growth(T, g)
print("chief lengths", gr.t, "bounds", gr.bounds, "degrees", gr.degrees)
