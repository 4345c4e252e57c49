"""
The generating graph of Sym(4)
==============================

Vertices are the elements of the group, two of them joined when they
generate it.  Elements that lie in a common proper subgroup with everything
are isolated.
"""

import numpy as np

from gengraph.group_core import cached_group
from gengraph.gen_graph import degrees, generating_graph, graph_metrics, non_isolated_mask
from gengraph.local_degrees import degree_factorization, verify_degree_bound

G = cached_group("Sym(4)")
mask = non_isolated_mask(G)
print("order", G.order, "non-isolated", int(mask.sum()))
print("isolated:", [G.labels[x] for x in np.flatnonzero(~mask)])

# drop the isolated ones and look at what is left
view = generating_graph(G)
m = graph_metrics(view)
print("connected:", m.connected, "diameter:", m.diameter)

###############################################################################
# Degrees split over a chief series.  The four-cycle sits in a single
# maximal subgroup, so it has more neighbours than a transposition.

deg = degrees(G)
for lab in ["(12)", "(123)", "(1234)"]:
    v = G.labels.index(lab)
    f = degree_factorization(G, v)
    print(f"{lab:8s} degree {deg[v]:3d}  stages {f.stages}  product {f.product}")

rep = verify_degree_bound(G)
print("chief length", rep.t, "lower bound", rep.bound, "smallest degree", rep.min_degree)
