"""
Visibility graphs of short sequences
====================================

Every sample becomes a node; two samples are linked when the straight line
between their tops clears every sample in between.
"""

import numpy as np

import specvis

# a small landscape with a valley and a tied pair of peaks
h = np.array([1.0, 3.0, 2.0, 3.0, 1.0])
g = specvis.build(h)
print("edges:", g.edge_set())
print("degrees:", specvis.degree_vector(g))

# a straight line only sees its neighbours ...
line = specvis.build(np.arange(8.0))
print("line degrees:", specvis.degree_vector(line))

# ... while a bowl sees everything
bowl = specvis.build((np.arange(8.0) - 3.5) ** 2)
print("bowl edge count:", len(bowl), "of", 8 * 7 // 2)

###############################################################################
# Raising or stretching the sequence leaves the graph alone.
rng = np.random.default_rng(0)
x = rng.random(300)
same = [specvis.build(x * 3 + 1000) == specvis.build(x), specvis.build(x * 0.01 - 5) == specvis.build(x)]
print("invariant under offset and scale:", all(same))

###############################################################################
# The degree distribution is a histogram over degrees 0..N-1.
p = specvis.degree_distribution(specvis.degree_vector(specvis.build(x)))
print("most common degree:", int(np.argmax(p)), "share", round(float(p.max()), 3))

###############################################################################
# Two constructions give identical graphs; the recursive one is much faster.
import time

big = rng.random(2**14)
for algo in ("dc", "naive"):
    t0 = time.perf_counter()
    specvis.build(big, algo)
    print(f"{algo:>5}: {time.perf_counter() - t0:.3f} s for n = {big.size}")
