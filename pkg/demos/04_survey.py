"""The forgeable assistants form a measure-zero set.

Sample Haar-random assistants and look at the smallest |alpha*beta*gamma|
over the six orderings. At the analytic tolerance nothing lands on a
stratum; the distribution of the distance is printed as a coarse histogram.
"""

from __future__ import annotations

import numpy as np

from aqsforge.pauliparam import abg_products, haar_sample_array

w = haar_sample_array(7, 100_000)
dist = np.abs(abg_products(w)).min(axis=1)
print(f"samples: {len(w)}, forgeable at 1e-9: {(dist <= 1e-9).sum()}, smallest distance {dist.min():.3e}")
edges = np.logspace(-9, -1, 9)
counts, _ = np.histogram(dist, bins=edges)
for lo, hi, c in zip(edges[:-1], edges[1:], counts):
    print(f"  [{lo:.0e}, {hi:.0e})  {c:6d}  {'#' * int(60 * c / len(w))}")
