"""Brute-force search as a sanity check on the classification.

For H the search finds a zero-deviation point. For T the best it can do
stays near 2.2e-3, and that minimum sits where Q touches the excluded
neighbourhood of the identity: no interior forgery exists.
"""

from __future__ import annotations

from aqsforge.forgery import EXCLUSION_RADIUS, SchemeSpec, brute_force_search
from aqsforge.pauliparam import PRESETS

for name, starts in (("H", 100), ("T", 2000)):
    result = brute_force_search(SchemeSpec.three_pauli(PRESETS[name]), starts, 42, restrict_lemma1=True)
    q = result.best_q
    print(f"{name}: {starts} starts, min deviation {result.min_deviation:.3e}, best q = {q.as_array().round(4)}")
    if 1 - q.w0 <= EXCLUSION_RADIUS + 1e-9:
        print("   (minimum on the identity exclusion boundary)")
