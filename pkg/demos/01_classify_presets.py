"""Which named assistant unitaries admit a forgery against sigma_1, sigma_2, sigma_3 rotations?

For each preset we print the six (alpha, beta, gamma) triples and the
strata it lies on. H and Wa sit on strata; T sits on none, and every
product comes out at 1/54.
"""

from __future__ import annotations

from aqsforge.pauliparam import PRESETS, classify

for name, w in PRESETS.items():
    report = classify(w)
    print(f"{name}: w = {w.as_array().round(6)}  ->  {'forgeable' if report.forgeable else 'unforgeable'}")
    for perm, t in report.triples.items():
        mark = "*" if perm in report.member_of else " "
        print(f"  {mark} {perm}  alpha={t.alpha:+.6f}  beta={t.beta:+.6f}  gamma={t.gamma:+.6f}  product={t.product + 0.0:+.3e}")
    print()
