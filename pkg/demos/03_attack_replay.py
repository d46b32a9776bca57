"""Replaying a forgery against every key, and a perturbed one that fails.

The receiver turns an honest pair (M0, S) into (U M0, Q S). With a sound
witness every key verifies. Nudging Q makes at least one key reject, and
the swap test catches it statistically.
"""

from __future__ import annotations

import numpy as np

from aqsforge.forgery import ForgeryWitness, SchemeSpec, classify_three_rotation, deviation
from aqsforge.mat2core import SIGMA
from aqsforge.pauliparam import PRESETS
from aqsforge.protocol import run_attack

scheme = SchemeSpec.three_pauli(PRESETS["H"])
witness = classify_three_rotation(scheme).witness
report = run_attack(scheme, witness)
print(f"sound witness: {sum(v.accepted for v in report.verdicts)}/{len(report.verdicts)} keys accept")

eps = 0.2
nudge = np.cos(eps) * SIGMA[0] + 1j * np.sin(eps) * SIGMA[2]
q_bad = witness.q_op @ nudge
bad = ForgeryWitness(witness.message, q_bad, witness.target, deviation(scheme, q_bad, witness.message))
print(f"perturbed witness deviation {bad.deviation:.4f}")
for mode in ("deterministic", "swap_test"):
    r = run_attack(scheme, bad, mode, copies=100, seed=1, require_sound=False)
    print(f"  {mode}: {sum(v.accepted for v in r.verdicts)}/{len(r.verdicts)} keys accept")
