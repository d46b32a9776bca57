"""Constructing forgery witnesses.

Two arbitrary rotations: Q = sigma_1 always works, with the message read
off an eigenvector. Three Pauli rotations: a witness exists exactly when the
assistant lies on a stratum, and the constructor picks whichever single
Pauli Q does the job.
"""

from __future__ import annotations

import numpy as np

from aqsforge.forgery import SchemeSpec, classify_three_rotation, deviation, find_two_rotation_witness, pauli_label
from aqsforge.pauliparam import PRESETS, haar_sample, haar_unitary

rng = np.random.default_rng(3)
scheme = SchemeSpec.two_general(haar_sample(rng, 1)[0], haar_unitary(rng), haar_unitary(rng))
w = find_two_rotation_witness(scheme)
print("random two-rotation scheme")
print("  message", w.message.round(6), " deviation", f"{deviation(scheme, w.q_op, w.message):.2e}")

for name in ("H", "Wa", "T"):
    scheme = SchemeSpec.three_pauli(PRESETS[name])
    verdict = classify_three_rotation(scheme)
    if verdict.witness is None:
        print(f"{name}: no witness (min |abg| = {verdict.report.min_abs_product:.6f})")
        continue
    wit = verdict.witness
    print(f"{name}: Q = sigma_{pauli_label(wit.q_op)}, message {wit.message.round(6)}, deviation {wit.deviation:.2e}")
