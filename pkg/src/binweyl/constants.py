"""Measured convention factors between the curvature engine and the closed forms.

engine C^k_{ikj} = KAPPA * ckikj_closed and engine C^{ij}_{ij} = KAPPA_PRIME *
cijij_closed.  Both were measured over a random corpus of binary metrics
(tests/test_formulas.py re-measures them) and came out as exactly 1 once the
exponent weight PHI_WEIGHT = 2 is used in g_ii.  With PHI_WEIGHT = 1 the
engine/closed-form ratio for C^k_{ikj} would be 1/4 instead.
"""

KAPPA = 1.0
KAPPA_PRIME = 1.0
