"""Contractual numerical tolerances, collected in one place.

Every cutoff used by the library is defined here so the test suite and the
documentation agree on a single set of numbers.
"""

# representation validation: ||gen**order - I||_F <= REP_VALIDATION * d0
REP_VALIDATION = 1e-10

# orthogonality / reconstruction / idempotency residuals
ORTHOGONALITY = 1e-10
RECONSTRUCTION = 1e-10
IDEMPOTENCY = 1e-10

# singular values <= RANK_CUTOFF_REL * sigma_max * max(rows, cols) are zero
RANK_CUTOFF_REL = 1e-12

# eigenvalues <= PD_EIG_REL * lambda_max fail the positive-definite check
PD_EIG_REL = 1e-12

# symmetry residual, scaled by max(1, ||M||_F)
SYMMETRY = 1e-10

# Penrose identity residuals for pseudoinverses
PENROSE = 1e-8

# sigma_r must exceed sigma_{r+1} * (1 + SPECTRAL_GAP_REL) for a unique
# rank-r truncation; critical-point enumeration requires pairwise-distinct
# nonzero singular values at the same relative gap
SPECTRAL_GAP_REL = 1e-8

# invariance residual of closed-form solutions: ||WG||_F < INVARIANCE_REL * ||W||_F * ||G||_F
INVARIANCE_REL = 1e-9

# orbit mean below this magnitude makes the relative invariance error undefined
ORBIT_MEAN_FLOOR = 1e-12

# kernel solve: ||(K + jitter I) a - y|| <= KERNEL_RESIDUAL * ||y||
KERNEL_RESIDUAL = 1e-6

# guard on the number of enumerated index subsets
MAX_SUBSETS = 10**6

# training aborts when the objective exceeds DIVERGENCE_FACTOR * initial value
DIVERGENCE_FACTOR = 1e6
