# Symmetric-function algebra on eigenvalue tuples
# ===============================================
#
# The pointwise engine of the whole package: elementary symmetric
# polynomials S_k, the positivity cones they carve out, and the classical
# inequalities that make the degree-m operator elliptic and concave there.

import numpy as np

from hessianlab import (
    ConeSpec,
    check_garding,
    check_maclaurin,
    cone_membership,
    elem_sym,
    elem_sym_minors,
    generalized_eigenvalues,
    grad_elem_sym,
    hessian_operator_F,
)

# S_k of a tuple is the sum over k-subsets of entry products, evaluated by
# the stable Vieta recurrence.  S_2(1, 2, 3) = 1*2 + 1*3 + 2*3 = 11:
print("S_2(1,2,3) =", elem_sym([1, 2, 3], 2))

# The same number drops out of the sum of 2x2 principal minors:
print("minor route:", elem_sym_minors(np.diag([1.0, 2.0, 3.0]), 2))

# Cone membership asks S_1, ..., S_m to be positive.  (3, -1, -1) has
# positive trace but S_2 = -5, so it sits in the degree-1 cone only:
for m in (1, 2):
    member, margin = cone_membership([3, -1, -1], ConeSpec(n=3, m=m))
    print(f"(3,-1,-1) in degree-{m} cone: {member} (worst margin {margin:+.3f})")

# The gradient of S_m collects S_{m-1} with one entry removed; its pairing
# with the tuple recovers m S_m (Euler's identity for homogeneity degree m):
lam = np.array([0.8, 1.7, 2.4])
grad = grad_elem_sym(lam, 2)
print("gradient:", grad, "| Euler gap:", np.dot(lam, grad) - 2 * elem_sym(lam, 2))

# Maclaurin's chain of normalized means is monotone on cone members; the
# smallest gap is zero exactly at equal entries:
print("maclaurin gap (2,2,2):", check_maclaurin([2, 2, 2], 2))
print("maclaurin gap (1,2,3):", check_maclaurin([1, 2, 3], 2))

# The cone pairing inequality degenerates to equality on proportional
# tuples and is strictly positive otherwise:
print("pairing gap, proportional:", check_garding([1, 1, 1], [2, 2, 2], 2))
print("pairing gap, generic:     ", check_garding([1, 2, 3], [3, 1, 1], 2))

# The normalized operator (S_m / C(n,m))^(1/m) is homogeneous of degree one
# and equals 1 on the unit tuple:
print("F(1,1,1) =", hessian_operator_F([1, 1, 1], 2))
print("F(1,2,3) =", hessian_operator_F([1, 2, 3], 2), "= sqrt(11/3)")

# Matrix pencils: eigenvalues of A relative to a metric G, computed through
# the symmetric square root so congruence invariance survives roundoff:
A = np.diag([2.0, 6.0])
G = np.diag([1.0, 2.0])
print("pencil eigenvalues:", generalized_eigenvalues(A, G))

rng = np.random.default_rng(1)
P = np.eye(2) + 0.3 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
print(
    "congruence drift:",
    np.abs(
        generalized_eigenvalues(P.conj().T @ A @ P, P.conj().T @ G @ P)
        - generalized_eigenvalues(A, G)
    ).max(),
)
