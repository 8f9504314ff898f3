"""Numerical laboratory for unitarily invariant norm bounds on functions of
matrices with spectrum in the unit disk.

matcore    dense complex matrices and seeded generators
spectral   Jacobi eigensolver and SVD, |A|, resolvent checks
norms      Schatten / Ky Fan / operator norms from singular values
herglotz   Herglotz functions and their matrix calculus
ineq       one checker per inequality
harness    seeded suites, reports and replay
"""
