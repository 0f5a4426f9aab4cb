"""
This is an internal module with the dense numerical kernels used by the
public modules: the cyclic Jacobi eigensolver, projection onto a capped
simplex, the ADMM solver for least absolute deviations, and small helpers
that apply a common relative threshold to singular values.

The kernels only work with `numpy` arrays and know nothing about graphs,
bases or sampling sets. The public modules translate their arguments before
calling them.
"""
