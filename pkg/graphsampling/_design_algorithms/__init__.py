"""
This is an internal module which contains the implementations of the sampling
set selection strategies of :mod:`graphsampling.design`. The algorithms only
use the public methods of `DesignCriterion` and `SpectralBasis`, and are
re-exported (with documentation) as functions of :mod:`graphsampling.design`.
"""
