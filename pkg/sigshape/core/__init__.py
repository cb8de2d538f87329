"""
Core numerics for SigShape.
Rotations, piecewise geodesic curves, the SRVT and its reparameterization search,
truncated tensors, signatures and the distance-matrix analysis.
"""
