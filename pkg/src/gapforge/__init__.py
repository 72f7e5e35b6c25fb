"""gapforge: spectral gaps of averaging operators for finite gate sets in PU(d).

Computes exact irrep blocks of the averaging operator at finite scale t,
the resulting spectral gap, and the calculable lower bound
gap_t(S) >= alpha * g_{t0}(S) * log^{-2c}(beta t), together with
epsilon-net circuit-length estimates derived from the gap.
"""

__version__ = "0.1.0"
