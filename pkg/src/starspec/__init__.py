"""Spectral certification toolkit for star waveguides.

Computes and bounds Laplacian eigenvalues of junction centers and truncated
waveguides, and certifies the exact number of discrete eigenvalues together
with the absence of threshold resonances.
"""

__version__ = "0.1.0"

from . import bounds, certify, exact, fem, geom  # noqa: F401
