"""Free-boundary verification lab: exact blowup solutions, Weiss-type
energy monotonicity, sector rigidity certificates, blowup diagnostics,
and 2D Helmholtz corner-scattering evidence."""

__version__ = "0.1.0"

from .polyfield import MultiPoly, laplacian, is_harmonic, parse_poly  # noqa: F401
