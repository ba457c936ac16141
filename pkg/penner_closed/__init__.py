"""
Penner-type lambda-length coordinates for closed surfaces.

Holonomy representations from edge lambda-lengths and triangle signs,
Euler numbers via universal-cover lifts, signed Ptolemy flips and the
vanishing loci of curve lambda-lengths.
"""

__version__ = "1.0.0"
