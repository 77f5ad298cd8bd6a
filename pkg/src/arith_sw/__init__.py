"""Local and global pieces of the arithmetic Siegel-Weil formula for
incoherent Eisenstein series attached to lattices of signature (m, 2)."""

__version__ = "0.1.0"
