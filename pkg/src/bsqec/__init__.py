"""Bacon-Shor-13 vs Surface-17: bare-ancilla stabilizer measurement, lookup
decoding, importance-sampled logical error rates and trapped-ion timing."""

__version__ = "0.1.0"
