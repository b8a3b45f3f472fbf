"""Divisors of order r: exact arithmetic, series identities, error-term experiments."""

__version__ = "0.1.0"
