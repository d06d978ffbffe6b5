"""Linear and pump-probe spectra of vibrational polaritons in planar microcavities."""

__version__ = "0.1.0"
