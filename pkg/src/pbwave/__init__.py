"""Complex-sourcepoint pulsed-beam wavelets and their source distributions."""

__version__ = "0.1.0"
