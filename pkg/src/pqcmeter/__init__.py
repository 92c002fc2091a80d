"""Post-quantum cryptography adoption measurement over Zeek connection logs."""

__version__ = "0.1.0"
