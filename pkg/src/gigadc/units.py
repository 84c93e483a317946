"""Canonical unit conventions.

Everything is decimal: 1 GB = 1e9 bytes, 1 Gbps = 1e9 bit/s, 1 GW = 1e9 W.
Bandwidth-bearing fields are bytes/s unless the field name says bits.
"""

KB = 1e3
MB = 1e6
GB = 1e9
TB = 1e12

KW = 1e3
MW = 1e6
GW = 1e9

MS = 1e-3

BITS_PER_BYTE = 8


def bytes_per_s(bits_per_s: float) -> float:
    """Convert a link speed in bit/s to bytes/s (800 Gbps -> 100 GB/s)."""
    return bits_per_s / BITS_PER_BYTE
