"""Desk-scale laboratory for encryption with quantum public keys.

Subpackages: `sim` (statevector simulator), `primitives` (PRF, symmetric
cipher, function-like state families), `schemes` (the three constructions),
`games` (challenger/adversary harness), `analysis` (exact proof-quantity
oracles), `cli` (experiment runner).
"""

from .schemes import OwfScheme, PrfsScheme, PrfspdScheme

__all__ = ["OwfScheme", "PrfspdScheme", "PrfsScheme"]

__version__ = "0.1.0"
