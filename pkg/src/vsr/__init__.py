"""Verifiable segment receipts: tags, aggregate proofs, security games and a
lossy-path transfer simulator."""
from .field import P80, P251, FieldElement, Modulus, counting
from .schemes import MAV, RPK, SAVAGE, SCHEME_NAMES, VSR_AA, VSR_H, make_scheme
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = ["P80", "P251", "FieldElement", "Modulus", "counting", "MAV", "RPK", "SAVAGE", "SCHEME_NAMES",
           "VSR_AA", "VSR_H", "make_scheme", "Verdict", "__version__"]
