"""Lens-space surgery obstructions for Brunnian links via Reidemeister torsion."""

from .alexander import LinkModel, hatK_alexander, milnor_alexander
from .catalog import LensSpace, classify_milnor, classify_milnor3, classify_twisted_whitehead, lens_canonical
from .cyclo import CycNum, GroupRingElem, d_norm
from .laurent import LaurentPoly, parse_poly
from .obstruct import lens_candidate_filter, lifted_equation_solve
from .surgery import SurgerySlope, SurgerySpec, lens_torsion_test, torsion_lens

__version__ = "0.1.0"

__all__ = [
    "CycNum",
    "GroupRingElem",
    "LaurentPoly",
    "LensSpace",
    "LinkModel",
    "SurgerySlope",
    "SurgerySpec",
    "classify_milnor",
    "classify_milnor3",
    "classify_twisted_whitehead",
    "d_norm",
    "hatK_alexander",
    "lens_canonical",
    "lens_candidate_filter",
    "lens_torsion_test",
    "lifted_equation_solve",
    "milnor_alexander",
    "parse_poly",
    "torsion_lens",
]
