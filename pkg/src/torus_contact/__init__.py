"""Relative contact homology of linear and Giroux contact forms on T^3 and torus bundles."""

from .contact import Giroux, Linear, ParametricH, SampledH, verify_structure
from .errors import ContactHomologyError
from .homology import build_complex, equivariant_reduction, homology_of, verify_diagram
from .manifold import GluingMatrix, HomotopyClass2, HomotopyClass3, TorusPoint, normalize
from .orbits import enumerate_orbits

__version__ = "0.1.0"

__all__ = [
    "ContactHomologyError",
    "Giroux",
    "GluingMatrix",
    "HomotopyClass2",
    "HomotopyClass3",
    "Linear",
    "ParametricH",
    "SampledH",
    "TorusPoint",
    "build_complex",
    "enumerate_orbits",
    "equivariant_reduction",
    "homology_of",
    "normalize",
    "verify_diagram",
    "verify_structure",
]
