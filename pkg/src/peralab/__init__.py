"""peralab: a workbench for event-recording automata with parametric guards."""

from .core import Atom, Edge, ModelError, Pera, UnsatisfiableAtom

__all__ = ["Atom", "Edge", "ModelError", "Pera", "UnsatisfiableAtom"]
__version__ = "0.1.0"
