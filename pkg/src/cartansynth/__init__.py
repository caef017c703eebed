"""Fixed-depth time-evolution circuits from Cartan decompositions of Hamiltonian algebras."""

__version__ = "0.1.0"
