"""
hopd: deformation complexes of operad maps in exact rational arithmetic.

Submodules:
  exactlin   sparse rational linear algebra and cohomology
  trees      rooted trees with labelled leaves
  opd        collections, operads, cooperads, free and presented operads
  homotopy   homotopy operads and cooperads, bar and cobar, A-infinity algebras
  linf       L-infinity algebras, Maurer-Cartan elements, morphisms
  defcx      convolution operads, deformation complexes, classical oracles
  cli        command-line frontend
"""

__version__ = "0.1.0"
