"""Exact computations in the Johnson image of the mapping class group Lie algebra.

Graded pieces m_{g,1}(k), their Sp-decompositions, and the second
Chevalley-Eilenberg homology by weight, over the rationals.
"""

__version__ = "0.1.0"

from .exact import SparseTensor, EchelonBasis, parse_tensor, format_tensor  # noqa: E402
from .johnson import JohnsonAlgebra, m_basis, verify_table1  # noqa: E402
from .sprep import YoungDiagram, decompose, multiplicity, weyl_dimension  # noqa: E402

__all__ = [
    "SparseTensor", "EchelonBasis", "parse_tensor", "format_tensor",
    "JohnsonAlgebra", "m_basis", "verify_table1",
    "YoungDiagram", "decompose", "multiplicity", "weyl_dimension",
]
