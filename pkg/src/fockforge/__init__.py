"""Free Lévy processes on the noncommutative unitary group, built on the full Fock space."""
from .functionals import (
    Functional,
    IncrementFamily,
    Letter,
    NetReport,
    Partition,
    conv_exp,
    convolve,
    free_product_centering,
    free_product_cumulants,
    free_product_recursion,
    net_convolve,
)
from .ncalg import KD, GeneratorSymbol, NCPoly, TensorAlgebra, antipode, coproduct, coproduct_n, counit, kd_relations
from .scalars import EXACT, FLOAT, GaussianRational, exact
from .schurmann import SchurmannTriple, triple_from_matrix, validate_generator

__version__ = "0.1.0"

__all__ = [
    "Functional",
    "IncrementFamily",
    "Letter",
    "NetReport",
    "Partition",
    "conv_exp",
    "convolve",
    "free_product_centering",
    "free_product_cumulants",
    "free_product_recursion",
    "net_convolve",
    "KD",
    "GeneratorSymbol",
    "NCPoly",
    "TensorAlgebra",
    "antipode",
    "coproduct",
    "coproduct_n",
    "counit",
    "kd_relations",
    "EXACT",
    "FLOAT",
    "GaussianRational",
    "exact",
    "SchurmannTriple",
    "triple_from_matrix",
    "validate_generator",
]
