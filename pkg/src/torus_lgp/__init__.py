"""Local-global principle for embeddings of maximal tori.

Exact root data and Weyl groups, Galois lattices and their cohomology,
Tits-index embedding tests, and split models of algebras with involution.
"""

from . import algebra_model, catalog, cohomology, embed, exact_lattice, galois, root_datum
from .algebra_model import *  # noqa: F401,F403
from .catalog import *  # noqa: F401,F403
from .cohomology import *  # noqa: F401,F403
from .embed import *  # noqa: F401,F403
from .exact_lattice import *  # noqa: F401,F403
from .galois import *  # noqa: F401,F403
from .root_datum import *  # noqa: F401,F403

__version__ = "0.1.0"

__all__ = [
    name
    for module in (exact_lattice, root_datum, catalog, galois, cohomology, embed, algebra_model)
    for name in module.__all__
]
