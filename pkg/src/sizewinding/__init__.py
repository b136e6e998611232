"""Size winding, operator transfer and their model realizations.

Submodules
----------
pauli, special, haar, rng
    Pauli algebra, the semicircle transform, Haar/Weingarten tools and
    counter-based random streams.
exact_sim, winding, ensembles, experiments
    Dense two-sided simulation, size distributions, random-matrix closed
    forms and seeded Monte-Carlo sweeps.
brownian, spin_chain, syk, bulk
    Brownian-circuit master equation, brickwork chains, large-q SYK and the
    nearly-AdS2 bulk picture.
records, cli
    Output records and the command-line front end.
"""

__version__ = "0.1.0"

from . import errors
from .errors import SizeWindingError
from .kernels import IMPLEMENTATION

__all__ = ["__version__", "errors", "SizeWindingError", "IMPLEMENTATION"]
