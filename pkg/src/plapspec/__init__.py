"""First nontrivial eigenvalues of graph p-Laplacians, random graph and group models,
link graphs of triangular presentations, and the certificates they imply."""
from .errors import (DegenerateInputError, DimensionError, ParameterError, PlapError,
                     PreconditionError, SizeError)
from .graph import Multigraph, DegreeSequence, complete_graph, complete_multipartite, read_graph, write_graph
from .solver import SolverOptions, EigenEstimate, lambda_estimate, lambda_exact_p2, oracle_tiny
from .certificates import Certificate, Refusal, flp_certificate, kazhdan_certificate

__version__ = "0.1.0"
