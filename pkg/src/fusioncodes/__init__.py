"""Graph codes from quantum emitters and exact logical-fusion analysis.

The package covers the full pipeline: enumerating the graph states a
single emitter can produce, turning them into single-logical-qubit graph
codes, exactly evaluating the loss and Pauli-error performance of
transversal logical fusions between two copies, searching failure bases
and photon-loss thresholds under bias models, and compiling two-emitter
(or emitter-plus-memory) generation sequences with resource counts.
"""

__version__ = "0.1.0"

from .codes import GraphCode, code_from_progenitor, dual_code, logical_set  # noqa: F401
from .fusion import FusionSpec, erasure_analysis, error_analysis  # noqa: F401
from .graphs import GraphState, enumerate_single_emitter_progenitors  # noqa: F401
from .pauli import PauliOperator, StabilizerGroup  # noqa: F401
