"""Runtime lower bounds for adiabatic quantum algorithms from final-Hamiltonian uncertainty."""

__version__ = "0.1.0"

from .algorithms import (  # noqa: E402
    BooleanFunctionSpec,
    Problem,
    bernstein_vazirani,
    dj_das,
    dj_wei,
    grover,
    ising_counterexample,
    kclique,
)
from .bounds import BoundReport, compute_bound, delta_v, moments_check  # noqa: E402
from .dynamics import Schedule, integrate, min_adiabatic_time, verify_chain  # noqa: E402
from .gaps import sweep  # noqa: E402
from .graph_tools import Graph, count_kcliques, load_edge_list, random_graph  # noqa: E402

__all__ = [
    "BooleanFunctionSpec",
    "BoundReport",
    "Graph",
    "Problem",
    "Schedule",
    "__version__",
    "bernstein_vazirani",
    "compute_bound",
    "count_kcliques",
    "delta_v",
    "dj_das",
    "dj_wei",
    "grover",
    "integrate",
    "ising_counterexample",
    "kclique",
    "load_edge_list",
    "min_adiabatic_time",
    "moments_check",
    "random_graph",
    "sweep",
    "verify_chain",
]
