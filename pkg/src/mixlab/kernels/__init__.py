"""Hot loops of the package, with a numba and a pure-numpy implementation.

The numba backend is used when numba imports cleanly unless the environment
variable ``MIXLAB_NO_NUMBA`` is set to a non-empty value other than ``0``.
Both backends produce identical results for identical inputs.
"""

import os

from . import _numpy

BACKEND = "numpy"
_impl = _numpy

if os.environ.get("MIXLAB_NO_NUMBA", "") in ("", "0"):
    try:
        from . import _numba as _impl  # noqa: F811
        BACKEND = "numba"
    except ImportError:  # pragma: no cover
        _impl = _numpy

all_permutations = _impl.all_permutations
perm_ranks = _impl.perm_ranks
swap_table = _impl.swap_table
evolve_step = _impl.evolve_step
simulate_batch = _impl.simulate_batch
path_system = _impl.path_system
edge_loads = _impl.edge_loads

__all__ = ["BACKEND", "all_permutations", "perm_ranks", "swap_table", "evolve_step", "simulate_batch",
           "path_system", "edge_loads"]
