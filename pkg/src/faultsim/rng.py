"""Deterministic per-run random stream.

Every probabilistic choice in a run (message delays, loss draws, priority
tie-breaks, random partitions, protocol timeouts) consumes one ``Rng``. The
algorithm is xoshiro256** seeded with splitmix64, so a seed identifies the
same draw sequence on every platform. Floats use the top 53 bits of each
output; normals come from the cosine branch of Box-Muller.

The compiled extension is preferred; set ``FAULTSIM_PURE_PYTHON=1`` to force
the pure-Python implementation. Both produce identical streams.
"""

import os

from . import _rng_py

if os.environ.get("FAULTSIM_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _rng as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    Rng = _compiled.Rng
    splitmix64 = _compiled.splitmix64
else:
    Rng = _rng_py.Rng
    splitmix64 = _rng_py.splitmix64

PyRng = _rng_py.Rng
BACKEND = Rng.backend

_MASK = 0xFFFFFFFFFFFFFFFF


def derive_seed(base_seed, index):
    """Seed for run ``index`` of a batch rooted at ``base_seed``.

    Hash-mixed so runs i and i+1 do not get neighbouring splitmix inputs.
    """
    return splitmix64((base_seed & _MASK) ^ splitmix64(index & _MASK))
