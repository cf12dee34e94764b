"""Hot correlator kernels with a compiled core and a pure-numpy fallback.

The compiled extension fuses the per-timestep phase construction, the
D x D complex matrix product, and the weighted trace reduction; the
reference backend expresses the same arithmetic with chunked numpy.
Whichever is importable wins; ``BACKEND`` records the choice.
"""

from . import reference

try:  # pragma: no cover - exercised indirectly
    from . import _fused as _impl

    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    _impl = reference
    BACKEND = "reference"

otoc_weighted_series = _impl.otoc_weighted_series
tpc_series = _impl.tpc_series
equilibrium_series = _impl.equilibrium_series

__all__ = [
    "BACKEND",
    "reference",
    "otoc_weighted_series",
    "tpc_series",
    "equilibrium_series",
]
