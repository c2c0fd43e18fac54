"""Distance-field kernels: compiled extension with pure-python fallback.

`import nilspec._kernels as kernels` exposes grid_dijkstra / cc_distance plus
the BACKEND tag ("compiled" or "python").  Both backends implement the same
update rules and converge to the same fixed points; set the environment
variable NILSPEC_FORCE_PYTHON_KERNELS=1 to skip the extension (used by the
benchmark and the parity tests).
"""

import os

from . import _slow

if os.environ.get("NILSPEC_FORCE_PYTHON_KERNELS"):
    _impl = _slow
else:
    try:
        from . import _fast as _impl
    except ImportError:
        _impl = _slow

BACKEND = _impl.BACKEND
grid_dijkstra = _impl.grid_dijkstra
cc_distance = _impl.cc_distance

python_backend = _slow
