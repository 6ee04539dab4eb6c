"""Select the kernel backend.

The compiled extension is used when it imports; set ``CVARHEDGE_PURE=1`` to
force the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("CVARHEDGE_PURE", "") not in ("", "0"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _kernels_py

BACKEND = "compiled" if kernels is not _kernels_py else "python"
