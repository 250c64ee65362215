"""Kernel lane selection.

The hot inner loops (RK4 / Euler-Maruyama stepping, Gillespie event loops)
exist in two interchangeable implementations: numba-jitted scalar loops and a
pure-numpy fallback.  The environment variable ``P2PKINETICS_BACKEND`` picks
the lane:

* unset or ``auto``: numba if importable, else numpy
* ``numba``: require numba, fail loudly if missing
* ``numpy``: force the fallback even when numba is installed

Results are deterministic within a lane (same seed, same trajectory); the two
lanes agree to rounding because they consume identical random-number streams.
``benchmarks/bench_kernels.py`` compares their throughput.
"""

from __future__ import annotations

import os

ENV_VAR = "P2PKINETICS_BACKEND"


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _select_backend() -> str:
    choice = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if choice == "auto":
        return "numba" if _numba_available() else "numpy"
    if choice == "numba":
        if not _numba_available():
            raise ImportError(
                f"{ENV_VAR}=numba requested but numba is not importable"
            )
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise ValueError(
        f"{ENV_VAR} must be 'numba', 'numpy' or 'auto', got {choice!r}"
    )


NUMBA_AVAILABLE = _numba_available()
BACKEND = _select_backend()
USING_NUMBA = BACKEND == "numba"
