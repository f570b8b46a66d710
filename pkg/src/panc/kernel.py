"""Picks the compiled Monte Carlo kernel when it is built, the numpy one
otherwise.  ``PANC_KERNEL=python`` forces the fallback."""
import os

from . import _kernel_py

if os.environ.get("PANC_KERNEL", "").lower() == "python":
    simulate_block = _kernel_py.simulate_block
    BACKEND = "python"
else:
    try:
        from ._kernel import simulate_block
        BACKEND = "cython"
    except ImportError:
        simulate_block = _kernel_py.simulate_block
        BACKEND = "python"
