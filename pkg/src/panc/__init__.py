"""Error analysis and simulation of power-adaptive network coding in a
two-source, one-relay multiple-access relay channel."""
from .config import ExperimentConfig, preset
from .ct import ct_dest, ct_relay, sper_ct
from .exact import sper_exact
from .geometry import ChannelRealization, PowerPair, build_idc, build_irc
from .kernel import BACKEND as KERNEL_BACKEND
from .montecarlo import run_sweep
from .power import optimize_powers_ct, optimize_powers_exact, scaling_factor

__all__ = [
    "ChannelRealization", "PowerPair", "ExperimentConfig", "KERNEL_BACKEND", "build_idc", "build_irc",
    "ct_dest", "ct_relay", "optimize_powers_ct", "optimize_powers_exact", "preset", "run_sweep",
    "scaling_factor", "sper_ct", "sper_exact",
]
