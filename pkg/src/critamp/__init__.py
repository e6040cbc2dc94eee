"""Certified computation of log-periodic critical amplitudes for pinning maps."""

from .bounded import BoundedValue
from .maps import PinningMap, load_map, new_map

__all__ = ["BoundedValue", "PinningMap", "load_map", "new_map"]
__version__ = "0.1.0"
