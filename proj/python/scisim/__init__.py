"""Snapshot compressive imaging: simulation, reconstruction, metrics."""

try:
    from ._scisim import *  # noqa: F401,F403
except ImportError:  # build-tree layout: extension module on sys.path
    from _scisim import *  # noqa: F401,F403
