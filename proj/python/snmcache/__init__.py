"""Shot-noise video traffic modelling, LRU cache simulation and analytic
hit-probability prediction. Thin wrapper over the C++ core."""

try:
    from ._snmcache import *  # noqa: F401,F403  (installed wheel layout)
    from ._snmcache import __version__  # noqa: F401
except ImportError:  # in-tree build: extension module sits on PYTHONPATH
    from _snmcache import *  # noqa: F401,F403
    from _snmcache import __version__  # noqa: F401
