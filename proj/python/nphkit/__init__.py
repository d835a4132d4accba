try:
    from ._nphkit import *  # noqa: F401,F403
    from ._nphkit import __doc__  # noqa: F401
except ImportError:  # running against a build tree with _nphkit on sys.path
    from _nphkit import *  # noqa: F401,F403
    from _nphkit import __doc__  # noqa: F401
