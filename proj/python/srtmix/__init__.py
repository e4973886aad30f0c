"""Zero-inflated Poisson mixture modeling of spatial expression count data.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
