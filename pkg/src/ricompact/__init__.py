"""Compact Sobolev embeddings reduced to kernel operators on (0,1)."""

import importlib

from .stepfn import *  # noqa: F401,F403
from .rinorm import *  # noqa: F401,F403
from .kernelops import *  # noqa: F401,F403
from .isoperimetry import *  # noqa: F401,F403
from .probes import *  # noqa: F401,F403
from .classify import *  # noqa: F401,F403

__version__ = "0.1.0"

# ``classify`` the function shadows ``classify`` the module on the package
__all__ = [name for mod in ("stepfn", "rinorm", "kernelops", "isoperimetry", "probes", "classify")
           for name in importlib.import_module(f"{__name__}.{mod}").__all__]
