"""Quadratic Sturm-Liouville pencils: forward and inverse spectral solvers.

Thin re-export of the compiled module. The heavy lifting lives in C++;
this package exists so `import pencilspec` works after a scikit-build
install or with PYTHONPATH pointed at a development build.
"""

from _pencilspec import *  # noqa: F401,F403
from _pencilspec import __doc__  # noqa: F401

__version__ = "0.1.0"
