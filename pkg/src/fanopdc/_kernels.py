"""Selection between the compiled and the reference assembly kernels.

The environment variable FANOPDC_KERNELS picks the lane:

  auto    compiled when importable and the basis keys fit 62 bits,
          reference otherwise (default)
  cython  compiled, hard error when unavailable or keys overflow
  python  reference lane unconditionally

Selection happens per call, not at import, so tests can flip the
variable without reloading the package.
"""

import os

from fanopdc import _kernels_py

try:
    from fanopdc import _kernels_cy
except ImportError:
    _kernels_cy = None


def compiled_available():
    return _kernels_cy is not None


def select_lane(packable, override=None):
    """Return the kernel module to use for one assembly run."""
    mode = override or os.environ.get("FANOPDC_KERNELS", "auto")
    mode = mode.lower()
    if mode not in ("auto", "cython", "python"):
        raise ValueError(
            "FANOPDC_KERNELS must be auto, cython or python, got %r" % mode)
    if mode == "python":
        return _kernels_py
    if mode == "cython":
        if _kernels_cy is None:
            raise RuntimeError(
                "compiled kernels requested but the extension is not "
                "importable; rebuild or set FANOPDC_KERNELS=python")
        if not packable:
            raise RuntimeError(
                "compiled kernels requested but the basis keys exceed "
                "62 bits; use the python lane for this basis")
        return _kernels_cy
    if _kernels_cy is not None and packable:
        return _kernels_cy
    return _kernels_py
