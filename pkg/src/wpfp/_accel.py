"""Select the compiled quadrature core when it was built, else the numpy one."""

try:
    from ._core import green_sum
    BACKEND = "compiled"
except ImportError:
    from ._core_py import green_sum
    BACKEND = "python"

__all__ = ["green_sum", "BACKEND"]
