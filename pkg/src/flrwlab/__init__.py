"""flrwlab: numerical laboratory for damped waves with decaying propagation speed."""

__version__ = "0.1.0"
