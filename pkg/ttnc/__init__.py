"""Tree-tensor-network compiler: MPS/MPO to log-depth circuits."""

__version__ = "1.0.0"
