"""Numerical laboratory for L^p-lengths of surface flows, configuration-space
metrics, braids traced by trajectories and averaged word norms."""

__version__ = "0.1.0"
