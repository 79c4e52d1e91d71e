"""Linear stability of inertial reaction-diffusion dynamics on directed networks."""

__version__ = "0.1.0"
