"""Pseudospectral laboratory for the 2D Dirac-Klein-Gordon system."""
from ._accel import USE_NUMBA, backend
from .grid import GridSpec, ScalarField, SpaceTimeField, SpinorField, dft_forward, dft_inverse
from .norms import NormSpec, fourier_lebesgue_norm, xsb_norm
from .solver import DKGState, PhysicsParams, SolverConfig, split_data, reassemble

__version__ = "0.1.0"
