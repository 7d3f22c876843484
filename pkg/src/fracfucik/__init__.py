"""Fractional p-Laplacian with nonlocal Neumann boundary conditions.

Discretizes the collar-weighted eigenvalue problem, computes the first
eigenpair and the first nontrivial curve of the Fucik spectrum by a
mountain-pass minimax, and checks the limiting and non-resonance behaviour.
"""

__version__ = "0.1.0"
