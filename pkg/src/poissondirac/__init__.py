"""Exact and numerical tools for Poisson and Dirac geometry.

Submodules:

* ``exactlin``: exact rational linear algebra on subspaces.
* ``diraclin``: vector Dirac structures and their operations.
* ``multivec``: polynomial multivector calculus and integrability checks.
* ``nctorus``: quantum tori and the SO(n,n|Z) fractional action.
* ``tss``: Morita invariants of stable Poisson structures on the 2-torus.
* ``morita_finite``: bispaces and Picard groups of finite groups.
* ``cli``: the ``poissondirac`` command line tool.
"""

__version__ = "0.1.0"
