"""cohspace: reproducing-kernel coherent spaces made computable.

The package turns a kernel function K(z, z') on a label set into working
numerics: Gram-matrix quantum spaces, quantized symmetries, exact coherent
dynamics and their variational (semiquantal) projection, chaos diagnostics,
implicitly defined spectra, and expectation dynamics over Lie *-algebras.

Layout:

- kernels     kernel catalog, distances, Gram/PSD checks, map admissibility
- causal      lattice sections and the normalization/causality conditions
- qspace      finite quantum spaces from Gram factorizations; span states
- reps        concrete finite representations (Fock cutoff, spin monomials)
- quantize    map/generator quantization on a quantum space
- integrate   embedded RK5(4) with deterministic stats
- dynamics    linear coherent flows and their representation-space lifts
- tdvp        Kaehler metric and variational (Dirac-Frenkel) flows in charts
- chaos       kicked semiquantal systems and Lyapunov estimates
- spectra     implicit spectral models lambda_n(E) = m(E) xi_n(E) - k(E)
- liealg      Lie *-algebras, states, expectation evolution, Koopman example
- cli         deterministic command-line front end
"""

# Submodules are imported on demand (import cohspace.kernels etc.).  The
# package root stays numpy-free so the CLI can pin BLAS thread pools via
# environment variables before any numeric library loads.

__version__ = "0.1.0"
