"""Bound-state table for the Coulomb problem from the implicit spectrum solver.

Prints the levels found by the determinant-root search against the exact
Rydberg series E_n = -m alpha^2 / (2 hbar^2 n^2) and reports the relative
error per level.  Increasing --basis improves the deeper levels first; the
shallow ones need a larger search window reaching toward zero.

Usage:
    python3 scripts/coulomb_levels.py [--levels 5] [--basis 8]
"""

import argparse
import sys

from cohspace.spectra import coulomb_model, solve_implicit_spectrum


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, default=5)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--hbar", type=float, default=1.0)
    ap.add_argument("--basis", type=int, default=8,
                    help="radial basis size n_max")
    args = ap.parse_args(argv)

    model = coulomb_model(mass=args.mass, alpha=args.alpha, hbar=args.hbar,
                          n_max=args.basis)
    rydberg = args.mass * args.alpha**2 / (2 * args.hbar**2)
    # window below the continuum edge, wide enough for the first `levels`
    lo = -1.5 * rydberg
    hi = -rydberg / (args.levels + 0.5) ** 2
    result = solve_implicit_spectrum(model, (lo, hi), tol=1e-12)

    print(f"{'n':>3} {'E_found':>16} {'E_exact':>16} {'rel err':>10}")
    found = [e for _, e, _ in result.discrete][: args.levels]
    for n, e in enumerate(found, start=1):
        exact = -rydberg / n**2
        rel = abs(e - exact) / abs(exact)
        print(f"{n:>3} {e:>16.10f} {exact:>16.10f} {rel:>10.2e}")
    if len(found) < args.levels:
        print(f"only {len(found)} roots in the window; "
              f"raise --basis or widen the interval")
    for msg in result.warnings:
        print(f"warning: {msg}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
