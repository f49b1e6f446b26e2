"""Coherent-space kernel catalog and pointwise kernel operations.

A coherent space here is a label set Z together with a kernel K(z, z'),
antiholomorphic in the first slot, such that every finite Gram matrix
[K(z_i, z_j)] is Hermitian positive semidefinite.  The catalog below covers:

- ``trivial``           K = <z, z'> on C^n,
- ``euclidean_subset``  the same kernel restricted to a subset of C^n,
- ``klauder``           labels (z0, zeta) in C x C^m, K = exp(conj(z0) + z0' + <zeta, zeta'>),
- ``spin``              unit spinors in C^2, K = <z, z'>^n  (admissible iff n is a
                        nonnegative integer; n = 2j),
- ``spin_t``            transpose variant K = (z^T z')^n, *not* Hermitian; it obeys
                        the involutive identity conj K(z, z') = K(conj z, conj z'),
- ``classical_limit``   K(z, z') = 1 if z' = conj(z) else 0 (delta Gram on
                        self-conjugate labels),
- ``power``             K_base^n for integer n >= 1,
- ``debranges``         two-branch kernel built from an entire polynomial E with
                        E#(w) := conj(E(conj w)); the branch at z' = conj(z) is the
                        removable-singularity limit of the generic branch,
- ``moebius``           Z = {|z1| > |z2|} in C^2, K = 1/(conj(z1) z1' - conj(z2) z2'),
- ``discrete``          finite label set with an explicit kernel table,
- ``icosahedron``       the 12 icosahedron vertices with the real dot-product kernel,
- ``heisenberg``        line-bundle labels (lambda, s) with the *bilinear* kernel
                        lambda lambda' exp(s^T s'/hbar); not Hermitian, projective
                        degree 1 under (lambda, s) -> (alpha lambda, s).

Throughout, <a, b> = sum conj(a_k) b_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    CoherenceViolationError,
    ConfigError,
    InvalidPointError,
    NumericalError,
)

POINT_TOL = 1e-12          # constraint residual accepted as "on the manifold"
PSD_TOL = 1e-8             # relative PSD tolerance: eig >= -tol * max(1, ||G||)
DISTANCE_SLACK = 1e-6      # relative slack before a negative radicand is fatal


class Point:
    """A label point: complex coordinate vector plus an optional line-bundle multiplier."""

    __slots__ = ("coords", "multiplier")

    def __init__(self, coords, multiplier: complex | None = None):
        self.coords = np.atleast_1d(np.asarray(coords, dtype=complex))
        self.multiplier = None if multiplier is None else complex(multiplier)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.multiplier is None:
            return f"Point({self.coords.tolist()})"
        return f"Point({self.coords.tolist()}, multiplier={self.multiplier})"

    def close_to(self, other: "Point", tol: float = 1e-12) -> bool:
        if self.coords.shape != other.coords.shape:
            return False
        if not np.allclose(self.coords, other.coords, rtol=0.0, atol=tol):
            return False
        a = 0.0 if self.multiplier is None else self.multiplier
        b = 0.0 if other.multiplier is None else other.multiplier
        return abs(a - b) <= tol


def point(coords, multiplier=None) -> Point:
    return Point(coords, multiplier)


@dataclass
class KernelPartials:
    """Analytic path derivatives of the kernel.

    ``d_second(z, v, vdot)``            = d/ds K(z, v(s))      given v, v' = vdot
    ``d_first_second(u, udot, v, vdot)`` = d2/(dt ds) K(u(t), v(s))
    """

    d_second: Callable[[Point, Point, np.ndarray], complex]
    d_first_second: Callable[[Point, np.ndarray, Point, np.ndarray], complex]


@dataclass
class KernelSpace:
    label_dim: int
    kind: str
    eval_fn: Callable[[Point, Point], complex]
    conjugate_fn: Callable[[Point], Point]
    partials: Optional[KernelPartials] = None
    projective_degree: Optional[int] = None
    normalized: bool = False
    hermitian: bool = True
    constraint: Optional[Callable[[Point], float]] = None
    constraint_name: str = ""
    domain: Optional[Callable[[Point], bool]] = None
    domain_name: str = ""
    scalar_mult: Optional[Callable[[complex, Point], Point]] = None
    descriptor: dict = field(default_factory=dict)
    base: Optional["KernelSpace"] = None  # set for power spaces

    def eval(self, z: Point, z2: Point) -> complex:
        return eval_kernel(self, z, z2)

    def conjugate(self, z: Point) -> Point:
        validate_point(self, z)
        return self.conjugate_fn(z)


def validate_point(space: KernelSpace, z: Point) -> None:
    if not isinstance(z, Point):
        raise InvalidPointError(f"expected a Point, got {type(z).__name__}")
    if z.coords.shape != (space.label_dim,):
        raise InvalidPointError(
            f"{space.kind}: label has {z.coords.shape[0]} coordinates, expected {space.label_dim}"
        )
    if not np.all(np.isfinite(z.coords.view(float))):
        raise InvalidPointError(f"{space.kind}: non-finite label coordinates")
    if space.projective_degree is not None:
        if z.multiplier is None:
            raise InvalidPointError(f"{space.kind}: line-bundle point needs a multiplier")
        if not (math.isfinite(z.multiplier.real) and math.isfinite(z.multiplier.imag)):
            raise InvalidPointError(f"{space.kind}: non-finite multiplier")
    if space.constraint is not None:
        res = float(space.constraint(z))
        if res > POINT_TOL:
            raise InvalidPointError(
                f"{space.kind}: constraint '{space.constraint_name}' violated (residual {res:.3e})"
            )
    if space.domain is not None and not space.domain(z):
        raise InvalidPointError(f"{space.kind}: label outside the domain {space.domain_name}")


def eval_kernel(space: KernelSpace, z: Point, z2: Point) -> complex:
    validate_point(space, z)
    validate_point(space, z2)
    return complex(space.eval_fn(z, z2))


def conjugate_point(space: KernelSpace, z: Point) -> Point:
    return space.conjugate(z)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _conj_coords(z: Point) -> Point:
    return Point(np.conj(z.coords), None if z.multiplier is None else np.conj(z.multiplier))


def trivial_space(dim: int) -> KernelSpace:
    partials = KernelPartials(
        d_second=lambda z, v, vdot: np.vdot(z.coords, vdot),
        d_first_second=lambda u, udot, v, vdot: np.vdot(udot, vdot),
    )
    return KernelSpace(
        label_dim=dim,
        kind="trivial",
        eval_fn=lambda z, z2: np.vdot(z.coords, z2.coords),
        conjugate_fn=_conj_coords,
        partials=partials,
        descriptor={"kind": "trivial", "dim": dim},
    )


def euclidean_subset(dim: int, radius: float = 1.0) -> KernelSpace:
    """The trivial kernel restricted to the closed ball ||z|| <= radius."""
    return KernelSpace(
        label_dim=dim,
        kind="euclidean_subset",
        eval_fn=lambda z, z2: np.vdot(z.coords, z2.coords),
        conjugate_fn=_conj_coords,
        domain=lambda z: float(np.linalg.norm(z.coords)) <= radius + POINT_TOL,
        domain_name=f"||z|| <= {radius}",
        descriptor={"kind": "euclidean_subset", "dim": dim, "radius": radius},
    )


def klauder_space(modes: int = 1) -> KernelSpace:
    """Labels (z0, zeta) in C x C^modes with K = exp(conj(z0) + z0' + <zeta, zeta'>)."""

    def ev(z, z2):
        return np.exp(np.conj(z.coords[0]) + z2.coords[0] + np.vdot(z.coords[1:], z2.coords[1:]))

    def d_second(z, v, vdot):
        return ev(z, v) * (vdot[0] + np.vdot(z.coords[1:], vdot[1:]))

    def d_first_second(u, udot, v, vdot):
        k = ev(u, v)
        a = np.conj(udot[0]) + np.vdot(udot[1:], v.coords[1:])
        b = vdot[0] + np.vdot(u.coords[1:], vdot[1:])
        return k * (a * b + np.vdot(udot[1:], vdot[1:]))

    return KernelSpace(
        label_dim=1 + modes,
        kind="klauder",
        eval_fn=ev,
        conjugate_fn=_conj_coords,
        partials=KernelPartials(d_second, d_first_second),
        descriptor={"kind": "klauder", "modes": modes},
    )


def _unit_norm_residual(z: Point) -> float:
    return abs(float(np.linalg.norm(z.coords)) - 1.0)


def spin_space(exponent: float) -> KernelSpace:
    """Unit spinors in C^2 with K = <z, z'>^n, n = exponent = 2j.

    Coherent (all Grams PSD) exactly when the exponent is a nonnegative
    integer; other exponents are accepted for diagnostics and fail the PSD
    check with a genuinely negative eigenvalue.
    """
    n = exponent
    is_int = abs(n - round(n)) < 1e-12

    def ev(z, z2):
        s = np.vdot(z.coords, z2.coords)
        if is_int:
            return s ** int(round(n))
        # principal branch for diagnostic (inadmissible) exponents
        return np.exp(n * np.log(s)) if s != 0 else 0.0j

    partials = None
    if is_int:
        ni = int(round(n))

        def d_second(z, v, vdot, _n=ni):
            s = np.vdot(z.coords, v.coords)
            return _n * s ** (_n - 1) * np.vdot(z.coords, vdot) if _n >= 1 else 0.0j

        def d_first_second(u, udot, v, vdot, _n=ni):
            s = np.vdot(u.coords, v.coords)
            out = 0.0j
            if _n >= 2:
                out += _n * (_n - 1) * s ** (_n - 2) * np.vdot(udot, v.coords) * np.vdot(u.coords, vdot)
            if _n >= 1:
                out += _n * s ** (_n - 1) * np.vdot(udot, vdot)
            return out

        partials = KernelPartials(d_second, d_first_second)

    return KernelSpace(
        label_dim=2,
        kind="spin",
        eval_fn=ev,
        conjugate_fn=_conj_coords,
        partials=partials,
        normalized=True,
        constraint=_unit_norm_residual,
        constraint_name="unit spinor norm",
        descriptor={"kind": "spin", "exponent": n},
    )


def spin_t_space(exponent: int) -> KernelSpace:
    """Transpose variant K = (z^T z')^n on unit spinors; involutive, not Hermitian."""
    n = int(exponent)

    def ev(z, z2):
        return (z.coords @ z2.coords) ** n

    return KernelSpace(
        label_dim=2,
        kind="spin_t",
        eval_fn=ev,
        conjugate_fn=_conj_coords,
        hermitian=False,
        normalized=False,
        constraint=_unit_norm_residual,
        constraint_name="unit spinor norm",
        descriptor={"kind": "spin_t", "exponent": n},
    )


def classical_limit_space(dim: int) -> KernelSpace:
    """K(z, z') = 1 iff z' = conj(z) (within 1e-12) else 0."""

    def ev(z, z2):
        return 1.0 + 0.0j if np.allclose(np.conj(z.coords), z2.coords, rtol=0.0, atol=1e-12) else 0.0j

    return KernelSpace(
        label_dim=dim,
        kind="classical_limit",
        eval_fn=ev,
        conjugate_fn=_conj_coords,
        normalized=True,
        descriptor={"kind": "classical_limit", "dim": dim},
    )


def power_space(base: KernelSpace, n: int) -> KernelSpace:
    """Pointwise power K_base^n, coherent for integer n >= 1 (Schur product)."""
    n = int(n)
    if n < 1:
        raise ConfigError("power kernel needs an integer exponent n >= 1")

    def ev(z, z2):
        return base.eval_fn(z, z2) ** n

    partials = None
    if base.partials is not None and base.hermitian:
        bp = base.partials

        def d_first(u, udot, v):
            # dK/dt of the Hermitian base via conj of the s-derivative with slots swapped
            return np.conj(bp.d_second(v, u, udot))

        def d_second(z, v, vdot):
            k = base.eval_fn(z, v)
            return n * k ** (n - 1) * bp.d_second(z, v, vdot)

        def d_first_second(u, udot, v, vdot):
            k = base.eval_fn(u, v)
            dt = d_first(u, udot, v)
            ds = bp.d_second(u, v, vdot)
            out = n * k ** (n - 1) * bp.d_first_second(u, udot, v, vdot)
            if n >= 2:
                out += n * (n - 1) * k ** (n - 2) * dt * ds
            return out

        partials = KernelPartials(d_second, d_first_second)

    return KernelSpace(
        label_dim=base.label_dim,
        kind="power",
        eval_fn=ev,
        conjugate_fn=base.conjugate_fn,
        partials=partials,
        normalized=base.normalized,
        hermitian=base.hermitian,
        constraint=base.constraint,
        constraint_name=base.constraint_name,
        domain=base.domain,
        domain_name=base.domain_name,
        descriptor={"kind": "power", "base": base.descriptor, "n": n},
        base=base,
    )


def debranges_space(coeffs: Sequence[complex] = (1j, 1.0)) -> KernelSpace:
    """Two-branch kernel built from the entire polynomial E (ascending coeffs).

    Generic branch (z' != conj z):

        K(z, z') = [E#(zbar) E(z') - E(zbar) E#(z')] / (2i (zbar - z'))

    with E#(w) = conj(E(conj w)) (conjugated coefficients).  At z' = conj z the
    kernel is the removable-singularity limit, evaluated at the Hermitian
    midpoint c = (zbar + z')/2 so the two-branch function stays exactly
    Hermitian across the switch:

        K = [E#(c) E'(c) - E(c) E#'(c)] / (-2i).

    The default E(z) = z + i is Hermite-Biehler with K identically 1.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.ndim != 1 or c.size < 1:
        raise ConfigError("debranges: need a 1-d coefficient list for E")
    cs = np.conj(c)  # coefficients of E#
    dc = c[1:] * np.arange(1, c.size)   # E'
    dcs = cs[1:] * np.arange(1, c.size)  # E#'

    def _pv(p, w):
        # polyval, ascending coefficients
        out = 0.0j
        for ck in p[::-1]:
            out = out * w + ck
        return out

    switch = 1e-8

    def ev(z, z2):
        zb = np.conj(z.coords[0])
        w = z2.coords[0]
        diff = zb - w
        if abs(diff) <= switch * (1.0 + abs(zb) + abs(w)):
            mid = 0.5 * (zb + w)
            return (_pv(cs, mid) * _pv(dc, mid) - _pv(c, mid) * _pv(dcs, mid)) / (-2j)
        return (_pv(cs, zb) * _pv(c, w) - _pv(c, zb) * _pv(cs, w)) / (2j * diff)

    return KernelSpace(
        label_dim=1,
        kind="debranges",
        eval_fn=ev,
        conjugate_fn=_conj_coords,
        descriptor={"kind": "debranges", "coeffs": [[float(x.real), float(x.imag)] for x in c]},
    )


def moebius_space() -> KernelSpace:
    """Z = {(z1, z2) : |z1| > |z2|}, K = 1/(conj(z1) z1' - conj(z2) z2')."""

    def ev(z, z2):
        d = np.conj(z.coords[0]) * z2.coords[0] - np.conj(z.coords[1]) * z2.coords[1]
        return 1.0 / d

    return KernelSpace(
        label_dim=2,
        kind="moebius",
        eval_fn=ev,
        conjugate_fn=_conj_coords,
        domain=lambda z: abs(z.coords[0]) > abs(z.coords[1]),
        domain_name="|z1| > |z2|",
        descriptor={"kind": "moebius"},
    )


def discrete_space(table: np.ndarray) -> KernelSpace:
    """Finite label set {0..m-1} with kernel values from an explicit table."""
    tab = np.asarray(table, dtype=complex)
    if tab.ndim != 2 or tab.shape[0] != tab.shape[1]:
        raise ConfigError("discrete kernel table must be square")
    m = tab.shape[0]
    herm = bool(np.allclose(tab, tab.conj().T, rtol=0.0, atol=1e-12))

    def _idx(z: Point) -> int:
        x = z.coords[0]
        i = int(round(x.real))
        if abs(x - i) > 1e-9 or not (0 <= i < m):
            raise InvalidPointError(f"discrete: label {x} is not an index in 0..{m - 1}")
        return i

    return KernelSpace(
        label_dim=1,
        kind="discrete",
        eval_fn=lambda z, z2: tab[_idx(z), _idx(z2)],
        conjugate_fn=lambda z: z,
        hermitian=herm,
        descriptor={"kind": "discrete", "table": [[[v.real, v.imag] for v in row] for row in tab]},
    )


def icosahedron_vertices() -> np.ndarray:
    """The 12 unit vertices (0, +-1, +-phi) / sqrt(1 + phi^2) and cyclic shifts."""
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    base = []
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            base.append((0.0, s1, s2 * phi))
            base.append((s1, s2 * phi, 0.0))
            base.append((s2 * phi, 0.0, s1))
    vs = np.array(sorted(set(base)), dtype=float) / math.sqrt(1.0 + phi * phi)
    assert vs.shape == (12, 3)
    return vs


def icosahedron_space() -> KernelSpace:
    """Icosahedron vertices in R^3 c C^3 with the dot-product kernel (Gram rank 3)."""
    verts = icosahedron_vertices()

    def _check(z: Point) -> float:
        d = np.abs(verts - z.coords[None, :]).max(axis=1)
        return float(d.min())

    return KernelSpace(
        label_dim=3,
        kind="icosahedron",
        eval_fn=lambda z, z2: np.vdot(z.coords, z2.coords),
        conjugate_fn=_conj_coords,
        normalized=True,
        constraint=lambda z: _check(z),
        constraint_name="icosahedron vertex",
        descriptor={"kind": "icosahedron"},
    )


def heisenberg_space(modes: int = 1, hbar: float = 1.0) -> KernelSpace:
    """Line-bundle labels (lambda, s): K = lambda lambda' exp(s^T s'/hbar), bilinear.

    Not Hermitian-symmetric; satisfies conj K(z, z') = K(conj z, conj z') and has
    projective degree 1 under the scalar action (lambda, s) -> (alpha lambda, s).
    """

    def ev(z, z2):
        return z.multiplier * z2.multiplier * np.exp(z.coords @ z2.coords / hbar)

    return KernelSpace(
        label_dim=modes,
        kind="heisenberg",
        eval_fn=ev,
        conjugate_fn=_conj_coords,
        hermitian=False,
        projective_degree=1,
        scalar_mult=lambda a, z: Point(z.coords, a * z.multiplier),
        descriptor={"kind": "heisenberg", "modes": modes, "hbar": hbar},
    )


_CATALOG: dict[str, Callable[..., KernelSpace]] = {}


def space_from_descriptor(desc: dict) -> KernelSpace:
    """Build a catalog space from its JSON descriptor (round-trips with .descriptor)."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("space descriptor must be a dict with a 'kind' field")
    kind = desc["kind"]
    try:
        if kind == "trivial":
            return trivial_space(int(desc["dim"]))
        if kind == "euclidean_subset":
            return euclidean_subset(int(desc["dim"]), float(desc.get("radius", 1.0)))
        if kind == "klauder":
            return klauder_space(int(desc.get("modes", 1)))
        if kind == "spin":
            return spin_space(float(desc["exponent"]))
        if kind == "spin_t":
            return spin_t_space(int(desc["exponent"]))
        if kind == "classical_limit":
            return classical_limit_space(int(desc["dim"]))
        if kind == "power":
            return power_space(space_from_descriptor(desc["base"]), int(desc["n"]))
        if kind == "debranges":
            coeffs = [complex(re, im) for re, im in desc.get("coeffs", [[0.0, 1.0], [1.0, 0.0]])]
            return debranges_space(coeffs)
        if kind == "moebius":
            return moebius_space()
        if kind == "discrete":
            tab = np.array([[complex(re, im) for re, im in row] for row in desc["table"]])
            return discrete_space(tab)
        if kind == "icosahedron":
            return icosahedron_space()
        if kind == "heisenberg":
            return heisenberg_space(int(desc.get("modes", 1)), float(desc.get("hbar", 1.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad descriptor for kind '{kind}': {exc}") from exc
    raise ConfigError(f"unknown kernel kind '{kind}'")


# ---------------------------------------------------------------------------
# pointwise operations
# ---------------------------------------------------------------------------


def distance(space: KernelSpace, z: Point, z2: Point) -> float:
    """Kernel-induced distance sqrt(K(z,z) + K(z',z') - 2 Re K(z,z'))."""
    if not space.hermitian:
        raise InvalidPointError(f"{space.kind}: distance needs a Hermitian kernel")
    kzz = eval_kernel(space, z, z).real
    kww = eval_kernel(space, z2, z2).real
    kzw = eval_kernel(space, z, z2)
    rad = kzz + kww - 2.0 * kzw.real
    scale = max(1.0, abs(kzz), abs(kww))
    if rad < -DISTANCE_SLACK * scale:
        raise CoherenceViolationError(
            f"{space.kind}: squared distance {rad:.3e} is negative beyond tolerance; "
            "kernel is not coherent on these labels"
        )
    return math.sqrt(max(rad, 0.0))


def gram_matrix(space: KernelSpace, points: Sequence[Point]) -> np.ndarray:
    """Gram matrix G[i, j] = K(z_i, z_j); exactly Hermitian by construction
    for Hermitian kernels (upper triangle computed, lower mirrored)."""
    pts = list(points)
    for p in pts:
        validate_point(space, p)
    n = len(pts)
    g = np.empty((n, n), dtype=complex)
    if space.hermitian:
        for i in range(n):
            for j in range(i, n):
                g[i, j] = space.eval_fn(pts[i], pts[j])
                if j > i:
                    g[j, i] = np.conj(g[i, j])
        g[np.diag_indices(n)] = g.diagonal().real
    else:
        for i in range(n):
            for j in range(n):
                g[i, j] = space.eval_fn(pts[i], pts[j])
    return g


@dataclass
class PsdVerdict:
    min_eigenvalue: float
    gram_norm: float
    passed: bool
    tolerance_used: float


def check_coherence(space: KernelSpace, points: Sequence[Point], tol: float = PSD_TOL) -> PsdVerdict:
    """PSD test of the Gram matrix with a relative tolerance:
    passed iff min eig >= -tol * max(1, ||G||_2)."""
    if not space.hermitian:
        raise InvalidPointError(f"{space.kind}: PSD check needs a Hermitian kernel")
    g = gram_matrix(space, points)
    try:
        eigs = np.linalg.eigvalsh(g)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise NumericalError(f"eigensolver failed on a {g.shape[0]}x{g.shape[0]} Gram: {exc}") from exc
    lo = float(eigs[0])
    norm = float(max(abs(eigs[0]), abs(eigs[-1]))) if eigs.size else 0.0
    return PsdVerdict(
        min_eigenvalue=lo,
        gram_norm=norm,
        passed=bool(lo >= -tol * max(1.0, norm)),
        tolerance_used=float(tol),
    )


def check_coherent_map(space, forward, adjoint=None, samples=None, tol: float = 1e-10):
    """Verify K(z, A z') = K(A* z, z') over sample pairs.

    ``forward`` may be a CoherentMapSpec-like object carrying .forward/.adjoint,
    in which case ``adjoint`` is taken from it.  Returns (passed, max_residual)
    with residuals relative to 1 + |K|.
    """
    if adjoint is None and hasattr(forward, "forward"):
        spec = forward
        forward, adjoint = spec.forward, spec.adjoint
    if adjoint is None:
        raise ConfigError("check_coherent_map needs an adjoint map")
    if not samples:
        raise ConfigError("check_coherent_map needs sample pairs")
    worst = 0.0
    for z, z2 in samples:
        az2 = forward(z2)
        asz = adjoint(z)
        validate_point(space, az2)
        validate_point(space, asz)
        lhs = eval_kernel(space, z, az2)
        rhs = eval_kernel(space, asz, z2)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return worst <= tol, worst


def linear_point_map(matrix: np.ndarray, renormalize: bool = False) -> Callable[[Point], Point]:
    """Point map z -> M z on the label coordinates (multiplier untouched).

    renormalize=True projects the image back to the unit sphere, for maps that
    preserve it only up to scale.
    """
    m = np.asarray(matrix, dtype=complex)

    def apply(z: Point) -> Point:
        w = m @ z.coords
        if renormalize:
            w = w / np.linalg.norm(w)
        return Point(w, z.multiplier)

    return apply


@dataclass
class MoebiusVerdict:
    member: bool
    alpha: float
    beta_abs: float
    gamma: float


def moebius_semigroup_member(a: np.ndarray) -> MoebiusVerdict:
    """Sufficient condition for a 2x2 matrix to map {|z1|>|z2|} into itself
    compatibly with the kernel: alpha > 0, |beta| <= alpha, gamma <= alpha - 2|beta|,
    where alpha = |A11|^2 - |A21|^2, beta = conj(A11) A12 - conj(A21) A22,
    gamma = |A22|^2 - |A12|^2."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2):
        raise ConfigError("moebius semigroup test needs a 2x2 matrix")
    alpha = abs(a[0, 0]) ** 2 - abs(a[1, 0]) ** 2
    beta = np.conj(a[0, 0]) * a[0, 1] - np.conj(a[1, 0]) * a[1, 1]
    gamma = abs(a[1, 1]) ** 2 - abs(a[0, 1]) ** 2
    member = alpha > 0 and abs(beta) <= alpha and gamma <= alpha - 2.0 * abs(beta)
    return MoebiusVerdict(bool(member), float(alpha), float(abs(beta)), float(gamma))


def gu11_adjoint(a: np.ndarray) -> np.ndarray:
    """Adjoint within GU(1,1): A* = J A^H J with J = diag(1, -1)."""
    j = np.diag([1.0, -1.0])
    return j @ np.asarray(a, dtype=complex).conj().T @ j


# ---------------------------------------------------------------------------
# seeded samplers (used by tests and by the CLI's kernel-check sampling)
# ---------------------------------------------------------------------------


def _cgauss(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)


def sample_points(space: KernelSpace, rng: np.random.Generator, count: int) -> list[Point]:
    """Draw `count` valid points, scaled so Gram matrices stay well-conditioned."""
    kind = space.kind
    out: list[Point] = []
    for _ in range(count):
        if kind in ("trivial", "debranges"):
            out.append(Point(_cgauss(rng, space.label_dim)))
        elif kind == "euclidean_subset":
            v = _cgauss(rng, space.label_dim)
            r = np.linalg.norm(v)
            if r > 1.0:
                v = v * (rng.uniform(0.05, 0.95) / r)
            out.append(Point(v))
        elif kind == "klauder":
            z0 = _cgauss(rng, 1, 0.3)
            zeta = _cgauss(rng, space.label_dim - 1, 0.8)
            out.append(Point(np.concatenate([z0, zeta])))
        elif kind in ("spin", "spin_t"):
            v = _cgauss(rng, 2)
            out.append(Point(v / np.linalg.norm(v)))
        elif kind == "classical_limit":
            out.append(Point(rng.standard_normal(space.label_dim).astype(complex)))
        elif kind == "power":
            out.extend(sample_points(space.base, rng, 1))
        elif kind == "moebius":
            z1 = _cgauss(rng, 1, 1.0)
            while abs(z1[0]) < 0.3:
                z1 = _cgauss(rng, 1, 1.0)
            t = rng.uniform(0.0, 0.7)
            phase = np.exp(2j * math.pi * rng.uniform())
            out.append(Point(np.array([z1[0], t * abs(z1[0]) * phase])))
        elif kind == "icosahedron":
            verts = icosahedron_vertices()
            out.append(Point(verts[rng.integers(0, len(verts))].astype(complex)))
        elif kind == "discrete":
            m = len(space.descriptor["table"])
            out.append(Point([complex(rng.integers(0, m))]))
        elif kind == "heisenberg":
            lam = complex(_cgauss(rng, 1, 1.0)[0])
            while abs(lam) < 0.1:
                lam = complex(_cgauss(rng, 1, 1.0)[0])
            out.append(Point(_cgauss(rng, space.label_dim, 0.7), multiplier=lam))
        else:
            raise ConfigError(f"no sampler for kernel kind '{kind}'")
    return out
