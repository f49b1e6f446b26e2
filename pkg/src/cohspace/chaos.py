"""Kicked-top dynamics and largest Lyapunov exponents of variational flows.

The kicked top alternates a linear precession (variational flow of p*hbar*J_y
over unit time, which rotates the Bloch vector by angle p about y) with an
instantaneous torsion kick generated by (k/(n-1)) * J_z^2.  In a stereographic
chart the kick closes in elementary form,

    w  ->  exp(i alpha) w,     alpha = k (1 - |w|^2) / (1 + |w|^2),

with the same expression in both charts, and its Jacobian is analytic.  The
largest Lyapunov exponent comes from Benettin renormalization of a variational
tangent vector dw evolved with the linearized flow

    d(dw)/dt = A dw + B conj(dw),
    A = dF/dw,  B = dF/dwbar,  F = grad_wbar h / (i hbar g),

analytic when the energy supplies second Wirtinger derivatives, central
finite differences otherwise.  Tangent length is measured with the chart
metric, which makes it continuous across chart switches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .integrate import solve_rk45
from .kernels import KernelSpace, Point, spin_space
from .tdvp import (
    CHART_SWITCH_RADIUS,
    ExpectationFunction,
    MatrixExpectation,
    SphereChart,
    chart_for,
)

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]]) / 2


def spinor_from_bloch(s) -> Point:
    """Unit spinor with the given Bloch vector (X, Y, Z)."""
    s = np.asarray(s, dtype=float)
    x, y, z = s / np.linalg.norm(s)
    if z >= 0.0:
        w = (x + 1j * y) / (1.0 + z)
        v = np.array([1.0, w]) / math.sqrt(1.0 + abs(w) ** 2)
    else:
        wt = (x - 1j * y) / (1.0 - z)
        v = np.array([wt, 1.0]) / math.sqrt(1.0 + abs(wt) ** 2)
    return Point(v)


# --------------------------------------------------- linearized chart field


def _linearized_field(chart, energy: ExpectationFunction, hbar: float, fd_step: float = 1e-6):
    """Return f(w) -> (F, A, B): the chart velocity and its Wirtinger Jacobian."""
    if hasattr(energy, "chart_second"):
        def fab(w: complex):
            u = np.array([w])
            g = chart.metric(u)[0, 0]
            g_w = chart.metric_dw(u)
            _, grad, mixed, grad2 = energy.chart_second(chart, u)
            scale = 1.0 / (1j * hbar * g * g)
            return (
                grad / (1j * hbar * g),
                (mixed * g - grad * g_w) * scale,
                (grad2 * g - grad * np.conj(g_w)) * scale,
            )
        return fab

    def velocity(w: complex) -> complex:
        u = np.array([w])
        return complex(energy.chart_grad(chart, u)[0] / (1j * hbar * chart.metric(u)[0, 0]))

    def fab_fd(w: complex):
        h = fd_step
        fx = (velocity(w + h) - velocity(w - h)) / (2 * h)
        fy = (velocity(w + 1j * h) - velocity(w - 1j * h)) / (2 * h)
        return velocity(w), (fx - 1j * fy) / 2, (fx + 1j * fy) / 2

    return fab_fd


def _tangent_rhs(fab):
    def rhs(t, y):
        f, a, b = fab(y[0])
        return np.array([f, a * y[1] + b * np.conj(y[1])])
    return rhs


def _metric_len(chart, w: complex, delta: complex) -> float:
    return math.sqrt(chart.metric(np.array([w]))[0, 0].real) * abs(delta)


def _integrate_tangent(chart, energy, hbar, w, delta, t_span, rtol, atol):
    """Evolve (w, dw) over t_span with automatic chart switching."""
    switches = 0
    t_cur, t1 = float(t_span[0]), float(t_span[1])
    is_sphere = isinstance(chart, SphereChart)
    while True:
        def hook(t, y):
            return is_sphere and abs(y[0]) > CHART_SWITCH_RADIUS

        sol = solve_rk45(_tangent_rhs(_linearized_field(chart, energy, hbar)),
                         t_cur, t1, np.array([w, delta]), rtol=rtol, atol=atol,
                         step_hook=hook)
        t_cur = sol.t_end
        w, delta = sol.y_end
        if not sol.halted:
            return chart, w, delta, switches
        delta = -delta / (w * w)        # tangent pushforward of w -> 1/w
        w = 1.0 / w
        chart = chart.flipped()
        switches += 1
        if t_cur >= t1 - 1e-15 * max(1.0, abs(t1)):
            return chart, w, delta, switches


# ------------------------------------------------------------- kicked top


def kick_phase(w: complex, kick: float) -> float:
    rho = abs(w) ** 2
    return kick * (1.0 - rho) / (1.0 + rho)


def apply_kick(w: complex, delta: complex, kick: float) -> tuple[complex, complex]:
    """Torsion kick and its exact tangent map (chart-form identical north/south)."""
    rho = abs(w) ** 2
    alpha = kick * (1.0 - rho) / (1.0 + rho)
    aprime = -2.0 * kick / (1.0 + rho) ** 2      # d alpha / d rho
    phase = np.exp(1j * alpha)
    w_new = phase * w
    d_new = phase * (1.0 + 1j * rho * aprime) * delta + 1j * phase * w * w * aprime * np.conj(delta)
    return w_new, d_new


@dataclass
class KickedTop:
    """Spin coherent kicked top: precession angle `precession` about y per
    period followed by a torsion kick of strength `kick` about z."""

    n: int
    kick: float
    precession: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("kicked top needs n >= 1 monomials")
        self.space: KernelSpace = spin_space(self.n)
        from .reps import SpinRep

        jy = SpinRep(self.n).dgamma(_SY)
        self.precession_energy = MatrixExpectation(self.hbar * self.precession * jy)

    def period(self, chart, w, delta, rtol=1e-10, atol=1e-12):
        chart, w, delta, switches = _integrate_tangent(
            chart, self.precession_energy, self.hbar, w, delta, (0.0, 1.0), rtol, atol
        )
        w, delta = apply_kick(w, delta, self.kick)
        return chart, w, delta, switches

    def step_point(self, z: Point, rtol=1e-10) -> Point:
        chart = chart_for(self.space, z)
        w = chart.coords(z)[0]
        chart, w, _, _ = self.period(chart, w, 0.0j, rtol=rtol)
        return chart.point(np.array([w]))


# ---------------------------------------------------------------- Lyapunov


@dataclass
class LyapunovResult:
    exponent: float
    times: np.ndarray          # segment end times
    running: np.ndarray        # cumulative estimate after each segment
    tail_gap: float            # |last-quarter mean - full mean|
    chart_switches: int

    @property
    def segments(self) -> int:
        return len(self.times)


def _benettin_result(times: np.ndarray, logs: np.ndarray, durations: np.ndarray,
                     switches: int) -> LyapunovResult:
    running = np.cumsum(logs) / np.cumsum(durations)
    exponent = float(running[-1])
    q = max(1, (3 * len(logs)) // 4)
    tail = float(np.sum(logs[q:]) / np.sum(durations[q:])) if q < len(logs) else exponent
    return LyapunovResult(
        exponent=exponent,
        times=times,
        running=running,
        tail_gap=abs(tail - exponent),
        chart_switches=switches,
    )


def _seed_tangent(chart, w, rng) -> complex:
    d = rng.standard_normal() + 1j * rng.standard_normal()
    return d / _metric_len(chart, w, d)


def lyapunov_kicked(top: KickedTop, z0: Point, n_periods: int = 2000,
                    rtol: float = 1e-10, atol: float = 1e-12,
                    seed: int = 7) -> LyapunovResult:
    """Benettin estimate of the top's largest Lyapunov exponent (per period)."""
    if n_periods < 4:
        raise ConfigError("need at least 4 periods for a tail estimate")
    rng = np.random.default_rng(seed)
    chart = chart_for(top.space, z0)
    w = complex(chart.coords(z0)[0])
    delta = _seed_tangent(chart, w, rng)
    logs = np.empty(n_periods)
    switches = 0
    for i in range(n_periods):
        chart, w, delta, s = top.period(chart, w, delta, rtol=rtol, atol=atol)
        switches += s
        ell = _metric_len(chart, w, delta)
        logs[i] = math.log(ell)
        delta /= ell
    times = np.arange(1, n_periods + 1, dtype=float)
    return _benettin_result(times, logs, np.ones(n_periods), switches)


def lyapunov_continuous(space: KernelSpace, energy: ExpectationFunction, z0: Point,
                        t_total: float = 200.0, resample: float = 1.0,
                        rtol: float = 1e-10, atol: float = 1e-12, hbar: float = 1.0,
                        seed: int = 7) -> LyapunovResult:
    """Benettin estimate for an autonomous variational flow (per unit time)."""
    n_seg = int(round(t_total / resample))
    if n_seg < 4:
        raise ConfigError("need at least 4 renormalization segments")
    chart = chart_for(space, z0)
    if chart.dim != 1:
        raise ConfigError("tangent linearization implemented for 1-d charts")
    rng = np.random.default_rng(seed)
    w = complex(chart.coords(z0)[0])
    delta = _seed_tangent(chart, w, rng)
    logs = np.empty(n_seg)
    times = np.empty(n_seg)
    switches = 0
    t = 0.0
    for i in range(n_seg):
        chart, w, delta, s = _integrate_tangent(
            chart, energy, hbar, w, delta, (0.0, resample), rtol, atol
        )
        switches += s
        t += resample
        ell = _metric_len(chart, w, delta)
        logs[i] = math.log(ell)
        times[i] = t
        delta /= ell
    return _benettin_result(times, logs, np.full(n_seg, resample), switches)
