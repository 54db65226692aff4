"""Ensemble-averaged survival curves: analytic laws, Monte Carlo, quadrature.

A survival curve is the population of an analysis state after free evolution
for time t, averaged over the shot-to-shot field distribution. Closed forms
exist for Gaussian field spreads:

* superposition states, z-axis spread: P(t) = (1 + e^{-(t/T2*)^2}) / 2 with
  T2* = hbar / (muB |gF| width_z);
* |1,+1> (or |1,-1>), transverse spread: the commonly used stretched form
  P(t) = (3 + 5 e^{-(t/T)^2}) / 8 with T = 2 hbar / (muB |gF| width_x),
  flooring at 3/8 as the evolution leaves the qubit subspace. The exact
  average is (3 + 4 e^{-x^2} + e^{-4x^2}) / 8 (``stretched_survival_exact``);
  the two agree at t = 0 and for t >> T.

Monte Carlo averaging draws one static field per realization from the
counter-based streams; quadrature replaces the average with Gauss-Hermite
(Gaussian), Gauss-Legendre (uniform) or generalized Gauss-Laguerre (thermal,
weight sqrt(x) e^{-x}) nodes when a single axis fluctuates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_genlaguerre

from .constants import CONST
from .noise import FieldNoiseModel
from .spin1 import Spin1State, survival_curve_batch

_CHUNK = 4096  # fixed Monte Carlo chunk so the reduction order never varies


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing times starting at 0, seconds."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        if t.size < 1 or t[0] != 0.0:
            raise ValueError("time grid must start at 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @classmethod
    def regular(cls, t_max: float, step: float) -> "TimeGrid":
        n = int(round(t_max / step))
        return cls(np.linspace(0.0, n * step, n + 1))

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class DecayCurve:
    """Survival probabilities with per-point standard errors on a TimeGrid."""

    grid: TimeGrid
    probabilities: np.ndarray
    stderr: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).reshape(-1)
        s = np.asarray(self.stderr, dtype=float).reshape(-1)
        if not (len(self.grid) == p.size == s.size):
            raise ValueError("grid, probabilities and stderr lengths differ")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.any(s < 0):
            raise ValueError("stderr must be >= 0")
        p.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "stderr", s)


def analytic_survival(kind: str, t, time_constant: float) -> np.ndarray:
    """Closed-form decay laws.

    kind="superposition": (1 + e^{-(t/Tc)^2}) / 2
    kind="stretched":     (3 + 5 e^{-(t/Tc)^2}) / 8
    """
    if time_constant <= 0:
        raise ValueError("time_constant must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    decay = np.exp(-((t / time_constant) ** 2))
    if kind == "superposition":
        return 0.5 * (1.0 + decay)
    if kind == "stretched":
        return (3.0 + 5.0 * decay) / 8.0
    raise ValueError("kind must be 'superposition' or 'stretched'")


def stretched_survival_exact(t, time_constant: float) -> np.ndarray:
    """Exact Gaussian average of the |1,+1> survival under transverse spread.

    (3 + 4 e^{-x^2} + e^{-4 x^2}) / 8 with x = t/Tc; the pointwise oracle for
    Monte Carlo. Same end points as the stretched law, up to 0.060 higher in
    between.
    """
    if time_constant <= 0:
        raise ValueError("time_constant must be positive")
    x2 = (np.asarray(t, dtype=float) / time_constant) ** 2
    return (3.0 + 4.0 * np.exp(-x2) + np.exp(-4.0 * x2)) / 8.0


def time_constant_from_width(axis: str, width: float) -> float:
    """Dephasing time constant from a Gaussian field width (1/e half-width).

    axis="z": T2* = hbar / (muB |gF| width)   (superposition states)
    axis="x": T   = 2 hbar / (muB |gF| width) (|1,+/-1> states, twice T2*)
    """
    if width <= 0:
        raise ValueError("width must be positive")
    t2 = CONST.hbar / (CONST.muB * abs(CONST.gF) * width)
    if axis == "z":
        return t2
    if axis == "x":
        return 2.0 * t2
    raise ValueError("axis must be 'z' or 'x'")


def width_from_std(std: float) -> float:
    """Convert a standard deviation to the 1/e half-width (sqrt2 * std)."""
    return std * np.sqrt(2.0)


def ensemble_survival(init: Spin1State, analysis: Spin1State,
                      model: FieldNoiseModel, grid: TimeGrid,
                      n_samples: int, seed: int) -> DecayCurve:
    """Monte Carlo survival curve over ``n_samples`` static-field draws.

    Mean and stderr (sample std / sqrt(n)) per time point. Fields come from
    the counter-based stream and the accumulation chunk size is fixed, so a
    given seed reproduces the curve bitwise.
    """
    from .noise import sample_fields

    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    times = grid.times
    # chunked mean/variance via Chan's combining update: fixed chunk size and
    # order keep the reduction deterministic, and a constant ensemble yields
    # exactly zero variance
    count = 0
    mean = np.zeros(times.size)
    m2 = np.zeros(times.size)
    for start in range(0, n_samples, _CHUNK):
        n_chunk = min(_CHUNK, n_samples - start)
        fields = sample_fields(model, start, n_chunk, seed)
        p = survival_curve_batch(init, analysis, fields, times)
        chunk_mean = p.mean(axis=0)
        chunk_m2 = ((p - chunk_mean) ** 2).sum(axis=0)
        delta = chunk_mean - mean
        total = count + n_chunk
        mean = mean + delta * (n_chunk / total)
        m2 = m2 + chunk_m2 + delta**2 * (count * n_chunk / total)
        count = total
    stderr = np.sqrt(m2 / (n_samples - 1) / n_samples)
    return DecayCurve(
        grid=grid, probabilities=np.clip(mean, 0.0, 1.0), stderr=stderr,
        meta={"generator": "mc", "n_samples": n_samples, "seed": seed},
    )


def apply_shot_noise(curve: DecayCurve, shots: int, seed: int) -> DecayCurve:
    """Synthetic measurement noise: binomial resampling at ``shots``/point.

    Probabilities become count/shots with stderr sqrt(p(1-p)/shots) floored
    at 1/(2*shots); draws come from the counter-based stream (one slot per
    shot, one index per time point).
    """
    from . import rng

    if shots < 1:
        raise ValueError("shots must be >= 1")
    u = rng.uniforms(seed, rng.DOMAIN_GENERIC, 0, len(curve.grid), shots)
    counts = (u < curve.probabilities[:, None]).sum(axis=1)
    p_hat = counts / shots
    stderr = np.maximum(np.sqrt(p_hat * (1.0 - p_hat) / shots), 0.5 / shots)
    meta = dict(curve.meta)
    meta.update({"shot_noise": {"shots": shots, "seed": seed}})
    return DecayCurve(grid=curve.grid, probabilities=p_hat, stderr=stderr, meta=meta)


def _axis_nodes(model: FieldNoiseModel, axis_index: int, nodes: int):
    """Quadrature (values, weights) for the single fluctuating axis.

    Components on the axis (Gaussian, uniform, thermal on z) are composed by
    tensor product; weights sum to 1.
    """
    axis = model.axes[axis_index]
    parts: list[tuple[np.ndarray, np.ndarray]] = []
    if axis.gaussian is not None and axis.gaussian.width > 0:
        x, w = hermgauss(nodes)
        parts.append((axis.gaussian.mean + axis.gaussian.width * x,
                      w / np.sqrt(np.pi)))
    if axis.uniform is not None and axis.uniform.hi > axis.uniform.lo:
        x, w = leggauss(nodes)
        lo, hi = axis.uniform.lo, axis.uniform.hi
        parts.append((0.5 * (hi + lo) + 0.5 * (hi - lo) * x, 0.5 * w))
    if axis_index == 2 and model.thermal is not None and model.thermal.scale > 0:
        th = model.thermal
        x, w = roots_genlaguerre(nodes, 0.5)
        db = x * CONST.kB * th.temperature * th.bsigma0 / th.trap_depth
        parts.append((th.bsigma0 - db, w / w.sum()))
    values = np.zeros(1)
    weights = np.ones(1)
    for v, w in parts:
        values = (values[:, None] + v[None, :]).ravel()
        weights = (weights[:, None] * w[None, :]).ravel()
    return values, weights


def quadrature_survival(init: Spin1State, analysis: Spin1State,
                        model: FieldNoiseModel, grid: TimeGrid,
                        nodes: int = 96) -> DecayCurve:
    """Deterministic survival curve by quadrature over one fluctuating axis.

    Requires exactly one axis with a continuous distribution (multiple
    components on that axis tensor-compose); models with two or more
    fluctuating axes are rejected -- fall back to Monte Carlo there.
    stderr is zero.
    """
    if nodes < 64:
        raise ValueError("nodes must be >= 64")
    fluct = model.fluctuating_axes()
    if len(fluct) > 1:
        raise ValueError("quadrature needs a single fluctuating axis; "
                         "use ensemble_survival for this model")
    axis_index = fluct[0] if fluct else 2
    values, weights = _axis_nodes(model, axis_index, nodes)

    offsets = np.array([model.x.offset, model.y.offset, model.z.offset])
    # a zero-width Gaussian still shifts the axis by its mean
    for i, axis in enumerate(model.axes):
        if axis.gaussian is not None and axis.gaussian.width == 0:
            offsets[i] += axis.gaussian.mean
        if axis.uniform is not None and axis.uniform.hi == axis.uniform.lo:
            offsets[i] += axis.uniform.lo
    if model.thermal is not None and model.thermal.scale == 0:
        offsets[2] += model.thermal.bsigma0

    # node values carry their component means; offsets add the static part
    fields = np.tile(offsets, (values.size, 1))
    if fluct:
        fields[:, axis_index] = offsets[axis_index] + values

    p = survival_curve_batch(init, analysis, fields, grid.times)
    mean = weights @ p
    return DecayCurve(
        grid=grid, probabilities=np.clip(mean, 0.0, 1.0),
        stderr=np.zeros(len(grid)),
        meta={"generator": "quadrature", "nodes": int(nodes),
              "axis": "xyz"[axis_index]},
    )


def ensemble_density(init: Spin1State, model: FieldNoiseModel, grid: TimeGrid,
                     n_samples: int, seed: int) -> np.ndarray:
    """Ensemble-averaged density matrices rho(t), shape (len(grid), 3, 3).

    Mean of |psi(t)><psi(t)| over the same field draws ensemble_survival
    would use.
    """
    from .noise import sample_fields
    from .spin1 import eigenvectors_batch

    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    times = grid.times
    k = np.array([1.0, 0.0, -1.0])
    acc = np.zeros((times.size, 3, 3), dtype=complex)
    for start in range(0, n_samples, _CHUNK):
        count = min(_CHUNK, n_samples - start)
        fields = sample_fields(model, start, count, seed)
        v, omega = eigenvectors_batch(fields)
        coeff = np.einsum("nik,i->nk", v.conj(), init.amplitudes)
        phases = np.exp(-1j * omega[:, None, None] * k[None, None, :]
                        * times[None, :, None])              # (n, m, 3)
        psi = np.einsum("nik,nmk->nmi", v, phases * coeff[:, None, :])
        acc += np.einsum("nmi,nmj->mij", psi, psi.conj())
    rho = acc / n_samples
    rho = 0.5 * (rho + np.conj(np.swapaxes(rho, 1, 2)))
    return rho
