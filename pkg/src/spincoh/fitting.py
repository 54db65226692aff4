"""Weighted least-squares fits of the dephasing model to survival curves.

The optimizer is a damped Gauss-Newton (Levenberg) iteration with a central
finite-difference Jacobian: steps solve (J'J + lam diag(J'J)) dp = -J'r,
damping grows x10 on a rejected step and shrinks /10 on acceptance, starting
at 1e-3. Convergence is declared when the relative step falls below 1e-8;
otherwise the result carries converged=False rather than raising.

Model families:

* ``superposition-analytic`` -- offset + amplitude * exp(-(t/T2*)^2) with
  T2* tied to the free z-axis width.
* ``stretched-analytic`` -- offset + amplitude * exp(-(t/T)^2) with T tied to
  the free transverse width (T = 2 * T2* relation).
* ``full-ensemble`` -- quadrature evaluation of the z-axis noise model with
  free parameters among mean_bz, width_bz and circular_fraction; trap depth
  and temperature stay fixed (defaults kB*650 uK and 150 uK), and
  circular_fraction maps linearly to the trap-bottom field B_sigma0 through
  the reference trap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import units
from .dephasing import DecayCurve, quadrature_survival, time_constant_from_width
from .noise import AxisNoise, FieldNoiseModel, GaussianFieldDist, ThermalShiftDist
from .spin1 import Spin1State, named_state
from .trap import PolarizationSpec, TrapConfig, vector_shift_field

# Reference trap for the circular_fraction -> B_sigma0 map (856 nm, 30 mW,
# 3.5 um waist); vector_shift_field is linear in the fraction so this is a
# pure reparameterization.
DEFAULT_TRAP = TrapConfig(wavelength=856e-9, power=30e-3, waist=3.5e-6)
DEFAULT_TRAP_DEPTH = units.uk_to_joule(650.0)  # J
DEFAULT_TEMPERATURE = 150e-6                   # K

FAMILIES = ("superposition-analytic", "stretched-analytic", "full-ensemble")

_DEFAULTS = {
    "superposition-analytic": {"width_bz": 2.25e-7, "amplitude": 0.5, "offset": 0.5},
    "stretched-analytic": {"width_bx": 1.2e-7, "amplitude": 5.0 / 8.0, "offset": 3.0 / 8.0},
    "full-ensemble": {"mean_bz": 5e-7, "width_bz": 2e-7, "circular_fraction": 0.0},
}


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with 1-sigma errors and convergence metadata."""

    params: dict[str, float]
    stderr: dict[str, float]
    covariance: np.ndarray
    param_names: tuple[str, ...]
    residual_norm: float
    converged: bool
    iterations: int
    family: str
    message: str = ""
    derived: dict[str, float] = field(default_factory=dict)


def _numeric_jacobian(residual_fn, p, scale):
    r0 = residual_fn(p)
    jac = np.empty((r0.size, p.size))
    for j in range(p.size):
        h = 1e-6 * max(abs(p[j]), scale[j])
        up = p.copy()
        up[j] += h
        dn = p.copy()
        dn[j] -= h
        jac[:, j] = (residual_fn(up) - residual_fn(dn)) / (2.0 * h)
    return jac


def levenberg_fit(residual_fn, p0, lower, upper, max_iterations=200,
                  rel_step_tol=1e-8, damping0=1e-3):
    """Damped Gauss-Newton on a residual vector, box-projected steps.

    Returns (p, cov, residual_norm, converged, iterations, message); cov is
    (J'J)^-1 scaled by the reduced chi-square at the solution.
    """
    p = np.asarray(p0, dtype=float).copy()
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(p < lower) or np.any(p > upper):
        raise ValueError("initial guess lies outside the bounds")
    # difference scale per parameter: the guess magnitude, floored by the
    # bounds span so a zero guess still gets a meaningful step
    span = upper - lower
    base = np.where(np.isfinite(span) & (span > 0), 1e-3 * span, 1.0)
    scale = np.maximum(np.abs(p), base)
    lam = damping0
    r = residual_fn(p)
    cost = float(r @ r)
    converged = False
    message = "max iterations reached"
    iterations = 0
    jac = None

    for iterations in range(1, max_iterations + 1):
        jac = _numeric_jacobian(residual_fn, p, scale)
        a = jac.T @ jac
        g = jac.T @ r
        accepted = False
        for _ in range(60):
            damped = a + lam * np.diag(np.clip(np.diag(a), 1e-300, None))
            try:
                step = np.linalg.solve(damped, -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            candidate = np.clip(p + step, lower, upper)
            r_new = residual_fn(candidate)
            cost_new = float(r_new @ r_new)
            if cost_new <= cost:
                rel_step = np.linalg.norm(candidate - p) / max(np.linalg.norm(p), 1e-300)
                p, r, cost = candidate, r_new, cost_new
                lam = max(lam / 10.0, 1e-14)
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            cond = float(np.linalg.cond(a)) if np.all(np.isfinite(a)) else np.inf
            message = f"no acceptable step (normal-equation condition {cond:.3g})"
            break
        if rel_step < rel_step_tol:
            converged = True
            message = "relative step below tolerance"
            break

    if jac is None:
        jac = _numeric_jacobian(residual_fn, p, scale)
    dof = max(r.size - p.size, 1)
    try:
        cov = np.linalg.inv(jac.T @ jac) * (cost / dof)
        cov = 0.5 * (cov + cov.T)
    except np.linalg.LinAlgError:
        cov = np.full((p.size, p.size), np.nan)
        message += "; singular normal equations at solution"
    return p, cov, float(np.sqrt(cost)), converged, iterations, message


def _ensemble_model(t_grid, init: Spin1State, analysis: Spin1State,
                    trap_depth: float, temperature: float,
                    trap: TrapConfig):
    from .dephasing import TimeGrid

    grid = TimeGrid(t_grid)

    def evaluate(params: dict[str, float]) -> np.ndarray:
        width = abs(params.get("width_bz", 0.0))
        fraction = min(max(params.get("circular_fraction", 0.0), 0.0), 1.0)
        thermal = None
        if fraction > 0:
            bsigma0 = vector_shift_field(trap, PolarizationSpec(fraction, +1))
            thermal = ThermalShiftDist(trap_depth=trap_depth,
                                       temperature=temperature, bsigma0=bsigma0)
        gaussian = GaussianFieldDist(mean=0.0, width=width) if width > 0 else None
        model = FieldNoiseModel(
            z=AxisNoise(offset=params.get("mean_bz", 0.0), gaussian=gaussian),
            thermal=thermal,
        )
        return quadrature_survival(init, analysis, model, grid).probabilities

    return evaluate


def fit_decay(curve: DecayCurve, model_family: str,
              initial_guess: dict[str, float],
              bounds: dict[str, tuple[float, float]] | None = None,
              *,
              init_state: Spin1State | None = None,
              analysis_state: Spin1State | None = None,
              trap_depth: float = DEFAULT_TRAP_DEPTH,
              temperature: float = DEFAULT_TEMPERATURE,
              trap: TrapConfig = DEFAULT_TRAP,
              max_iterations: int = 200) -> FitResult:
    """Fit a decay-model family to a curve by weighted least squares.

    Free parameters are exactly the keys of ``initial_guess`` (remaining
    family parameters sit at their defaults). Weights are 1/stderr when the
    curve carries nonzero errors, otherwise uniform. Non-convergence is
    reported through the result flag, never raised.
    """
    if model_family not in FAMILIES:
        raise ValueError(f"unknown model family {model_family!r}")
    if len(curve.grid) < 8:
        raise ValueError("curve must have at least 8 points")
    defaults = _DEFAULTS[model_family]
    unknown = set(initial_guess) - set(defaults)
    if unknown:
        raise ValueError(f"parameters {sorted(unknown)} not in family {model_family!r}")
    if not initial_guess:
        raise ValueError("initial_guess must name at least one free parameter")

    names = tuple(sorted(initial_guess))
    fixed = {k: v for k, v in defaults.items() if k not in initial_guess}
    bounds = bounds or {}
    default_bounds = {
        "width_bz": (1e-12, 1e-4), "width_bx": (1e-12, 1e-4),
        "mean_bz": (-1e-4, 1e-4), "circular_fraction": (0.0, 1.0),
        "amplitude": (0.0, 1.0), "offset": (0.0, 1.0),
    }
    lower = np.array([bounds.get(n, default_bounds[n])[0] for n in names])
    upper = np.array([bounds.get(n, default_bounds[n])[1] for n in names])

    times = curve.grid.times
    y = curve.probabilities
    use_weights = np.all(curve.stderr > 0)
    w = 1.0 / curve.stderr if use_weights else np.ones_like(y)

    if model_family == "full-ensemble":
        init = init_state if init_state is not None else named_state("x+")
        analysis = analysis_state if analysis_state is not None else named_state("x+")
        model_eval = _ensemble_model(times, init, analysis, trap_depth,
                                     temperature, trap)

        def model(p_vec):
            params = dict(fixed)
            params.update(zip(names, p_vec))
            return model_eval(params)
    else:
        axis = "z" if model_family == "superposition-analytic" else "x"
        width_key = "width_bz" if axis == "z" else "width_bx"

        def model(p_vec):
            params = dict(fixed)
            params.update(zip(names, p_vec))
            tc = time_constant_from_width(axis, abs(params[width_key]))
            return params["offset"] + params["amplitude"] * np.exp(-((times / tc) ** 2))

    def residual(p_vec):
        return (model(p_vec) - y) * w

    p0 = np.array([initial_guess[n] for n in names], dtype=float)
    p, cov, res_norm, converged, iterations, message = levenberg_fit(
        residual, p0, lower, upper, max_iterations=max_iterations)

    params = dict(fixed)
    params.update(zip(names, p))
    stderr = {n: float(np.sqrt(max(cov[i, i], 0.0))) if np.isfinite(cov[i, i]) else float("nan")
              for i, n in enumerate(names)}
    derived = {}
    if "width_bz" in params and params["width_bz"] > 0:
        derived["t2_star_s"] = time_constant_from_width("z", params["width_bz"])
    if "width_bx" in params and params["width_bx"] > 0:
        derived["t1_like_s"] = time_constant_from_width("x", params["width_bx"])
    return FitResult(
        params={k: float(v) for k, v in params.items()},
        stderr=stderr, covariance=cov, param_names=names,
        residual_norm=res_norm, converged=converged, iterations=iterations,
        family=model_family, message=message, derived=derived,
    )
