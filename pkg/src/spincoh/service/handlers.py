"""Request handlers shared by the HTTP endpoints and the CLI."""

from __future__ import annotations

import numpy as np

from .. import units
from ..constants import CONST, TWO_PI
from ..dephasing import (DecayCurve, ensemble_density, ensemble_survival,
                         quadrature_survival)
from ..fitting import fit_decay
from ..formats import density_to_dict, fit_result_to_dict
from ..noise import maxwell_boltzmann_pdf, pdf_delta_bsigma, pdf_potential, verify_mb_convolution
from ..spin1 import FieldVector, named_state, survival_curve_batch
from ..tomography import (BASES, Spin1Density, expectations_from_records,
                          purity_parameter, reconstruct_density,
                          simulate_measurement)
from ..trap import (peak_intensity, raman_scatter_rate, trap_depth,
                    trap_frequencies, vector_shift_field)
from . import schemas


def run_trap(req: schemas.TrapRequest) -> schemas.TrapSummary:
    trap = req.config.trap_config()
    pol = req.config.polarization_spec()
    omega_r, omega_z = trap_frequencies(trap)
    return schemas.TrapSummary(
        intensity_W_m2=peak_intensity(trap),
        depth_uK=units.joule_to_uk(trap_depth(trap)),
        fr_kHz=omega_r / TWO_PI / 1e3,
        fz_kHz=omega_z / TWO_PI / 1e3,
        zR_um=trap.rayleigh_range * 1e6,
        raman_Hz=raman_scatter_rate(trap),
        bsigma0_mG=units.tesla_to_mg(vector_shift_field(trap, pol)),
    )


def run_dist(req: schemas.DistRequest) -> schemas.DistResponse:
    thermal = req.config.thermal_dist()
    if thermal is None:
        raise ValueError("noise.thermal: section required for distribution tables")
    temperature = thermal.temperature
    kbt = CONST.kB * temperature
    u = np.linspace(0.0, req.u_max_kbt * kbt, req.grid_points)
    # the 1D pdf diverges (integrably) at U = 0; tabulate it half a step in
    p1 = pdf_potential(1, np.maximum(u, 0.5 * (u[1] - u[0])), temperature)
    p3 = pdf_potential(3, u, temperature)
    db_max = 8.0 * thermal.mean if thermal.scale > 0 else 1e-7
    db = np.linspace(0.0, db_max, req.grid_points)
    p_db = pdf_delta_bsigma(db, thermal)
    deviation = verify_mb_convolution(temperature, max(req.grid_points, 256))
    peak = float(maxwell_boltzmann_pdf(2.0 * kbt, temperature))
    return schemas.DistResponse(
        u_J=[float(x) for x in u],
        p1d_per_J=[float(x) for x in p1],
        p3d_per_J=[float(x) for x in p3],
        db_mG=[units.tesla_to_mg(float(x)) for x in db],
        p_db_per_mG=[float(x) / units.MG_PER_TESLA for x in p_db],
        mb_deviation_per_J=float(deviation),
        mb_peak_per_J=peak,
    )


def static_field(config: schemas.ExperimentConfig) -> FieldVector:
    """The single-realization field: axis offsets plus the full trap-bottom
    vector shift when a thermal section is configured."""
    model = config.noise_model()
    bz = model.z.offset
    if model.thermal is not None:
        bz += model.thermal.bsigma0
    return FieldVector(model.x.offset, model.y.offset, bz)


def run_evolve(req: schemas.EvolveRequest) -> schemas.CurvePayload:
    init, analysis = req.config.states()
    grid = req.config.time_grid()
    field = static_field(req.config)
    p = survival_curve_batch(init, analysis, field.as_array()[None, :], grid.times)[0]
    curve = DecayCurve(grid=grid, probabilities=np.clip(p, 0.0, 1.0),
                       stderr=np.zeros(len(grid)),
                       meta={"generator": "evolve",
                             "field_mG": [units.tesla_to_mg(field.bx),
                                          units.tesla_to_mg(field.by),
                                          units.tesla_to_mg(field.bz)]})
    return schemas.curve_payload(curve)


def run_dephase(req: schemas.DephaseRequest) -> schemas.CurvePayload:
    config = req.config
    init, analysis = config.states()
    grid = config.time_grid()
    model = config.noise_model()
    if req.method == "quad":
        curve = quadrature_survival(init, analysis, model, grid)
    else:
        curve = ensemble_survival(init, analysis, model, grid,
                                  config.run.samples, config.run.seed)
    return schemas.curve_payload(curve)


def run_fit(req: schemas.FitRequest) -> schemas.FitResponse:
    curve = schemas.payload_curve(req.curve)
    kwargs = {}
    if req.config is not None:
        thermal = req.config.thermal_dist()
        kwargs["trap"] = req.config.trap_config()
        if thermal is not None:
            kwargs["trap_depth"] = thermal.trap_depth
            kwargs["temperature"] = thermal.temperature
    guess = dict(req.initial_guess)
    if not guess:
        guess = {"mean_bz": 4e-7, "width_bz": 2e-7} if req.family == "full-ensemble" \
            else {"width_bz" if req.family == "superposition-analytic" else "width_bx": 2e-7}
    bounds = {k: tuple(v) for k, v in req.bounds.items()} if req.bounds else None
    result = fit_decay(curve, req.family, guess, bounds,
                       init_state=named_state(req.init_state),
                       analysis_state=named_state(req.analysis_state),
                       max_iterations=req.max_iterations, **kwargs)
    return schemas.FitResponse(**fit_result_to_dict(result))


def run_tomo(req: schemas.TomoRequest) -> schemas.TomoResponse:
    config = req.config
    init, _ = config.states()
    grid = config.time_grid()
    model = config.noise_model()
    rhos = ensemble_density(init, model, grid, config.run.samples, config.run.seed)
    times_us, r_values, q_values, repaired, densities = [], [], [], [], []
    for i, t in enumerate(grid.times):
        rho = Spin1Density(rhos[i] / np.trace(rhos[i]).real)
        records = [simulate_measurement(rho, basis, config.run.shots,
                                        config.run.seed + 1 + i)
                   for basis in BASES]
        recon = reconstruct_density(expectations_from_records(records))
        report = purity_parameter(recon.rho)
        times_us.append(float(t * 1e6))
        r_values.append(report.r)
        q_values.append(report.trace_rho_sq)
        repaired.append(recon.repaired)
        densities.append(density_to_dict(recon.rho.matrix))
    return schemas.TomoResponse(time_us=times_us, r=r_values,
                                trace_rho_sq=q_values, repaired=repaired,
                                densities=densities)
