"""Execute validated scenarios and collect their results as tables."""

from __future__ import annotations

import platform
from typing import Callable

import numpy as np
import scipy
from scipy.linalg import expm

from .. import __version__
from ..dynamics import (
    PlanarShear,
    classify_2d,
    geodesic_exponential,
    hamiltonian,
    integrate,
    planar_shear_initial,
    planar_shear_state,
)
from ..errors import AffineBodyError, Unconverged
from ..kinematics import PhasePoint
from ..models import legendre
from ..potentials import potential_from_spec
from ..quantum.operators1d import radial_oscillator_levels
from ..quantum.operators3d import interior_axis, reduced_kinetic_3d
from ..quantum.planar import (
    bound_state_count,
    dalembert_polar_solver,
    dalembert_qpm_solver,
    polar_trig_spectrum,
    qpm_total_levels,
)
from .config import ScenarioConfig
from .table import ResultTable


def versions() -> dict:
    return {
        "affinebody": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def _rng(cfg: ScenarioConfig) -> np.random.Generator:
    return np.random.default_rng(cfg.seed)


def random_phase_point(rng: np.random.Generator, model, scale: float = 0.3, momentum: float = 0.5) -> PhasePoint:
    """Configuration ``expm(scale G)`` (always orientation preserving) with Gaussian momenta."""
    n = model.n
    phi = expm(scale * rng.standard_normal((n, n)))
    P = momentum * rng.standard_normal((n, n))
    p = np.zeros(n) if model.kind == "AffineAffine" else momentum * rng.standard_normal(n)
    x = np.zeros(n)
    return PhasePoint(x, phi, p, P)


def initial_point(cfg: ScenarioConfig, model, rng) -> PhasePoint:
    init = cfg.initial or {}
    if "phi" in init:
        n = model.n
        return PhasePoint(
            init.get("x", np.zeros(n)), init["phi"], init.get("p", np.zeros(n)), init.get("P", np.zeros((n, n)))
        )
    if "planar" in init:
        pl = dict(init["planar"])
        return planar_shear_initial(model, float(pl.pop("p_alpha")), float(pl.pop("p_beta")), **pl)
    rnd = init.get("random", {})
    return random_phase_point(rng, model, float(rnd.get("scale", 0.3)), float(rnd.get("momentum", 0.5)))


def _drift(stack, ref):
    scale = max(1.0, float(np.linalg.norm(ref)))
    return np.linalg.norm((stack - ref).reshape(len(stack), -1), axis=1) / scale


# ---------------------------------------------------------------------------
# classical scenarios
# ---------------------------------------------------------------------------

def run_trajectory(cfg: ScenarioConfig) -> ResultTable:
    model = cfg.model.build()
    pot = potential_from_spec(cfg.potential)
    start = initial_point(cfg, model, _rng(cfg))
    nm = cfg.numerics
    traj = integrate(model, pot, start, nm.scheme, nm.dt, nm.steps, record_every=nm.record_every)
    n = model.n
    cols = [("t", "float"), ("qbar", "float")] + [(f"q{a + 1}", "float") for a in range(n)]
    cols += [("energy", "float"), ("spin_norm", "float"), ("vorticity_norm", "float"),
             ("energy_drift", "float"), ("spin_drift", "float"), ("vorticity_drift", "float"),
             ("deviator_drift", "float")]
    table = ResultTable(cols)
    Sigma, _, S, V = traj.spins()
    dev = Sigma - np.trace(Sigma, axis1=1, axis2=2)[:, None, None] / n * np.eye(n)
    q = traj.invariants
    H = traj.energy
    h0 = abs(H[0]) if abs(H[0]) > 1e-300 else 1.0
    dS, dV, dD = _drift(S, S[0]), _drift(V, V[0]), _drift(dev, dev[0])
    for i, t in enumerate(traj.times):
        table.append(
            t, q[i].mean(), *q[i], H[i], np.linalg.norm(S[i]), np.linalg.norm(V[i]),
            abs(H[i] - H[0]) / h0, dS[i], dV[i], dD[i],
        )
    return table


def run_conservation_audit(cfg: ScenarioConfig) -> ResultTable:
    model = cfg.model.build()
    pot = potential_from_spec(cfg.potential)
    rng = _rng(cfg)
    nm = cfg.numerics
    table = ResultTable([
        ("sample", "int"), ("scheme", "str"), ("steps", "int"), ("dt", "float"),
        ("energy_drift", "float"), ("spin_drift", "float"), ("vorticity_drift", "float"),
        ("deviator_drift", "float"),
    ])
    count = nm.samples if cfg.initial is None else 1
    for k in range(count):
        start = initial_point(cfg, model, rng)
        traj = integrate(model, pot, start, nm.scheme, nm.dt, nm.steps, record_every=nm.record_every)
        a = traj.audit
        table.append(k, nm.scheme, nm.steps, nm.dt, a.energy_drift, a.spin_drift, a.vorticity_drift, a.deviator_drift)
    return table


def run_geodesic_compare(cfg: ScenarioConfig) -> ResultTable:
    model = cfg.model.build()
    rng = _rng(cfg)
    nm = cfg.numerics
    steps = max(1, int(round(nm.t_final / nm.dt)))
    table = ResultTable([("sample", "int"), ("t_final", "float"), ("max_error", "float"), ("sigma_hat_drift", "float")])
    n = model.n
    for k in range(nm.samples):
        phi0 = expm(0.3 * rng.standard_normal((n, n)))
        W = 0.5 * rng.standard_normal((n, n))
        _, P0 = legendre(model, phi0, np.zeros(n), phi0 @ W)
        traj = integrate(model, None, PhasePoint.internal(phi0, P0), nm.scheme, nm.dt, steps,
                         record_every=max(1, steps // 50))
        exact = geodesic_exponential(phi0, W, traj.times)
        err = float(np.max(np.abs(exact - traj.phi)))
        SH0 = P0 @ phi0
        drift = 0.0
        for t, ph in zip(traj.times, exact):
            _, Pt = legendre(model, ph, np.zeros(n), ph @ W)
            drift = max(drift, float(np.max(np.abs(Pt @ ph - SH0))))
        table.append(k, traj.times[-1], err, drift)
    return table


def boundedness_cell(model, p_alpha: float, p_beta: float, dt: float, steps: int, escape_x: float,
                     record_every: int = 10, lift: float = 0.5) -> dict:
    """Classify one planar cell and follow its trajectory.

    Cells with a shear well start inside it, ``lift`` of the way from the
    well bottom to the asymptote; the others start at rest at ``x = 1``.
    """
    cls = classify_2d(p_alpha, p_beta)
    start = planar_shear_initial(model, p_alpha, p_beta, lift=lift)
    shear = PlanarShear.for_model(model, p_alpha, p_beta)
    x0, px0 = planar_shear_state(start)
    energy = shear.energy(x0, px0)
    inner, outer = shear.turning_points(energy, x_hint=x0)
    traj = integrate(model, None, start, "ImplicitMidpoint", dt, steps, record_every=record_every,
                     stop=lambda s: abs(planar_shear_state(s)[0]) > escape_x)
    xs = np.array([planar_shear_state(s)[0] for s in traj.states])
    escaped = bool(np.max(np.abs(xs)) > escape_x)
    slack = 1e-6 * max(1.0, abs(energy))
    if cls.value == "Bounded":
        agrees = (not escaped) and np.isfinite(outer) and xs.min() >= inner - 1e-3 and xs.max() <= outer + 1e-3 + slack
    elif cls.value == "Unbounded":
        agrees = escaped
    else:
        agrees = escaped == (p_alpha != 0 or p_beta != 0)
    return {
        "class": cls.value, "energy": energy, "x_inner": inner,
        "x_outer": outer if np.isfinite(outer) else escape_x, "energy_bounded": int(np.isfinite(outer)),
        "x_min": float(xs.min()), "x_max": float(xs.max()), "t_end": float(traj.times[-1]),
        "escaped": int(escaped), "agrees": int(bool(agrees)), "energy_drift": traj.audit.energy_drift,
    }


def run_boundedness(cfg: ScenarioConfig) -> ResultTable:
    model = cfg.model.build()
    nm = cfg.numerics
    values = [float(v) for v in cfg.sweep["p_values"]]
    table = ResultTable([
        ("p_alpha", "float"), ("p_beta", "float"), ("class", "str"), ("energy", "float"),
        ("x_inner", "float"), ("x_outer", "float"), ("energy_bounded", "int"), ("x_min", "float"),
        ("x_max", "float"), ("t_end", "float"), ("escaped", "int"), ("agrees", "int"),
    ])
    for pa in values:
        for pb in values:
            r = boundedness_cell(model, pa, pb, nm.dt, nm.steps, nm.escape_x, nm.record_every, nm.lift)
            table.append(pa, pb, r["class"], r["energy"], r["x_inner"], r["x_outer"], r["energy_bounded"],
                         r["x_min"], r["x_max"], r["t_end"], r["escaped"], r["agrees"])
    return table


# ---------------------------------------------------------------------------
# quantum scenarios
# ---------------------------------------------------------------------------

def _planar_channels(cfg: ScenarioConfig) -> list[tuple[int, int]]:
    if cfg.channels:
        return [(int(m), int(n)) for m, n in cfg.channels]
    m_lo, m_hi = cfg.sweep.get("m", [-3, 3])
    n_lo, n_hi = cfg.sweep.get("n", [-3, 3])
    return [(m, n) for m in range(int(m_lo), int(m_hi) + 1) for n in range(int(n_lo), int(n_hi) + 1)]


def run_spectrum_2d(cfg: ScenarioConfig) -> ResultTable:
    """Bound levels of geodetic shear channels; level -1 rows record the threshold."""
    model = cfg.model.build()
    nm = cfg.numerics
    table = ResultTable([
        ("m", "int"), ("n", "int"), ("level", "int"), ("energy", "float"), ("binding", "float"),
        ("count", "int"), ("N", "int"), ("converged", "int"), ("status", "str"),
    ])
    for m, n in _planar_channels(cfg):
        try:
            res = bound_state_count(model, m, n, hbar=cfg.hbar, N=nm.grid_N, x_max=nm.x_max, rtol=nm.rtol)
        except Unconverged as exc:
            table.append(m, n, -1, 0.0, 0.0, 0, 0, 0, f"Unconverged: {exc}")
            continue
        table.append(m, n, -1, res.threshold, 0.0, res.count, res.N, 1, "threshold")
        for k, E in enumerate(res.energies):
            table.append(m, n, k, E, res.threshold - E, res.count, res.N, 1, "ok")
    return table


def _qpm_parts(cfg: ScenarioConfig):
    pot = cfg.potential
    if pot.get("kind") in (None, "None"):
        return None, None, None
    a, b, c = (float(pot.get(k, 0.0)) for k in ("a", "b", "c"))
    return (lambda Q: a / Q ** 2 + c * Q ** 2), (lambda Q: b / Q ** 2 + c * Q ** 2), (a, b, c)


def _inertia(cfg: ScenarioConfig) -> float:
    return float(cfg.model.build().J[0, 0])


def run_spectrum_qpm(cfg: ScenarioConfig) -> ResultTable:
    nm = cfg.numerics
    I = _inertia(cfg)
    hbar = cfg.hbar
    Vp, Vm, abc = _qpm_parts(cfg)
    table = ResultTable([
        ("m", "int"), ("n", "int"), ("sector", "str"), ("level", "int"), ("energy", "float"),
        ("analytic", "float"), ("rel_error", "float"), ("converged", "int"),
    ])
    for m, n in _planar_channels(cfg):
        sp, sm = dalembert_qpm_solver(m, n, Vp, Vm, I=I, hbar=hbar, Q_max=nm.Q_max, N=nm.grid_N,
                                      k=nm.levels, rtol=nm.rtol)
        exact = {}
        if abc is not None and abc[2] > 0:
            a, b, c = abc
            Om = np.sqrt(2 * c / I)
            nu_p = np.sqrt((m - n) ** 2 / 4 + 2 * I * a / hbar ** 2)
            nu_m = np.sqrt((m + n) ** 2 / 4 + 2 * I * b / hbar ** 2)
            ep = radial_oscillator_levels(nu_p, Om, nm.levels, hbar)
            em = radial_oscillator_levels(nu_m, Om, nm.levels, hbar)
            exact["plus"] = ep
            exact["minus"] = em
            exact["total"] = np.sort((ep[:, None] + em[None, :]).ravel())
        total = qpm_total_levels(sp, sm, nm.levels)
        for name, spec in (("plus", sp), ("minus", sm), ("total", total)):
            for k, E in enumerate(spec.eigenvalues):
                ref = float(exact[name][k]) if name in exact and k < len(exact[name]) else E
                table.append(m, n, name, k, E, ref, abs(E - ref) / max(abs(ref), 1e-300), int(spec.converged[k]))
    return table


def run_spectrum_polar(cfg: ScenarioConfig) -> ResultTable:
    nm = cfg.numerics
    I = _inertia(cfg)
    hbar = cfg.hbar
    table = ResultTable([
        ("m", "int"), ("n", "int"), ("level", "int"), ("k", "int"), ("mu", "int"), ("energy", "float"),
        ("reference", "float"), ("rel_diff", "float"), ("converged", "int"),
    ])
    kw = dict(I=I, hbar=hbar, r_max=nm.r_max, k=nm.levels, rtol=nm.rtol)
    for m, n in _planar_channels(cfg):
        if cfg.potential["kind"] == "QpmFamily":
            a, b, c = (float(cfg.potential.get(key, 0.0)) for key in ("a", "b", "c"))
            spec = dalembert_polar_solver(
                m, n, lambda r: c * r ** 2, lambda p: a / np.cos(p) ** 2 + b / np.sin(p) ** 2, N=nm.grid_N, **kw)
            Vp, Vm, _ = _qpm_parts(cfg)
            sp, sm = dalembert_qpm_solver(m, n, Vp, Vm, I=I, hbar=hbar, Q_max=nm.r_max, N=nm.grid_N,
                                          k=nm.levels, rtol=nm.rtol)
            ref = qpm_total_levels(sp, sm, nm.levels).eigenvalues
        else:
            kappa = float(cfg.potential.get("kappa", 1.0))
            spec = polar_trig_spectrum(m, n, kappa, N=nm.grid_N, **kw)
            ref = polar_trig_spectrum(m, n, kappa, N=2 * nm.grid_N, **kw).eigenvalues
        for lvl, (E, lab) in enumerate(zip(spec.eigenvalues, spec.labels)):
            R = float(ref[lvl]) if lvl < len(ref) else E
            table.append(m, n, lvl, lab["k"], lab["mu"], E, R, abs(E - R) / max(abs(R), 1e-300),
                         int(spec.converged[lvl]))
    return table


def run_operator_3d(cfg: ScenarioConfig) -> ResultTable:
    model = cfg.model.build()
    rng = _rng(cfg)
    lo, hi, N = cfg.numerics.grid3d
    axis = interior_axis(float(lo), float(hi), int(N))
    pot = potential_from_spec(cfg.potential)
    use_Q = model.kind == "DAlembert"

    def V(x1, x2, x3):
        if pot.is_zero:
            return np.zeros_like(x1)
        pts = np.stack([x1, x2, x3], axis=-1)
        if use_Q:
            pts = np.log(pts)
        return np.apply_along_axis(lambda q: pot.value_q(np.sort(q)), -1, pts)

    table = ResultTable([
        ("s", "str"), ("j", "str"), ("n_active", "int"), ("hermiticity_residual", "float"),
        ("E0", "float"), ("E1", "float"), ("E2", "float"),
    ])
    for s, j in cfg.channels:
        op = reduced_kinetic_3d(model, s, j, axis, hbar=cfg.hbar, potential=V)
        F1 = rng.standard_normal(op.shape) + 1j * rng.standard_normal(op.shape)
        F2 = rng.standard_normal(op.shape) + 1j * rng.standard_normal(op.shape)
        res = op.hermiticity_residual(F1, F2)
        E = op.lowest(3)
        table.append(str(op.channel.s), str(op.channel.j), op.n_active, res, *E)
    return table


RUNNERS: dict[str, Callable[[ScenarioConfig], ResultTable]] = {
    "ClassicalTrajectory": run_trajectory,
    "ConservationAudit": run_conservation_audit,
    "GeodesicCompare": run_geodesic_compare,
    "Boundedness2D": run_boundedness,
    "Spectrum2D": run_spectrum_2d,
    "SpectrumQpm": run_spectrum_qpm,
    "SpectrumPolar": run_spectrum_polar,
    "Operator3DCheck": run_operator_3d,
}


def run_scenario(cfg: ScenarioConfig) -> ResultTable:
    """Run a validated scenario; the table carries full provenance.

    Errors raised by the numerical modules propagate to the caller, which
    maps them to exit codes.
    """
    table = RUNNERS[cfg.kind](cfg)
    table.provenance = {
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash,
        "seed": cfg.seed,
        "versions": versions(),
        "column_types": [k for _, k in table.columns],
        "table_hash": table.table_hash(),
    }
    return table


def failure_table(cfg: ScenarioConfig, exc: AffineBodyError) -> ResultTable:
    """Single-row table describing a failed scenario."""
    table = ResultTable([("status", "str"), ("error", "str"), ("message", "str"), ("exit_code", "int")])
    table.append("failed", type(exc).__name__, str(exc), exc.exit_code)
    table.provenance = {
        "kind": cfg.kind,
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash,
        "seed": cfg.seed,
        "versions": versions(),
        "column_types": [k for _, k in table.columns],
        "table_hash": table.table_hash(),
    }
    return table
