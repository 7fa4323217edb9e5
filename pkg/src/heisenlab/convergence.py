"""Convergence experiments: empirical orders of the short-time expansions and
the quantum-classical gap, plus the aggregate suite.
"""
from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field

import numpy as np

from .classical import ClassicalHamiltonian, PhasePoint, classical_trajectory, integrate
from .heisenberg import (
    Propagator,
    TrajectoryRecord,
    guard_along,
    ck_compose,
    commutator_expectation_equality,
    ehrenfest_check,
    expectation_trajectory,
    hadamard_terms,
    velocity_operator,
)
from .models import ModelOperators, ModelSpec, build_fock_model, check_truncation, coherent_state, ground_state
from .operators import interior, maxnorm, normalize
from .symbolic import dirac_check, normal_order, quantize, random_pairs, random_polynomial, realization_cut, realize

NUMERICAL_FLOOR = 1e-12

DEFAULT_TOLERANCES = {
    "operator_slope": 0.1,
    "state_slope": 0.15,
    "min_r_squared": 0.999,
    "prefactor_rel": 0.05,
    "trajectory_gap": 1e-8,
    "stationary": 1e-10,
    "ehrenfest_rtol": 1e-8,
    "ehrenfest_atol": 1e-10,
    "composition": 1e-9,
    "equality_rel": 1e-12,
    "realization_rel": 1e-8,
}


def default_dt_grid(dt_max: float = 0.1, points: int = 8, ratio: float = 2.0) -> np.ndarray:
    """Geometric grid dt_max, dt_max/ratio, ... (in units of 1/omega)."""
    return dt_max / ratio ** np.arange(points)


@dataclass(frozen=True)
class OrderFit:
    slope: float | None
    intercept: float | None
    r_squared: float | None
    points_used: int
    floor_discarded: int
    status: str  # "ok" or "inconclusive"
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return asdict(self)


def fit_order(dts, errs, floor: float = NUMERICAL_FLOOR, min_r_squared: float = 0.999) -> OrderFit:
    """Least-squares line through (log dt, log err), ignoring errors below ``floor``."""
    dts = np.asarray(dts, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if dts.shape != errs.shape or dts.ndim != 1:
        raise ValueError(f"dts and errs must be equal-length 1-D sequences, got {dts.shape} and {errs.shape}")
    if dts.size < 3:
        raise ValueError(f"need at least 3 points, got {dts.size}")
    if np.any(dts <= 0) or np.any(np.diff(dts) >= 0):
        raise ValueError("dts must be positive and strictly decreasing")
    keep = errs >= floor
    used = int(keep.sum())
    discarded = dts.size - used
    if used < 3:
        return OrderFit(None, None, None, used, discarded, "inconclusive", "fewer than 3 points above the numerical floor")
    x, y = np.log(dts[keep]), np.log(errs[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    r2 = min(max(r2, 0.0), 1.0)
    if r2 < min_r_squared:
        return OrderFit(float(slope), float(intercept), r2, used, discarded, "inconclusive",
                        f"R^2 = {r2:.6f} below {min_r_squared}")
    return OrderFit(float(slope), float(intercept), r2, used, discarded, "ok")


@dataclass(frozen=True)
class Check:
    name: str
    value: float | None
    criterion: str
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    scenario: str
    model: dict = field(default_factory=dict)
    state: dict = field(default_factory=dict)
    dt_grid: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    trajectory: TrajectoryRecord | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "model": self.model,
            "state": self.state,
            "dt_grid": [float(x) for x in self.dt_grid],
            "errors": {k: [float(x) for x in v] for k, v in self.errors.items()},
            "fits": {k: f.to_dict() for k, f in self.fits.items()},
            "checks": [c.to_dict() for c in self.checks],
            "details": self.details,
        }


def _slope_check(name: str, fit: OrderFit, expected: float, tol: float) -> Check:
    ok = fit.ok and abs(fit.slope - expected) <= tol
    return Check(name, fit.slope, f"slope {expected} +/- {tol} with R^2 fit status ok ({fit.status})", ok)


def _model_dict(model: ModelOperators) -> dict:
    s = model.spec
    out = {"basis": s.basis, "dim": s.dim, "hbar": s.hbar, "mass": s.mass, "omega": s.omega, "lambda": s.lam}
    if s.custom_expr is not None:
        out["custom_expr"] = s.custom_expr
    return out


def _tol(tolerances: dict | None) -> dict:
    out = dict(DEFAULT_TOLERANCES)
    out.update(tolerances or {})
    return out


def operator_order_errors(model: ModelOperators, k_list, dt_grid, xi=None) -> dict[int, np.ndarray]:
    """Interior max-norm of exact conjugation minus the order-k Hadamard sum, per dt."""
    xi = model.q if xi is None else xi
    kmax = max(k_list)
    prop = Propagator(model.h, model.hbar)
    errs = {k: [] for k in k_list}
    for dt in dt_grid:
        exact = prop.conjugate(xi, dt)
        partial = np.zeros_like(exact)
        sums = []
        for term in hadamard_terms(model.h, xi, dt, kmax, model.hbar):
            partial = partial + term
            sums.append(partial)
        for k in k_list:
            errs[k].append(maxnorm(interior(exact - sums[k], model.cut)))
    return {k: np.array(v) for k, v in errs.items()}


def run_operator_order_scan(model: ModelOperators, k_list=(0, 1, 2, 3), dt_grid=None, tolerances=None,
                            scenario: str = "operator_order") -> ExperimentReport:
    tol = _tol(tolerances)
    dt_grid = default_dt_grid() if dt_grid is None else np.asarray(dt_grid, dtype=float)
    errs = operator_order_errors(model, k_list, dt_grid)
    report = ExperimentReport(scenario, model=_model_dict(model), dt_grid=list(dt_grid))
    for k in k_list:
        fit = fit_order(dt_grid, errs[k], min_r_squared=tol["min_r_squared"])
        report.errors[f"k{k}"] = errs[k]
        report.fits[f"k{k}"] = fit
        report.checks.append(_slope_check(f"hadamard order k={k}", fit, k + 1, tol["operator_slope"]))
    return report


def run_quantum_classical_gap(model: ModelOperators, psi0, dt_grid=None, tolerances=None, horizon: float | None = None,
                              trajectory_points: int = 201, scenario: str = "quantum_classical_gap") -> ExperimentReport:
    """One-step gaps between quantum expectations and the classical flow from (<q>, <p>)."""
    tol = _tol(tolerances)
    dt_grid = default_dt_grid() if dt_grid is None else np.asarray(dt_grid, dtype=float)
    spec = model.spec
    hcl = ClassicalHamiltonian.from_spec(spec)
    prop = Propagator(model.h, model.hbar)
    check_truncation(model, psi0)
    guard_along(model, prop, psi0, dt_grid)
    Q0, P0, Q2_0 = prop.expectations(psi0, [model.q, model.p, model.q @ model.q], [0.0])[:, 0]
    Qt, Pt = prop.expectations(psi0, [model.q, model.p], dt_grid)
    start = PhasePoint(float(Q0), float(P0))
    errQ, errP = [], []
    for dt, qq, pp in zip(dt_grid, Qt, Pt):
        # classical substep 1e-3 * dt keeps integrator error far below the measured gap
        x = integrate(hcl, start, float(dt), max_substep=1e-3 * float(dt))
        errQ.append(abs(qq - x.q))
        errP.append(abs(pp - x.p))
    errQ, errP = np.array(errQ), np.array(errP)
    fitQ = fit_order(dt_grid, errQ, min_r_squared=tol["min_r_squared"])
    fitP = fit_order(dt_grid, errP, min_r_squared=tol["min_r_squared"])
    varQ0 = float(Q2_0 - Q0**2)
    report = ExperimentReport(
        scenario, model=_model_dict(model), state={"Q0": float(Q0), "P0": float(P0), "varQ0": varQ0},
        dt_grid=list(dt_grid), errors={"Q": errQ, "P": errP}, fits={"Q": fitQ, "P": fitP},
    )
    if spec.is_quadratic:
        T = (10.0 / model.omega) if horizon is None else horizon
        times = np.linspace(0.0, T, trajectory_points)
        traj = expectation_trajectory(model, psi0, times)
        cl = classical_trajectory(hcl, start, times)
        traj = traj.with_classical(cl.Qcl, cl.Pcl)
        gap = float(max(traj.errQ.max(), traj.errP.max()))
        report.trajectory = traj
        report.details["trajectory_max_gap"] = gap
        report.checks.append(Check("quadratic full-trajectory gap", gap, f"< {tol['trajectory_gap']}",
                                   gap < tol["trajectory_gap"]))
    else:
        report.checks.append(_slope_check("one-step Q gap order", fitQ, 2.0, tol["state_slope"]))
        report.checks.append(_slope_check("one-step P gap order", fitP, 1.0, tol["state_slope"]))
        if spec.custom_expr is None and spec.lam > 0:
            # Gaussian third moment <q^3> = Q^3 + 3 Q var gives the force gap 12 lam Q var
            expected = 12 * spec.lam * abs(float(Q0)) * varQ0
            idx = int(np.nonzero(errP >= NUMERICAL_FLOOR)[0][-1]) if np.any(errP >= NUMERICAL_FLOOR) else -1
            measured = float(errP[idx] / dt_grid[idx])
            rel = abs(measured - expected) / expected if expected > 0 else math.inf
            report.details.update(prefactor_P=measured, prefactor_P_expected=expected)
            report.checks.append(Check("P gap prefactor 12 lam |Q0| var(q)", rel,
                                       f"relative deviation < {tol['prefactor_rel']}", rel < tol["prefactor_rel"]))
    return report


def run_derivative_quotient_scan(model: ModelOperators, psi0, dt_grid=None, tolerances=None,
                                 scenario: str = "derivative_quotient") -> ExperimentReport:
    """Forward quotient of Q, P against the instantaneous <(i/hbar)[H, .]>."""
    tol = _tol(tolerances)
    dt_grid = default_dt_grid() if dt_grid is None else np.asarray(dt_grid, dtype=float)
    check_truncation(model, psi0)
    prop = Propagator(model.h, model.hbar)
    guard_along(model, prop, psi0, dt_grid)
    vq = np.vdot(psi0, velocity_operator(model, model.q) @ psi0).real
    vp = np.vdot(psi0, velocity_operator(model, model.p) @ psi0).real
    times = np.concatenate([[0.0], dt_grid])
    Qs, Ps = prop.expectations(psi0, [model.q, model.p], times)
    errQ = np.abs((Qs[1:] - Qs[0]) / dt_grid - vq)
    errP = np.abs((Ps[1:] - Ps[0]) / dt_grid - vp)
    fitQ = fit_order(dt_grid, errQ, min_r_squared=tol["min_r_squared"])
    fitP = fit_order(dt_grid, errP, min_r_squared=tol["min_r_squared"])
    report = ExperimentReport(scenario, model=_model_dict(model), dt_grid=list(dt_grid),
                              errors={"Q": errQ, "P": errP}, fits={"Q": fitQ, "P": fitP},
                              details={"qdot": float(vq), "pdot": float(vp)})
    worst = float(max(errQ.max(), errP.max()))
    if fitQ.ok or worst >= tol["stationary"]:
        report.checks.append(_slope_check("Q quotient remainder order", fitQ, 1.0, tol["state_slope"]))
    else:
        report.checks.append(Check("stationary quotient errors", worst, f"< {tol['stationary']}",
                                   worst < tol["stationary"]))
    return report


def run_ehrenfest(model: ModelOperators, psi0, t_grid, tolerances=None, scenario: str = "ehrenfest") -> ExperimentReport:
    tol = _tol(tolerances)
    res = ehrenfest_check(model, psi0, t_grid)
    bound = tol["ehrenfest_rtol"] * np.abs(res.velocity) + tol["ehrenfest_atol"]
    worst = float(np.max(res.residual_q / bound))
    report = ExperimentReport(scenario, model=_model_dict(model),
                              errors={"dQdt_minus_P_over_m": res.residual_q, "dPdt_minus_force": res.residual_p},
                              details={"max_residual_q": float(res.residual_q.max()),
                                       "max_residual_p": float(res.residual_p.max())})
    report.checks.append(Check("|dQ/dt - P/m| / (rtol |P/m| + atol)", worst, "< 1", worst < 1))
    return report


def run_composition(model: ModelOperators, dt: float = 0.01, n: int = 100, tolerances=None,
                    scenario: str = "chapman_kolmogorov") -> ExperimentReport:
    tol = _tol(tolerances)
    rep = ck_compose(model.h, dt / model.omega, n, model.hbar)
    report = ExperimentReport(scenario, model=_model_dict(model), details=rep.to_dict())
    report.checks.append(Check("max|U(dt)^n - U(n dt)|", rep.difference, f"< {tol['composition']}",
                               rep.difference < tol["composition"]))
    return report


def random_model_states(count: int, seed: int, dim: int = 32):
    """Seeded (model, state) pairs: random quartic coupling with coherent or random low-lying states."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        lam = float(rng.uniform(0.0, 0.2))
        spec = ModelSpec(dim=dim, lam=lam, hbar=float(rng.uniform(0.5, 1.5)), mass=float(rng.uniform(0.5, 2.0)),
                         omega=float(rng.uniform(0.5, 2.0)))
        model = build_fock_model(spec)
        if i % 2 == 0:
            alpha = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            psi = coherent_state(spec, alpha)
        else:
            v = np.zeros(dim, dtype=complex)
            v[: dim // 2] = rng.normal(size=dim // 2) + 1j * rng.normal(size=dim // 2)
            psi = normalize(v)
        out.append((model, psi))
    return out


def run_equality_checks(count: int = 20, seed: int = 42, tolerances=None,
                        scenario: str = "commutator_expectation_equality") -> ExperimentReport:
    tol = _tol(tolerances)
    diffs, scales = [], []
    for model, psi in random_model_states(count, seed):
        rep = commutator_expectation_equality(model, psi)
        diffs.append(rep.difference)
        scales.append(rep.scale)
    ratio = float(max(d / s for d, s in zip(diffs, scales)))
    report = ExperimentReport(scenario, errors={"difference": diffs, "scale": scales}, details={"cases": count})
    report.checks.append(Check("max difference / scale", ratio, f"< {tol['equality_rel']}", ratio < tol["equality_rel"]))
    return report


def realization_residual(u, v, hbar: float, dim: int = 48) -> float:
    """Relative interior residual between symbolic and matrix forms of [u, v] and its Dirac discrepancy."""
    model = build_fock_model(ModelSpec(dim=dim, hbar=hbar))
    rep = dirac_check(u, v)
    U, V = realize(u, model), realize(v, model)
    comm = U @ V - V @ U
    cut = realization_cut(u * v)
    scale = max(1.0, maxnorm(interior(comm, cut)))
    pb = realize(quantize(rep.poisson), model)
    r1 = maxnorm(interior(realize(rep.commutator, model) - comm, cut))
    r2 = maxnorm(interior(realize(rep.discrepancy, model) - (comm - 1j * hbar * pb), cut))
    return max(r1, r2) / scale


def run_symbolic_suite(count: int = 200, n_realized: int = 20, seed: int = 42, dim: int = 48, tolerances=None,
                       scenario: str = "symbolic_dirac") -> ExperimentReport:
    tol = _tol(tolerances)
    pairs = random_pairs(count, seed)
    powers = []
    failures = 0
    for u, v in pairs:
        rep = dirac_check(u, v)
        powers.append(rep.min_hbar_power if rep.min_hbar_power is not None else -1)
        failures += not rep.passes
    residuals = [realization_residual(u, v, hb, dim) for u, v in pairs[:n_realized] for hb in (1.0, 0.5)]
    # rewrite soundness on single polynomials
    rng = random.Random(seed + 1)
    model_by_hbar = {hb: build_fock_model(ModelSpec(dim=dim, hbar=hb)) for hb in (1.0, 0.5)}
    sound = []
    for _ in range(count):
        u = random_polynomial(rng)
        cut = realization_cut(u)
        for hb, model in model_by_hbar.items():
            a, b = realize(normal_order(u), model), realize(u, model)
            sound.append(maxnorm(interior(a - b, cut)) / max(1.0, maxnorm(interior(b, cut))))
    worst_real = float(max(residuals))
    worst_sound = float(max(sound))
    report = ExperimentReport(scenario, errors={"min_hbar_power": powers, "realization_residual": residuals},
                              details={"pairs": count, "realized_pairs": n_realized, "hbar_values": [1.0, 0.5],
                                       "rewrite_soundness_max": worst_sound})
    report.checks.append(Check("pairs with min hbar power < 2", float(failures), "== 0", failures == 0))
    report.checks.append(Check("matrix realization residual", worst_real, f"< {tol['realization_rel']}",
                               worst_real < tol["realization_rel"]))
    report.checks.append(Check("rewrite soundness residual", worst_sound, f"< {tol['realization_rel']}",
                               worst_sound < tol["realization_rel"]))
    return report


@dataclass(frozen=True)
class SuiteConfig:
    """Suite parameters. Dimensions are per role:

    ``harmonic_dim`` state-level harmonic runs; ``quartic_dim`` one-step quartic
    runs (dt <= 1e-1/omega); ``stress_dim`` the long quartic Ehrenfest
    trajectory; ``order_dim`` operator-order scans; ``composition_dim`` the
    propagator composition check.
    """

    harmonic_dim: int = 64
    quartic_dim: int = 96
    stress_dim: int = 256
    order_dim: int = 8
    composition_dim: int = 32
    hbar: float = 1.0
    mass: float = 1.0
    omega: float = 1.0
    lam: float = 0.1
    alpha: complex = 1.0
    dt_grid: tuple = tuple(default_dt_grid())
    k_list: tuple = (0, 1, 2, 3)
    horizon: float = 10.0
    seed: int = 42
    n_random: int = 200
    n_realized: int = 20
    realize_dim: int = 48
    n_equality: int = 20
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.dt_grid) == 0:
            raise ValueError("dt grid is empty")
        if len(self.dt_grid) < 3:
            raise ValueError(f"dt grid needs at least 3 points, got {len(self.dt_grid)}")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")


def run_full_suite(config: SuiteConfig) -> list[ExperimentReport]:
    """Every scenario on the harmonic and quartic models plus the symbolic property suites.

    Models and states are built (and truncation-guarded) before any experiment runs.
    """
    tol = _tol(config.tolerances)
    dts = np.asarray(config.dt_grid, dtype=float) / config.omega
    lams = {"harmonic": 0.0, "quartic": config.lam}

    def model(name, dim):
        return build_fock_model(ModelSpec(dim=dim, lam=lams[name], hbar=config.hbar, mass=config.mass,
                                          omega=config.omega))

    models = {"harmonic": model("harmonic", config.harmonic_dim), "quartic": model("quartic", config.quartic_dim)}
    order_models = {name: model(name, config.order_dim) for name in lams}
    ehrenfest_models = {"harmonic": models["harmonic"], "quartic": model("quartic", config.stress_dim)}
    states = {name: coherent_state(m.spec, config.alpha) for name, m in models.items()}
    ehrenfest_states = {name: coherent_state(m.spec, config.alpha) for name, m in ehrenfest_models.items()}
    grounds = {name: ground_state(m) for name, m in models.items()}
    for name in lams:
        check_truncation(models[name], grounds[name])
    composition_model = model("harmonic", config.composition_dim)
    t_grid = np.linspace(0.0, config.horizon / config.omega, 101)

    reports = []
    for name in lams:
        reports.append(run_operator_order_scan(order_models[name], config.k_list, dts, tol,
                                               scenario=f"operator_order/{name}"))
        reports.append(run_derivative_quotient_scan(models[name], states[name], dts, tol,
                                                    scenario=f"derivative_quotient/{name}"))
        reports.append(run_derivative_quotient_scan(models[name], grounds[name], dts, tol,
                                                    scenario=f"derivative_quotient/{name}/stationary"))
        reports.append(run_quantum_classical_gap(models[name], states[name], dts, tol,
                                                 horizon=config.horizon / config.omega,
                                                 scenario=f"quantum_classical_gap/{name}"))
        reports.append(run_ehrenfest(ehrenfest_models[name], ehrenfest_states[name], t_grid, tol,
                                     scenario=f"ehrenfest/{name}"))
    reports.append(run_composition(composition_model, tolerances=tol, scenario="chapman_kolmogorov/harmonic"))
    reports.append(run_equality_checks(config.n_equality, config.seed, tol))
    reports.append(run_symbolic_suite(config.n_random, config.n_realized, config.seed, config.realize_dim, tol))
    return sorted(reports, key=lambda r: r.scenario)
