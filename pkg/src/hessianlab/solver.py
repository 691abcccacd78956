"""Newton/continuation solver for the degree-m complex Hessian equation.

The stage-t equation on the torus reads, in log-residual form,

    log S_m(lam(X)) - log C(n, m) - m (f + b) = 0,
    X = chi + chi_tilde + t * omega + (complex Hessian of phi),

with the compatibility constant b solved jointly with a mean-zero update of
phi.  Each Newton step linearizes the log of the operator, solves the
bordered linear system with a Krylov method preconditioned by the exact
inverse of a constant-coefficient model operator (spectral solve), and
guards the positivity-cone margin with a damped line search.  The degenerate
problem is approached along a decreasing schedule of t with warm starts;
the weak-solution certificate is the decreasing sequence phi_t + C / 2^i.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dataclass_field

import numpy as np
import scipy.sparse.linalg as spla

from .background import BackgroundData
from .errors import ConeViolationError, ConfigError, NonConvergenceError
from .grid import (
    HermitianField,
    ScalarField,
    complex_hessian,
    fd_laplacian_symbol,
    integrate,
    mollify,
)
from .symfunc import binom, elem_sym_table, restricted_esp

DAMPING_FLOOR = 2.0 ** -20


@dataclass
class SolverConfig:
    """Knobs of one Newton solve."""

    m: int
    t: float = 1.0
    newton_tol: float = 1e-9
    max_newton: int = 60
    cone_margin: float = 1e-8
    damping: float = 1.0
    krylov_rtol: float = 1e-2
    krylov_maxiter: int = 20

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError("degree m must be >= 1")
        if not 0.0 < self.t <= 1.0:
            raise ConfigError("t must lie in (0, 1]")
        for name in ("newton_tol", "cone_margin", "damping", "krylov_rtol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


@dataclass
class SolverState:
    """One admissible iterate: potential, constant, and diagnostics."""

    phi: ScalarField
    b: float
    residual_sup: float
    cone_margin_min: float
    newton_iters: int


@dataclass
class ContinuationSchedule:
    """Decreasing regularization parameters with optional smoothing widths."""

    t_values: list
    mollification_sigmas: list | None = None

    def __post_init__(self):
        ts = list(self.t_values)
        if not ts:
            raise ConfigError("schedule must be nonempty")
        if any(t <= 0 for t in ts):
            raise ConfigError("schedule values must be positive")
        if any(b >= a for a, b in zip(ts, ts[1:])):
            raise ConfigError("schedule must be strictly decreasing")
        if self.mollification_sigmas is not None:
            if len(self.mollification_sigmas) != len(ts):
                raise ConfigError("mollification_sigmas length must match t_values")

    @classmethod
    def default(cls, num_stages: int = 12, ratio: float = 0.5,
                t_start: float = 1.0) -> "ContinuationSchedule":
        return cls([t_start * ratio**i for i in range(num_stages)])


@dataclass
class StageRecord:
    t: float
    b: float
    residual_history: list
    sup_phi: float
    inf_phi: float
    margin_min: float
    iters: int
    seconds: float
    bracket_lower: float | None = None
    bracket_mid: float | None = None
    bracket_upper: float | None = None
    mollify_sigma: float = 0.0

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "b": self.b,
            "residual_history": list(self.residual_history),
            "sup_phi": self.sup_phi,
            "inf_phi": self.inf_phi,
            "margin_min": self.margin_min,
            "iters": self.iters,
            "seconds": self.seconds,
            "bracket_lower": self.bracket_lower,
            "bracket_mid": self.bracket_mid,
            "bracket_upper": self.bracket_upper,
            "mollify_sigma": self.mollify_sigma,
        }


@dataclass
class SolveReport:
    stages: list = dataclass_field(default_factory=list)
    meta: dict = dataclass_field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"stages": [s.to_dict() for s in self.stages], "meta": dict(self.meta)}


# ---------------------------------------------------------------------------
# integral bookkeeping


def wedge_integral(bg: BackgroundData, form: HermitianField, k: int) -> float:
    """Integral of form^k wedge omega^(n-k) over the torus.

    Uses the eigenvalue identity: the integrand equals
    S_k(lam(form)) / C(n, k) times the volume density of omega.
    """
    from .grid import eigen_field

    lam = eigen_field(form, bg.omega)
    sk = elem_sym_table(lam)[..., k] / binom(bg.grid.n, k)
    return integrate(ScalarField(bg.grid, sk), bg.volume())


def compatibility_constant(bg: BackgroundData, t: float, f: ScalarField, m: int) -> float:
    """The constant b making the stage-t equation integrally consistent.

    exp(m b) equals the mass of S_m(lam(chi + chi_tilde + t omega)) divided
    by the mass of C(n, m) exp(m f), both against the omega volume.
    """
    num = binom(bg.grid.n, m) * wedge_integral(bg, bg.base_form(t), m)
    vol = bg.volume()
    den = binom(bg.grid.n, m) * integrate(
        ScalarField(bg.grid, np.exp(m * f.data)), vol
    )
    if num <= 0 or den <= 0:
        raise ConfigError(
            f"compatibility integrals must be positive (got {num:.3e}, {den:.3e})"
        )
    return float(np.log(num / den) / m)


def normalize_density(bg: BackgroundData, f: ScalarField, m: int):
    """Shift f by the constant enforcing the degenerate-limit mass identity.

    After the shift the mass of exp(m f) equals the mass of
    (chi + chi_tilde)^m wedge omega^(n-m), so the stage constants b_t tend
    to zero as t decreases.  Returns ``(shifted_f, shift)``.
    """
    shift = compatibility_constant(bg, 0.0, f, m)
    return ScalarField(f.grid, f.data + shift), float(shift)


def degenerate_brackets(bg: BackgroundData, t: float, f: ScalarField, m: int):
    """Two-sided bound data for V_t / exp(n b_t) at one stage.

    Returns ``(lower, mid, upper)`` where mid = V_t / exp(n b_t) with
    V_t the total mass of (chi_tilde + t omega)^n and b_t the stage
    compatibility constant; lower and upper are the bracketing integrals
    built from chi_tilde^n, (chi + chi_tilde + omega)^m wedge omega^(n-m),
    (chi + chi_tilde)^m wedge omega^(n-m) and the omega volume.
    """
    n = bg.grid.n
    v_t = wedge_integral(
        bg, HermitianField(bg.grid, bg.chi_tilde.data + t * bg.omega.data), n
    )
    b_t = compatibility_constant(bg, t, f, m)
    mid = v_t / np.exp(n * b_t)
    lower = wedge_integral(bg, bg.chi_tilde, n) / wedge_integral(
        bg, bg.base_form(1.0), m
    ) ** (n / m)
    vol_total = integrate(bg.volume())
    upper = wedge_integral(bg, bg.base_form(0.0), m) ** (n / m) / vol_total ** (
        (n - m) / m
    )
    return float(lower), float(mid), float(upper)


# ---------------------------------------------------------------------------
# Newton machinery


class _NewtonDriver:
    """Workspace holding the fixed data of one (bg, t, f, config) problem."""

    def __init__(self, bg: BackgroundData, t: float, f: ScalarField,
                 config: SolverConfig):
        grid = bg.grid
        self.bg = bg
        self.grid = grid
        self.t = float(t)
        self.f = f
        self.config = config
        self.m = config.m
        self.n = grid.n
        self.binom = binom(grid.n, config.m)
        self.base = bg.base_form(self.t).data
        w, V = np.linalg.eigh(bg.omega.data)
        self.gis = np.einsum("...ik,...k,...jk->...ij", V, 1.0 / np.sqrt(w), np.conj(V))
        sym = fd_laplacian_symbol(grid)
        with np.errstate(divide="ignore"):
            inv = np.where(sym != 0.0, 1.0 / np.where(sym != 0.0, sym, 1.0), 0.0)
        self.inv_symbol = inv
        self.num_points = grid.num_points

    # -- pointwise analysis ------------------------------------------------

    def assemble_x(self, phi_data: np.ndarray) -> np.ndarray:
        hess = complex_hessian(ScalarField(self.grid, phi_data))
        return self.base + hess.data

    def eigen(self, x_data: np.ndarray):
        mat = self.gis @ x_data @ self.gis
        mat = 0.5 * (mat + np.conj(np.swapaxes(mat, -1, -2)))
        w, U = np.linalg.eigh(mat)
        return w[..., ::-1].real, U[..., ::-1]

    def margins(self, lam: np.ndarray) -> np.ndarray:
        e = elem_sym_table(lam)
        scale = np.array([binom(self.n, k) for k in range(1, self.m + 1)])
        return np.min(e[..., 1 : self.m + 1] / scale, axis=-1)

    def analyze(self, phi_data: np.ndarray, b: float, require_margin: float = 0.0):
        """Eigen data, residual and linearization coefficients at an iterate."""
        x = self.assemble_x(phi_data)
        lam, U = self.eigen(x)
        margins = self.margins(lam)
        worst = float(margins.min())
        if not worst > require_margin:
            idx = np.unravel_index(int(np.argmin(margins)), self.grid.shape)
            raise ConeViolationError(
                f"cone margin {worst:.3e} at grid point {idx} "
                f"(required > {require_margin:.1e})",
                point=idx, margin=worst,
            )
        sm = elem_sym_table(lam)[..., self.m]
        resid = np.log(sm) - np.log(self.binom) - self.m * (self.f.data + b)
        grads = restricted_esp(lam, self.m - 1)
        nabla = np.einsum("...ik,...k,...jk->...ij", U, grads, np.conj(U))
        a_over_s = self.gis @ nabla @ self.gis / sm[..., None, None]
        return {
            "x": x, "lam": lam, "sm": sm, "margins": margins, "worst": worst,
            "residual": resid, "a_over_s": a_over_s,
        }

    # -- linear solve --------------------------------------------------------

    def linear_apply(self, a_over_s: np.ndarray, v_data: np.ndarray) -> np.ndarray:
        hess = complex_hessian(ScalarField(self.grid, v_data))
        return np.einsum("...ij,...ji->...", a_over_s, hess.data).real

    def solve_linear(self, a_over_s: np.ndarray, rhs_field: np.ndarray,
                     rtol: float):
        """Bordered Krylov solve for (delta phi, delta b) with mean(delta phi)=0."""
        P = self.num_points
        m = self.m
        shape = self.grid.shape

        def matvec(v):
            phi_v = v[:P].reshape(shape)
            beta = v[P]
            out = np.empty(P + 1)
            out[:P] = (self.linear_apply(a_over_s, phi_v) - m * beta).ravel()
            out[P] = phi_v.mean()
            return out

        coeff = float(np.einsum("...ii->...", a_over_s).real.mean()) / self.n
        scale = max(coeff, 1e-30) / 4.0

        def precondition(v):
            r = v[:P].reshape(shape)
            rho = v[P]
            r_mean = r.mean()
            centered = r - r_mean
            lap_inv = np.fft.ifftn(np.fft.fftn(centered) * self.inv_symbol).real
            out = np.empty(P + 1)
            out[:P] = (lap_inv / scale + rho).ravel()
            out[P] = -r_mean / m
            return out

        op = spla.LinearOperator((P + 1, P + 1), matvec=matvec, dtype=float)
        mop = spla.LinearOperator((P + 1, P + 1), matvec=precondition, dtype=float)
        rhs = np.concatenate([rhs_field.ravel(), [0.0]])
        if not np.any(rhs):
            return np.zeros(self.grid.shape), 0.0
        sol, _ = spla.lgmres(op, rhs, M=mop, rtol=rtol, atol=0.0,
                             maxiter=self.config.krylov_maxiter)
        dphi = sol[:P].reshape(shape)
        dphi = dphi - dphi.mean()
        return dphi, float(sol[P])

    # -- one Newton step -----------------------------------------------------

    def step(self, phi_data: np.ndarray, b: float, analysis=None):
        """Damped cone-safeguarded Newton update; returns the new iterate."""
        cfg = self.config
        if analysis is None:
            analysis = self.analyze(phi_data, b)
        resid = analysis["residual"]
        resid_sup = float(np.abs(resid).max())
        rtol = min(cfg.krylov_rtol, max(resid_sup, 1e-14))
        dphi, db = self.solve_linear(analysis["a_over_s"], -resid, rtol)
        hess_step = complex_hessian(ScalarField(self.grid, dphi)).data

        step_size = cfg.damping
        x_now = analysis["x"]
        while True:
            x_trial = x_now + step_size * hess_step
            lam_trial, _ = self.eigen(x_trial)
            worst = float(self.margins(lam_trial).min())
            if worst >= cfg.cone_margin:
                break
            step_size *= 0.5
            if step_size < DAMPING_FLOOR:
                raise NonConvergenceError(
                    "cone-safeguard line search hit the damping floor",
                    diagnostics={
                        "residual_sup": resid_sup,
                        "worst_margin": worst,
                        "step_size": step_size,
                    },
                )
        phi_new = phi_data + step_size * dphi
        phi_new = phi_new - phi_new.max()
        b_trial = b + step_size * db
        post = self.analyze(phi_new, b_trial)
        shift = float(post["residual"].mean()) / self.m
        b_new = b_trial + shift
        post["residual"] = post["residual"] - post["residual"].mean()
        info = {
            "step_size": step_size,
            "dphi_sup": float(np.abs(dphi).max()) * step_size,
            "db": (b_new - b),
        }
        return phi_new, b_new, post, info


def assemble_state(driver: _NewtonDriver, phi_data: np.ndarray, b: float,
                   iters: int, analysis=None) -> SolverState:
    if analysis is None:
        analysis = driver.analyze(phi_data, b)
    return SolverState(
        phi=ScalarField(driver.grid, phi_data),
        b=float(b),
        residual_sup=float(np.abs(analysis["residual"]).max()),
        cone_margin_min=analysis["worst"],
        newton_iters=iters,
    )


# ---------------------------------------------------------------------------
# public operations


def normalize_sup(phi: ScalarField) -> ScalarField:
    """Subtract the grid maximum so the field tops out at exactly zero."""
    return ScalarField(phi.grid, phi.data - phi.data.max())


def residual(phi: ScalarField, b: float, bg: BackgroundData, t: float,
             f: ScalarField, m: int) -> ScalarField:
    """Pointwise log-residual log S_m(lam(X)) - log C(n, m) - m (f + b)."""
    cfg = SolverConfig(m=m, t=min(max(t, 1e-12), 1.0))
    driver = _NewtonDriver(bg, t, f, cfg)
    analysis = driver.analyze(phi.data, b)
    return ScalarField(phi.grid, analysis["residual"])


def residual_linearization(phi: ScalarField, b: float, bg: BackgroundData,
                           t: float, f: ScalarField, m: int,
                           direction: ScalarField) -> ScalarField:
    """Directional derivative of the log-residual in a potential direction."""
    cfg = SolverConfig(m=m, t=min(max(t, 1e-12), 1.0))
    driver = _NewtonDriver(bg, t, f, cfg)
    analysis = driver.analyze(phi.data, b)
    return ScalarField(
        phi.grid, driver.linear_apply(analysis["a_over_s"], direction.data)
    )


def newton_step(state: SolverState, bg: BackgroundData, t: float,
                f: ScalarField, config: SolverConfig) -> SolverState:
    """Advance one damped Newton step from an admissible state."""
    driver = _NewtonDriver(bg, t, f, config)
    phi_new, b_new, post, _ = driver.step(state.phi.data, state.b)
    return assemble_state(driver, phi_new, b_new, state.newton_iters + 1, post)


def solve_nondegenerate(bg: BackgroundData, t: float, f: ScalarField,
                        config: SolverConfig, warm_start: ScalarField | None = None,
                        b0: float | None = None):
    """Newton iteration to the stage-t solution; returns (state, report).

    Starts from zero (or a warm start), keeps every accepted iterate inside
    the cone with margin >= config.cone_margin, and stops when the sup-norm
    of the log-residual drops below config.newton_tol.
    """
    t0 = time.perf_counter()
    driver = _NewtonDriver(bg, t, f, config)
    phi = np.zeros(bg.grid.shape) if warm_start is None else warm_start.data.copy()
    phi = phi - phi.max()
    b = compatibility_constant(bg, t, f, config.m) if b0 is None else float(b0)

    try:
        analysis = driver.analyze(phi, b)
    except ConeViolationError as err:
        raise ConeViolationError(
            f"cone violation at initialization: {err}", point=err.point,
            margin=err.margin,
        ) from err
    shift = float(analysis["residual"].mean()) / config.m
    b += shift
    analysis["residual"] = analysis["residual"] - analysis["residual"].mean()

    history = [float(np.abs(analysis["residual"]).max())]
    iters = 0
    while history[-1] >= config.newton_tol:
        if iters >= config.max_newton:
            raise NonConvergenceError(
                f"no convergence in {config.max_newton} Newton steps "
                f"(residual {history[-1]:.3e})",
                diagnostics={"residual_history": history},
            )
        phi, b, analysis, _ = driver.step(phi, b, analysis)
        iters += 1
        history.append(float(np.abs(analysis["residual"]).max()))

    state = assemble_state(driver, phi, b, iters, analysis)
    record = StageRecord(
        t=float(t), b=state.b, residual_history=history,
        sup_phi=float(state.phi.data.max()), inf_phi=float(state.phi.data.min()),
        margin_min=state.cone_margin_min, iters=iters,
        seconds=time.perf_counter() - t0,
    )
    return state, SolveReport(stages=[record])


def continuation_degenerate(bg: BackgroundData, f: ScalarField,
                            schedule: ContinuationSchedule, config: SolverConfig):
    """Solve the decreasing-t family with warm starts; returns (states, report).

    The density is shifted once so its mass matches the degenerate-limit
    compatibility identity; per stage the report records the constant b_t,
    the residual history, the sup/inf of phi_t, the cone margin, and the
    two-sided bracket on V_t / exp(n b_t).  The report also carries the
    t-uniformity proxy max_t ||phi_t||_inf <= 3 median_t ||phi_t||_inf and
    the consecutive sup-differences used by the decreasing-sequence
    certificate.
    """
    bg.validate(config.m)
    f_norm, shift = normalize_density(bg, f, config.m)
    report = SolveReport(meta={"mass_shift": shift})
    states = []
    warm = None
    for i, t in enumerate(schedule.t_values):
        sigma = 0.0
        f_stage = f_norm
        if schedule.mollification_sigmas is not None:
            sigma = float(schedule.mollification_sigmas[i])
            if sigma > 0.0:
                density = ScalarField(f_norm.grid, np.exp(config.m * f_norm.data))
                smooth = mollify(density, sigma)
                f_stage = ScalarField(f_norm.grid, np.log(smooth.data) / config.m)
        t_start = time.perf_counter()
        try:
            state, stage_rep = solve_nondegenerate(bg, t, f_stage, config,
                                                   warm_start=warm)
        except NonConvergenceError as err:
            report.meta["aborted_stage"] = i
            report.meta["abort_reason"] = str(err)
            raise NonConvergenceError(
                f"continuation stage {i} (t={t:.3e}) failed: {err}",
                diagnostics={"partial_report": report, "states": states},
            ) from err
        record = stage_rep.stages[0]
        record.seconds = time.perf_counter() - t_start
        record.mollify_sigma = sigma
        lower, mid, upper = degenerate_brackets(bg, t, f_stage, config.m)
        record.bracket_lower, record.bracket_mid, record.bracket_upper = lower, mid, upper
        report.stages.append(record)
        states.append(state)
        warm = state.phi

    sups = [float(np.abs(s.phi.data).max()) for s in states]
    med = float(np.median(sups))
    report.meta["sup_norms"] = sups
    report.meta["uniformity_pass"] = bool(max(sups) <= 3.0 * med + 1e-12)
    report.meta["consecutive_sup_diffs"] = [
        float(np.max(states[i + 1].phi.data - states[i].phi.data))
        for i in range(len(states) - 1)
    ]
    report.meta["b_values"] = [s.b for s in states]
    return states, report


@dataclass
class DecreasingSequenceResult:
    fields: list
    cap_constant: float
    caps: list
    adjusted: bool
    adjustment: float
    violation: float = 0.0


def decreasing_sequence(states: list, caps: list | None = None) -> DecreasingSequenceResult:
    """Build the certificate sequence psi_i = phi_{t_i} + caps_i.

    Default caps are C / 2^i with C seeded from the measured consecutive
    oscillations.  If the pointwise ordering psi_{i+1} <= psi_i fails
    anywhere, C is enlarged once to the minimal admissible constant
    max_i 2^(i+1) sup(phi_{i+1} - phi_i) and the adjustment is reported.
    """
    phis = [s.phi for s in states]
    diffs = [
        float(np.max(phis[i + 1].data - phis[i].data)) for i in range(len(phis) - 1)
    ]
    explicit_caps = caps is not None

    def build(cap_c):
        return [cap_c / 2.0**i for i in range(len(phis))]

    if explicit_caps:
        cap_list = [float(c) for c in caps]
        if len(cap_list) != len(phis):
            raise ConfigError("caps length must match the number of states")
        if any(c <= 0 for c in cap_list):
            raise ConfigError("caps must be positive")
        cap_c = cap_list[0]
    else:
        cap_c = max(2.0 * max(diffs, default=0.0), 1e-12)
        cap_list = build(cap_c)

    def violation(cap_list):
        worst = 0.0
        for i in range(len(phis) - 1):
            gap = np.max(
                (phis[i + 1].data + cap_list[i + 1]) - (phis[i].data + cap_list[i])
            )
            worst = max(worst, float(gap))
        return worst

    worst = violation(cap_list)
    adjusted = False
    adjustment = 0.0
    if worst > 0.0 and not explicit_caps:
        needed = max(
            (2.0 ** (i + 1)) * max(d, 0.0) for i, d in enumerate(diffs)
        ) if diffs else cap_c
        adjustment = needed - cap_c
        cap_c = needed
        cap_list = build(cap_c)
        adjusted = True
        worst = violation(cap_list)

    fields = [
        ScalarField(p.grid, p.data + c) for p, c in zip(phis, cap_list)
    ]
    return DecreasingSequenceResult(
        fields=fields, cap_constant=cap_c, caps=cap_list,
        adjusted=adjusted, adjustment=adjustment, violation=worst,
    )
