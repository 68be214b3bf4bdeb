"""Closed-loop simulation harness.

Wires the pieces together per step: LQR outer loop produces the commanded
moment v, the allocator maps it to surface commands u, the (possibly
degraded) plant reacts, and the allocator adapts from the measured achieved
moment.  Everything is logged into a ScenarioTrace for metrics, CSV export,
and plotting.  Runs are deterministic: the same config always produces the
same trace, bit for bit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .allocator import (
    AllocatorConfig,
    AllocatorState,
    check_assumption1,
    compute_u,
    epsilon,
    initial_state,
    sigma_sq,
    step_reference,
    step_xi,
    update_theta,
)
from .controller import build_augmented, control, integrator_step, solve_dare
from .errors import AssumptionError, ConfigError, DimensionError, NonFiniteError
from .matrixcore import as_matrix, as_vector, inverse
from .plant import Effectiveness, PlantModel, admire_preset, measured_moment
from .plant import step as plant_step

# piecewise-constant lookups treat t within this of a breakpoint as past it
TIME_TOL = 1e-9

Schedule = tuple[tuple[float, float], ...]


def doublet(amplitude: float, start: float, width: float) -> Schedule:
    """Piecewise-constant doublet: +amplitude on [start, start+width), then
    -amplitude for one more width, then back to zero."""
    if width <= 0.0:
        raise ConfigError(f"doublet width must be positive, got {width}")
    return (
        (0.0, 0.0),
        (float(start), float(amplitude)),
        (float(start + width), float(-amplitude)),
        (float(start + 2.0 * width), 0.0),
    )


def reference_signal(schedule: Schedule, t: float) -> float:
    """Value of a piecewise-constant schedule at time t (switch boundary
    inclusive: at exactly a breakpoint the new value applies)."""
    if not schedule:
        raise ConfigError("reference schedule is empty")
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    value = 0.0
    for time, val in schedule:
        if time <= t + TIME_TOL:
            value = val
        else:
            break
    return value


def _validate_schedule(schedule: Schedule, name: str) -> Schedule:
    sched = tuple((float(t), float(v)) for t, v in schedule)
    times = [t for t, _ in sched]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ConfigError(f"{name} schedule times must be nondecreasing, got {times}")
    return sched


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a closed-loop run needs.

    references holds one piecewise-constant schedule per controlled output;
    faults is a time-ordered list of (time, Effectiveness) switches, with the
    plant healthy before the first one.  signal_ceiling bounds every logged
    signal; exceeding it aborts the run (divergence guard).
    """

    plant: PlantModel
    allocator: AllocatorConfig
    Q: np.ndarray
    R: np.ndarray
    references: tuple[Schedule, ...]
    duration: float
    faults: tuple[tuple[float, Effectiveness], ...] = ()
    saturation: np.ndarray | None = None
    theta_init: str = "pinv"
    plant_path: str = "design"
    x0: np.ndarray | None = None
    seed: int = 0
    signal_ceiling: float = 1e9

    def __post_init__(self):
        n, r = self.plant.n, self.plant.r
        q = as_matrix(self.Q, "Q")
        rm = as_matrix(self.R, "R")
        if q.shape != (n + r, n + r):
            raise DimensionError(f"Q must be {n + r}x{n + r}, got {q.shape}")
        if rm.shape != (r, r):
            raise DimensionError(f"R must be {r}x{r}, got {rm.shape}")
        if self.allocator.B_alloc.shape != (r, self.plant.m):
            raise DimensionError("allocator B_alloc does not match plant dimensions")
        if not self.duration > 0.0:
            raise ConfigError(f"duration must be positive, got {self.duration}")
        refs = tuple(_validate_schedule(s, f"output {i}") for i, s in enumerate(self.references))
        if len(refs) != r:
            raise DimensionError(f"need {r} reference schedules, got {len(refs)}")
        faults = tuple(sorted(((float(t), lam) for t, lam in self.faults), key=lambda f: f[0]))
        for t, lam in faults:
            if not 0.0 <= t <= self.duration:
                raise ConfigError(f"fault time {t} outside [0, {self.duration}]")
            if lam.lambda_diag.shape != (self.plant.m,):
                raise DimensionError("fault effectiveness size does not match actuator count")
        if self.plant_path not in ("design", "full"):
            raise ConfigError(f"plant_path must be 'design' or 'full', got {self.plant_path!r}")
        sat = self.saturation
        if sat is not None:
            sat = as_vector(sat, "saturation")
            if sat.shape != (r,) or np.any(sat <= 0.0):
                raise ConfigError("saturation limits must be r positive values")
        x0 = self.x0
        if x0 is not None:
            x0 = as_vector(x0, "x0")
            if x0.shape != (n,):
                raise DimensionError(f"x0 must have size {n}")
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "R", rm)
        object.__setattr__(self, "references", refs)
        object.__setattr__(self, "faults", faults)
        object.__setattr__(self, "saturation", sat)
        object.__setattr__(self, "x0", x0)

    def reference_at(self, t: float) -> np.ndarray:
        return np.array([reference_signal(s, t) for s in self.references])

    def effectiveness_at(self, t: float) -> Effectiveness:
        lam = Effectiveness.healthy(self.plant.m)
        for time, fault_lam in self.faults:
            if time <= t + TIME_TOL:
                lam = fault_lam
            else:
                break
        return lam

    def segment_starts(self) -> tuple[tuple[int, ...], ...]:
        """Per output: step indices where a new constant-reference segment
        begins.  Segments split at every schedule breakpoint, value change or
        not, so fault-time breakpoints isolate the fault transient."""
        per_channel = []
        for sched in self.references:
            steps = {0}
            for time, _ in sched:
                k = int(math.ceil(time / self.plant.dt - TIME_TOL))
                if 0 <= k <= self.num_steps() - 1:
                    steps.add(k)
            per_channel.append(tuple(sorted(steps)))
        return tuple(per_channel)

    def num_steps(self) -> int:
        """Number of logged rows: floor(duration/dt) + 1."""
        return int(math.floor(self.duration / self.plant.dt + TIME_TOL)) + 1


@dataclass
class ScenarioTrace:
    """Per-step log of every closed-loop signal.

    Arrays are indexed by step; theta has shape (steps, r, m).  ref, y, and
    lam are carried for metrics but are not part of the CSV schema.
    """

    dt: float
    k: np.ndarray
    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    measured: np.ndarray
    xi: np.ndarray
    xi_m: np.ndarray
    e: np.ndarray
    theta: np.ndarray
    V: np.ndarray
    sigma_sq: np.ndarray
    ref: np.ndarray
    y: np.ndarray
    lam: np.ndarray
    state_labels: tuple[str, ...]
    input_labels: tuple[str, ...]
    segment_starts: tuple[tuple[int, ...], ...] = field(default=())
    seed: int = 0

    @property
    def steps(self) -> int:
        return len(self.t)


def ideal_theta(B, lam) -> np.ndarray:
    """Parameter value that inverts the degraded allocation map exactly:
    the right pseudo-inverse of B diag(lam), transposed into r x m layout."""
    B = as_matrix(B, "B")
    lam_vec = lam.lambda_diag if isinstance(lam, Effectiveness) else as_vector(lam, "lam")
    bl = B * lam_vec
    return (bl.T @ inverse(bl @ bl.T)).T


def lyapunov_value(theta_v, Gamma, B, lam) -> float:
    """Oracle energy tr((theta - theta*)^T Gamma^-1 (theta - theta*) diag(lam)).

    Needs the true effectiveness, so it lives in the harness and the tests,
    never in the allocator path.
    """
    theta_v = as_matrix(theta_v, "theta_v")
    gamma = as_matrix(Gamma, "Gamma")
    lam_vec = lam.lambda_diag if isinstance(lam, Effectiveness) else as_vector(lam, "lam")
    delta = theta_v - ideal_theta(B, lam_vec)
    inner = delta.T @ inverse(gamma) @ delta
    return float(np.sum(np.diag(inner) * lam_vec))


def run(config: ScenarioConfig) -> ScenarioTrace:
    """Execute the closed loop and log every step.

    Per step k (ordering fixed): read y = C x; advance the tracking-error
    integrator; v from LQR state feedback (+ optional soft saturation);
    u = theta_v^T v; measure the achieved moment with the currently active
    effectiveness; form sigma^2 and the normalized error; log; then advance
    the allocator (reference model first, from the same-step xi, then xi,
    then theta_v) and finally the plant.  Aborts with the step index if any
    signal goes non-finite or exceeds the configured ceiling.

    plant_path selects how the plant consumes u.  "design" (default) applies
    the factorized map, x <- A x + B_v (B diag(lam) u), so the actuators act
    purely through the net moments the allocator regulates.  "full" applies
    the complete input matrix, x <- A x + B_u diag(lam) u, which also injects
    the direct force rows that the allocation design deliberately ignores;
    with the built-in ADMIRE preset that unmodeled coupling destabilizes the
    outer loop (true spectral radius ~1.019 against the nominal 0.997), so
    "full" is an experiment switch, not the benchmark default.
    """
    report = check_assumption1(config.allocator)
    if not report.ok:
        raise AssumptionError("reference-model stability check failed:\n" + report.summary())

    model = config.plant
    acfg = config.allocator
    aug = build_augmented(model.A, model.B_v, model.C, model.dt)
    sol = solve_dare(aug.A_bar, aug.B_bar, config.Q, config.R)

    n, m, r = model.n, model.m, model.r
    steps = config.num_steps()
    dt = model.dt

    gamma_inv = inverse(acfg.Gamma)
    theta_star_cache: dict[bytes, np.ndarray] = {}

    def oracle_v(theta: np.ndarray, lam: Effectiveness) -> float:
        key = lam.lambda_diag.tobytes()
        star = theta_star_cache.get(key)
        if star is None:
            star = ideal_theta(acfg.B_alloc, lam.lambda_diag)
            theta_star_cache[key] = star
        delta = theta - star
        return float(np.sum(np.diag(delta.T @ gamma_inv @ delta) * lam.lambda_diag))

    tr = ScenarioTrace(
        dt=dt,
        k=np.arange(steps),
        t=np.empty(steps),
        x=np.empty((steps, n)),
        u=np.empty((steps, m)),
        v=np.empty((steps, r)),
        measured=np.empty((steps, r)),
        xi=np.empty((steps, r)),
        xi_m=np.empty((steps, r)),
        e=np.empty((steps, r)),
        theta=np.empty((steps, r, m)),
        V=np.empty(steps),
        sigma_sq=np.empty(steps),
        ref=np.empty((steps, r)),
        y=np.empty((steps, r)),
        lam=np.empty((steps, m)),
        state_labels=model.state_labels,
        input_labels=model.input_labels,
        segment_starts=config.segment_starts(),
        seed=config.seed,
    )

    state: AllocatorState = initial_state(acfg, config.theta_init)
    x = np.zeros(n) if config.x0 is None else config.x0.copy()
    x_new = np.zeros(r)
    ceiling = config.signal_ceiling

    for k in range(steps):
        t = k * dt
        lam = config.effectiveness_at(t)
        ref = config.reference_at(t)
        y = model.C @ x
        x_new = integrator_step(x_new, ref, y, dt)
        z = np.concatenate([x, x_new])
        v = control(sol, z, config.saturation)
        u = compute_u(state, v)
        meas = measured_moment(model, lam, u)
        s2 = sigma_sq(acfg, v)
        eps = epsilon(acfg, v, meas)

        tr.t[k] = t
        tr.x[k] = x
        tr.u[k] = u
        tr.v[k] = v
        tr.measured[k] = meas
        tr.xi[k] = state.xi
        tr.xi_m[k] = state.xi_m
        tr.e[k] = state.xi - state.xi_m
        tr.theta[k] = state.theta_v
        tr.V[k] = oracle_v(state.theta_v, lam)
        tr.sigma_sq[k] = s2
        tr.ref[k] = ref
        tr.y[k] = y
        tr.lam[k] = lam.lambda_diag

        state = step_reference(acfg, state)  # consumes the same-step xi
        state = step_xi(acfg, state, v, meas)
        state = update_theta(acfg, state, v, eps)
        if config.plant_path == "design":
            x = model.A @ x + model.B_v @ meas
            if not np.all(np.isfinite(x)):
                raise NonFiniteError(f"plant step produced NaN/Inf at step {k}")
        else:
            x = plant_step(model, lam, x, u)

        worst = max(
            float(np.max(np.abs(x))),
            float(np.max(np.abs(state.theta_v))),
            float(np.max(np.abs(state.xi))),
        )
        if not np.isfinite(worst) or worst > ceiling:
            raise NonFiniteError(f"signal exceeded ceiling {ceiling:g} at step {k} (t={t:.3f}s)")

    return tr


def admire_benchmark(
    mode: str = "closed_loop",
    l: float = 0.1,
    theta_init: str = "pinv",
    duration: float = 200.0,
    fault_time: float | None = 100.0,
    fault_level: float = 0.7,
) -> ScenarioConfig:
    """The standard ADMIRE fault-recovery benchmark.

    LQR weights Q = I_8, R = diag(1, 1, 0.1); adaptation rate
    Gamma = diag(1, 1, 0.1); reference dynamics A_m = 0.5 I with closed-loop
    gain l = 0.1; all actuators drop to 70% effectiveness at t = 100 s.
    References are doublets on the three rates (a small pitch-rate amplitude:
    the pitch axis carries the slow unstable mode), repeated after the fault
    so the allocator gets re-excited.  After the post-fault doublets the roll
    channel holds a small constant rate instead of returning to zero: the
    commanded moment then settles to a fixed direction, the adaptation
    finishes converging along it, and the late-run parameters sit still.  A
    schedule breakpoint at the fault time keeps the fault transient in its
    own tracking segment.
    """
    model = admire_preset()
    acfg = AllocatorConfig(
        Gamma=np.diag([1.0, 1.0, 0.1]),
        A_m=np.diag([0.5, 0.5, 0.5]),
        B_alloc=model.B,
        l=l,
        mode=mode,
    )
    amps = (0.05, -0.005, 0.025)

    def channel(a: float) -> Schedule:
        sched = [(0.0, 0.0), (10.0, a), (30.0, -a), (50.0, 0.0)]
        if fault_time is not None:
            tf = float(fault_time)
            sched = [(t, val) for t, val in sched if t < tf]
            sched += [(tf, 0.0), (tf + 5.0, a), (tf + 15.0, -a), (tf + 25.0, 0.0)]
        return tuple((t, val) for t, val in sched if t <= duration)

    faults = ()
    if fault_time is not None:
        faults = ((float(fault_time), Effectiveness.uniform(model.m, fault_level)),)
    return ScenarioConfig(
        plant=model,
        allocator=acfg,
        Q=np.eye(model.n + model.r),
        R=np.diag([1.0, 1.0, 0.1]),
        references=tuple(channel(a) for a in amps),
        duration=duration,
        faults=faults,
        theta_init=theta_init,
    )


# --- metrics -------------------------------------------------------------

def _phase_windows(trace: ScenarioTrace) -> dict[str, tuple[int, int]]:
    """Half-open step ranges for the three reporting phases."""
    last = trace.steps
    switches = [k for k in range(1, last) if not np.array_equal(trace.lam[k], trace.lam[k - 1])]
    if switches:
        kf = switches[0]
        pre = (max(0, kf - 50), kf)
        transient = (kf, kf + max(1, (last - kf) // 2))
        steady = (max(kf, last - 50), last)
    else:
        pre = (max(0, last - 50), last)
        transient = (last, last)
        steady = (max(0, last - 50), last)
    return {"pre_fault_steady": pre, "post_fault_transient": transient, "post_fault_steady": steady}


def _max_v_increase(trace: ScenarioTrace, lo: int, hi: int) -> float:
    """Largest V(k+1) - V(k) over consecutive steps with identical
    effectiveness (V is not comparable across a fault switch, where the
    ideal parameter it measures distance to jumps)."""
    worst = 0.0
    for k in range(lo, hi - 1):
        if np.array_equal(trace.lam[k], trace.lam[k + 1]):
            worst = max(worst, float(trace.V[k + 1] - trace.V[k]))
    return worst


def _theta_drift(trace: ScenarioTrace, lo: int, hi: int, window: int = 100) -> float:
    if hi - lo < 2:
        return 0.0
    end = hi - 1
    start = max(lo, end - window)
    return float(np.max(np.abs(trace.theta[end] - trace.theta[start])))


def segment_tracking(trace: ScenarioTrace) -> list[dict]:
    """Steady-state tracking error per constant-reference segment.

    For each output and each segment, reports the max |ref - y| over the
    final 20% of the segment.
    """
    out = []
    for i, starts in enumerate(trace.segment_starts):
        bounds = list(starts) + [trace.steps]
        for s, e in zip(bounds, bounds[1:]):
            if e - s < 1:
                continue
            w0 = e - max(1, int(math.ceil(0.2 * (e - s))))
            err = float(np.max(np.abs(trace.ref[w0:e, i] - trace.y[w0:e, i])))
            out.append({
                "output": i,
                "t_start": float(trace.t[s]),
                "t_end": float(trace.t[e - 1]),
                "ref": float(trace.ref[s, i]),
                "steady_err": err,
            })
    return out


def metrics(trace: ScenarioTrace) -> dict:
    """Phase-by-phase summary: allocation error, tracking RMS, peak surface
    deflections, the worst oracle-V increase, and late-run parameter drift."""
    phases = {}
    for name, (lo, hi) in _phase_windows(trace).items():
        if hi <= lo:
            phases[name] = None
            continue
        err = trace.v[lo:hi] - trace.measured[lo:hi]
        track = trace.ref[lo:hi] - trace.y[lo:hi]
        phases[name] = {
            "t_start": float(trace.t[lo]),
            "t_end": float(trace.t[hi - 1]),
            "alloc_err_inf": float(np.max(np.abs(err))),
            "tracking_rms": [float(x) for x in np.sqrt(np.mean(track**2, axis=0))],
            "peak_abs_u": [float(x) for x in np.max(np.abs(trace.u[lo:hi]), axis=0)],
            "max_V_increase": _max_v_increase(trace, lo, hi),
            "theta_tail_drift": _theta_drift(trace, lo, hi),
        }
    return {
        "steps": trace.steps,
        "dt": trace.dt,
        "seed": trace.seed,
        "overall": {
            "alloc_err_inf": float(np.max(np.abs(trace.v - trace.measured))),
            "max_V_increase": _max_v_increase(trace, 0, trace.steps),
            "theta_tail_drift": _theta_drift(trace, 0, trace.steps),
            "peak_abs_u": [float(x) for x in np.max(np.abs(trace.u), axis=0)],
        },
        "phases": phases,
        "tracking_segments": segment_tracking(trace),
    }


# --- CSV serialization ---------------------------------------------------

def csv_header(trace: ScenarioTrace) -> list[str]:
    r = trace.v.shape[1]
    m = trace.u.shape[1]
    cols = ["k", "t"]
    cols += list(trace.state_labels)
    cols += list(trace.input_labels)
    cols += [f"v{i + 1}" for i in range(r)]
    cols += [f"m{i + 1}" for i in range(r)]
    cols += [f"xi{i + 1}" for i in range(r)]
    cols += [f"xim{i + 1}" for i in range(r)]
    cols += [f"e{i + 1}" for i in range(r)]
    cols += [f"th_{i + 1}_{j + 1}" for i in range(r) for j in range(m)]
    cols += ["V", "sigma_sq"]
    return cols


def _row_values(trace: ScenarioTrace, k: int) -> list[float]:
    vals = [trace.t[k]]
    vals += list(trace.x[k])
    vals += list(trace.u[k])
    vals += list(trace.v[k])
    vals += list(trace.measured[k])
    vals += list(trace.xi[k])
    vals += list(trace.xi_m[k])
    vals += list(trace.e[k])
    vals += list(trace.theta[k].reshape(-1))
    vals += [trace.V[k], trace.sigma_sq[k]]
    return vals


def write_trace_csv(trace: ScenarioTrace, path) -> None:
    """Write the documented fixed-schema CSV (17 significant digits, so the
    parse-back is lossless)."""
    lines = [",".join(csv_header(trace))]
    for k in range(trace.steps):
        cells = [str(int(trace.k[k]))] + [f"{val:.17g}" for val in _row_values(trace, k)]
        lines.append(",".join(cells))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trace_csv(path) -> tuple[list[str], np.ndarray]:
    """Parse a trace CSV back into (header, value matrix)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(cell) for cell in row] for row in reader if row]
    return header, np.array(rows)


def trace_from_csv(path, config: ScenarioConfig) -> ScenarioTrace:
    """Rebuild a full trace (including ref/y/lam context) from a CSV plus the
    config that produced it, so metrics can be recomputed offline."""
    header, data = read_trace_csv(path)
    n, m, r = config.plant.n, config.plant.m, config.plant.r
    expected = 2 + n + m + 5 * r + r * m + 2
    if len(header) != expected or data.shape[1] != expected:
        raise ConfigError(f"CSV has {len(header)} columns, expected {expected} for this config")
    steps = data.shape[0]
    idx = 2
    def take(width: int) -> np.ndarray:
        nonlocal idx
        block = data[:, idx:idx + width]
        idx += width
        return block
    x = take(n)
    u = take(m)
    v = take(r)
    meas = take(r)
    xi = take(r)
    xi_m = take(r)
    e = take(r)
    theta = take(r * m).reshape(steps, r, m)
    V = take(1).ravel()
    s2 = take(1).ravel()
    t = data[:, 1]
    ref = np.vstack([config.reference_at(tk) for tk in t])
    lam = np.vstack([config.effectiveness_at(tk).lambda_diag for tk in t])
    y = x @ config.plant.C.T
    return ScenarioTrace(
        dt=config.plant.dt,
        k=data[:, 0].astype(int),
        t=t, x=x, u=u, v=v, measured=meas, xi=xi, xi_m=xi_m, e=e,
        theta=theta, V=V, sigma_sq=s2, ref=ref, y=y, lam=lam,
        state_labels=config.plant.state_labels,
        input_labels=config.plant.input_labels,
        segment_starts=config.segment_starts(),
        seed=config.seed,
    )
