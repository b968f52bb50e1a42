"""Config-driven experiment runner: presets, sweeps, and artifact output.

Each experiment resolves to a list of independent runs (one per diffusivity
setting) executed sequentially or across worker processes.  Results are
written as snapshot CSVs (header ``t,x,u``), a flat ``metrics.csv``, a
``summary.json`` with fits, gaps, jumps, and energy audits, and a
``manifest.json`` listing every emitted file with its checksum.  Workers
never write files; a single collector emits artifacts in a fixed order so
reruns are byte-identical regardless of worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    GradientSide,
    InterfaceEnd,
    energy_report,
    fit_power_law,
    interface_gradient,
    l2_space_time,
    detect_jump,
    threshold_crossing,
)
from .coefficients import (
    BistableReaction,
    FaceAverage,
    face_diffusivity,
    sharp_profile,
    smoothed_profile,
)
from .errors import (
    HeteroRdError,
    InterfaceNotOnFace,
    DuplicateInterface,
    ParseError,
    ValidationError,
)
from .grid import Grid1D, build_grid, inner_cell_range, outer_cell_mask
from .limits import inner_subgrid, solve_ode_limit, solve_neumann_limit
from .solver import (
    Field,
    TimeStepConfig,
    Trajectory,
    assemble_diffusion,
    initial_field,
    integrate,
    sin_quarter,
)

PRESET_NAMES = (
    "fig2_snapshots",
    "fig3_limit_comparison",
    "fig4_gradient_decay",
    "fig5_longtime",
    "delta_convergence",
    "ode_limit_check",
)

# Every k-th step is recorded for the energy audit trajectory.
DEFAULT_ENERGY_STRIDE = 10


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of one experiment (preset or custom)."""

    out_dir: str
    preset: str | None = None
    length: float = 4.0
    n_cells: int = 4000
    interfaces: tuple[float, ...] = (1.0, 3.0)
    eps_values: tuple[float, ...] = (math.exp(-1),)
    delta_values: tuple[float, ...] = ()
    alpha: float = 1.0 / 3.0
    scale: float = 1.0
    bound: float = 1.0
    initial: str | float = "sin_quarter"
    face_average: str = "harmonic"
    dt: float = 1e-4
    theta: float = 1.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 25
    t_end: float = 0.1
    snapshot_times: tuple[float, ...] = (0.0, 0.1)
    workers: int = 1


@dataclass(frozen=True)
class RunTask:
    """One independent solver run, fully described by primitives."""

    tag: str
    kind: str                      # "pde" or "neumann"
    spec: ExperimentSpec
    eps: float
    delta: float = 0.0
    # (span, dt, energy_stride) segments executed back to back.
    phases: tuple[tuple[float, float, int], ...] = ()
    record_times: tuple[float, ...] = ()
    csv_times: tuple[float, ...] = ()


@dataclass
class RunResult:
    tag: str
    kind: str
    eps: float
    delta: float
    times: np.ndarray | None = None
    values: np.ndarray | None = None
    energy: dict | None = None
    wall_time: float = 0.0
    error: str | None = None


@dataclass
class RunManifest:
    spec: dict
    runs: list[dict]
    files: dict[str, str]
    version: str
    notes: dict = field(default_factory=dict)


def _spec_grid(spec: ExperimentSpec) -> Grid1D:
    return build_grid(spec.length, spec.n_cells, list(spec.interfaces))


def _spec_reaction(spec: ExperimentSpec) -> BistableReaction:
    return BistableReaction(alpha=spec.alpha, scale=spec.scale, bound=spec.bound)


def _face_method(spec: ExperimentSpec) -> FaceAverage:
    return FaceAverage(spec.face_average)


def _eps_tag(eps: float) -> str:
    j = -math.log(eps)
    if abs(j - round(j)) < 1e-9:
        return f"e-{int(round(j))}" if round(j) != 0 else "e-0"
    return f"{eps:.6g}"


def _execute_task(task: RunTask) -> RunResult:
    """Run one task to completion; never raises (errors go in the result)."""
    spec = task.spec
    start = time.perf_counter()
    try:
        grid = _spec_grid(spec)
        r = _spec_reaction(spec)
        u0 = initial_field(grid, spec.initial)
        method = _face_method(spec)

        if task.kind == "neumann":
            span, dt, stride = task.phases[0]
            snaps = _merged_times(task.record_times, span, dt, stride)
            cfg = TimeStepConfig(dt=dt, t_end=span, theta=spec.theta,
                                 newton_tol=spec.newton_tol,
                                 newton_max_iter=spec.newton_max_iter,
                                 snapshot_times=snaps)
            traj = solve_neumann_limit(grid, r, u0, cfg)
            energy = None
        else:
            if task.delta > 0.0:
                profile = smoothed_profile(grid, task.eps, task.delta)
            else:
                profile = sharp_profile(grid, task.eps)
            op = assemble_diffusion(grid, face_diffusivity(profile, grid, method))
            fields = []
            u = u0.values
            t0 = 0.0
            for span, dt, stride in task.phases:
                rel = tuple(t - t0 for t in task.record_times if t0 < t <= t0 + span)
                snaps = _merged_times(rel, span, dt, stride)
                cfg = TimeStepConfig(dt=dt, t_end=span, theta=spec.theta,
                                     newton_tol=spec.newton_tol,
                                     newton_max_iter=spec.newton_max_iter,
                                     snapshot_times=snaps)
                segment = integrate(u, op, grid, r, cfg, t0=t0)
                fields.extend(segment if not fields else segment[1:])
                u = fields[-1].values
                t0 += span
            traj = Trajectory(fields=fields, metadata={"tag": task.tag})
            rep = energy_report(traj, profile, r, method)
            energy = {"lhs": rep.lhs, "rhs": rep.rhs,
                      "bound_inner": rep.bound_inner, "c1_bound": rep.c1_bound,
                      "identity_residual": rep.identity_residual}

        times, values = _extract_records(traj, task.record_times)
        return RunResult(tag=task.tag, kind=task.kind, eps=task.eps,
                         delta=task.delta, times=times, values=values,
                         energy=energy,
                         wall_time=time.perf_counter() - start)
    except (HeteroRdError, ValueError, FloatingPointError) as exc:
        return RunResult(tag=task.tag, kind=task.kind, eps=task.eps,
                         delta=task.delta,
                         wall_time=time.perf_counter() - start,
                         error=f"{type(exc).__name__}: {exc}")


def _merged_times(record_rel: tuple[float, ...], span: float, dt: float,
                  stride: int) -> tuple[float, ...]:
    """Requested snapshot times plus every stride-th step for the energy audit."""
    n_samples = int(math.floor(span / (dt * stride) + 1e-9))
    energy_times = [k * dt * stride for k in range(1, n_samples + 1)]
    merged = sorted(set(float(t) for t in record_rel) | set(energy_times))
    out: list[float] = []
    for t in merged:
        t = min(t, span)
        if t <= 0.0 or (out and t - out[-1] <= 1e-12):
            continue
        out.append(t)
    return tuple(out)


def _extract_records(traj: Trajectory, record_times: tuple[float, ...]):
    """Pick the requested snapshots out of the (denser) trajectory."""
    wanted = sorted(set(float(t) for t in record_times) | {0.0})
    times, rows = [], []
    for t in wanted:
        f = traj.field_at(t, tol=1e-9)
        times.append(f.t)
        rows.append(f.values)
    return np.array(times), np.stack(rows)


def resolve_runs(spec: ExperimentSpec) -> list[RunTask]:
    """Expand a spec into its independent run list."""
    grid = _spec_grid(spec)
    dx = grid.dx
    stride = DEFAULT_ENERGY_STRIDE
    record = tuple(sorted(set(spec.snapshot_times) | {spec.t_end}))
    one_phase = ((spec.t_end, spec.dt, stride),)
    tasks: list[RunTask] = []

    if spec.preset == "fig5_longtime":
        # Short steps through the fast transient, ten-times longer ones after
        # t = 1; the energy audit samples stay around 1e-3 / 0.1 time spacing.
        if spec.t_end > 1.0:
            phases = ((1.0, spec.dt, stride), (spec.t_end - 1.0, spec.dt * 10.0, 100))
        else:
            phases = one_phase
        for eps in spec.eps_values:
            tasks.append(RunTask(tag=f"snapshots_{_eps_tag(eps)}", kind="pde",
                                 spec=spec, eps=eps, phases=phases,
                                 record_times=record, csv_times=record))
        return tasks

    if spec.preset == "delta_convergence":
        # Dense recording feeds the space-time distance; CSVs stay small.
        dense = tuple(np.round(np.arange(0.0, spec.t_end + 1e-12, 10 * spec.dt), 12))
        csv_times = record
        for eps in spec.eps_values:
            tasks.append(RunTask(tag=f"snapshots_{_eps_tag(eps)}_sharp", kind="pde",
                                 spec=spec, eps=eps, phases=one_phase,
                                 record_times=dense, csv_times=csv_times))
            for delta in spec.delta_values:
                mult = delta / dx
                tag = (f"snapshots_{_eps_tag(eps)}_delta{mult:g}dx"
                       if abs(mult - round(mult)) < 1e-9
                       else f"snapshots_{_eps_tag(eps)}_delta{delta:.6g}")
                tasks.append(RunTask(tag=tag, kind="pde", spec=spec, eps=eps,
                                     delta=delta, phases=one_phase,
                                     record_times=dense, csv_times=csv_times))
        return tasks

    for eps in spec.eps_values:
        tasks.append(RunTask(tag=f"snapshots_{_eps_tag(eps)}", kind="pde",
                             spec=spec, eps=eps, phases=one_phase,
                             record_times=record, csv_times=record))
        for delta in spec.delta_values:
            tasks.append(RunTask(tag=f"snapshots_{_eps_tag(eps)}_delta{delta:.6g}",
                                 kind="pde", spec=spec, eps=eps, delta=delta,
                                 phases=one_phase, record_times=record,
                                 csv_times=record))
    if spec.preset == "fig3_limit_comparison":
        tasks.append(RunTask(tag="snapshots_neumann", kind="neumann", spec=spec,
                             eps=0.0, phases=one_phase, record_times=record,
                             csv_times=record))
    return tasks


def _run_tasks(tasks: list[RunTask], workers: int) -> list[RunResult]:
    if workers <= 1 or len(tasks) <= 1:
        return [_execute_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_execute_task, t) for t in tasks]
        return [f.result() for f in futures]


def emit_snapshot_csv(traj: Trajectory, path) -> None:
    """Write one row per (snapshot, cell) with 17 significant digits."""
    if not traj.fields:
        raise ValueError("trajectory is empty")
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write("t,x,u\n")
        for f in traj.fields:
            xs = f.grid.cell_centers
            t_str = format(f.t, ".17g")
            for x, u in zip(xs, f.values):
                fh.write(f"{t_str},{format(x, '.17g')},{format(u, '.17g')}\n")


def read_snapshot_csv(path):
    """Inverse of emit_snapshot_csv: arrays of t, x, u (one entry per row)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data["t"], data["x"], data["u"]


def emit_metrics(rows: list[dict], path) -> None:
    """Flat CSV of metric rows (union of keys, fixed order)."""
    path = Path(path)
    keys: list[str] = []
    for row in rows:
        for k in row:
            if k not in keys:
                keys.append(k)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt_cell(v) for k, v in row.items()})


def _fmt_cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def emit_summary(summary: dict, path) -> None:
    with Path(path).open("w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def _bounds_rows(results: list[RunResult]) -> list[dict]:
    rows = []
    for res in results:
        if res.error:
            continue
        for k, t in enumerate(res.times):
            rows.append({"run": res.tag, "metric": "bounds", "t": float(t),
                         "min_u": float(res.values[k].min()),
                         "max_u": float(res.values[k].max())})
    return rows


def run_experiment(spec: ExperimentSpec) -> RunManifest:
    """Execute a spec end to end and persist every artifact."""
    violations = validate_spec(spec)
    if violations:
        raise ValidationError(violations)

    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = _spec_grid(spec)
    r = _spec_reaction(spec)
    tasks = resolve_runs(spec)
    results = _run_tasks(tasks, spec.workers)
    by_tag = {res.tag: res for res in results}

    metrics_rows: list[dict] = []
    summary: dict = {"preset": spec.preset, "energy": {}, "bounds": {}}
    files: dict[str, str] = {}

    for task in tasks:
        res = by_tag[task.tag]
        if res.error:
            continue
        csv_set = set(float(t) for t in task.csv_times) | {0.0}
        keep = [i for i, t in enumerate(res.times) if
                any(abs(t - c) <= 1e-9 for c in csv_set)]
        fields = [Field(grid=_result_grid(task, grid), values=res.values[i],
                        t=float(res.times[i])) for i in keep]
        traj = Trajectory(fields=fields, metadata={"tag": task.tag})
        csv_path = out / f"{task.tag}.csv"
        emit_snapshot_csv(traj, csv_path)
        files[csv_path.name] = ""
        if res.energy is not None:
            summary["energy"][task.tag] = res.energy
        summary["bounds"][task.tag] = {
            "min_u": float(res.values.min()), "max_u": float(res.values.max())}

    metrics_rows.extend(_bounds_rows(results))
    _preset_metrics(spec, grid, r, tasks, by_tag, metrics_rows, summary)

    metrics_path = out / "metrics.csv"
    emit_metrics(metrics_rows, metrics_path)
    files[metrics_path.name] = ""
    summary_path = out / "summary.json"
    emit_summary(summary, summary_path)
    files[summary_path.name] = ""

    for name in files:
        files[name] = _sha256(out / name)

    manifest = RunManifest(
        spec=_spec_to_dict(spec),
        runs=[{"tag": res.tag, "status": "error" if res.error else "ok",
               "wall_time_s": res.wall_time, "error": res.error}
              for res in results],
        files=files,
        version=__version__,
        notes=_preset_notes(spec),
    )
    with (out / "manifest.json").open("w") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _result_grid(task: RunTask, grid: Grid1D):
    if task.kind == "neumann":
        u0 = initial_field(grid, task.spec.initial)
        return inner_subgrid(grid, u0)
    return grid


def _preset_metrics(spec: ExperimentSpec, grid: Grid1D, r: BistableReaction,
                    tasks: list[RunTask], by_tag: dict[str, RunResult],
                    metrics_rows: list[dict], summary: dict) -> None:
    """Compute the metric family belonging to each preset."""
    preset = spec.preset
    pde_tasks = [t for t in tasks if t.kind == "pde" and not by_tag[t.tag].error]

    if preset in ("fig2_snapshots", "fig3_limit_comparison") and grid.has_interfaces:
        gradients = {}
        for task in pde_tasks:
            res = by_tag[task.tag]
            f = Field(grid=grid, values=res.values[-1], t=float(res.times[-1]))
            entry = {}
            for side in (GradientSide.INNER, GradientSide.OUTER):
                g_val = interface_gradient(f, grid, InterfaceEnd.LEFT, side)
                entry[side.value] = g_val
                metrics_rows.append({"run": task.tag, "metric": "interface_gradient",
                                     "t": f.t, "eps": task.eps,
                                     "side": side.value, "value": g_val})
            gradients[task.tag] = entry
        summary["interface_gradients"] = gradients

    if preset == "fig3_limit_comparison":
        neu = by_tag.get("snapshots_neumann")
        if neu is not None and not neu.error:
            lo, hi = inner_cell_range(grid)
            u_neu = neu.values[-1]
            gaps, below = {}, {}
            for task in pde_tasks:
                res = by_tag[task.tag]
                inner = res.values[-1][lo:hi]
                gaps[task.tag] = float(np.max(np.abs(inner - u_neu)))
                below[task.tag] = float(np.max(inner - u_neu))
                metrics_rows.append({"run": task.tag, "metric": "neumann_gap",
                                     "t": float(res.times[-1]), "eps": task.eps,
                                     "value": gaps[task.tag]})
            summary["neumann_gaps"] = gaps
            summary["neumann_signed_excess"] = below

    if preset == "fig4_gradient_decay":
        report_times = sorted(t for t in spec.snapshot_times if t > 0.0)
        fits = {}
        table: dict[float, list[tuple[float, float]]] = {t: [] for t in report_times}
        for task in pde_tasks:
            res = by_tag[task.tag]
            for t in report_times:
                k = int(np.argmin(np.abs(res.times - t)))
                f = Field(grid=grid, values=res.values[k], t=float(res.times[k]))
                g_val = abs(interface_gradient(f, grid, InterfaceEnd.LEFT,
                                               GradientSide.INNER))
                table[t].append((task.eps, g_val))
                metrics_rows.append({"run": task.tag, "metric": "gradient_decay",
                                     "t": t, "eps": task.eps, "value": g_val})
        for t in report_times:
            eps_list = [e for e, _ in table[t]]
            vals = [v for _, v in table[t]]
            fit = fit_power_law(eps_list, vals)
            fits[f"t={t:g}"] = {"a": fit.exponent, "b": fit.log_prefactor,
                                "residual": fit.residual}
            metrics_rows.append({"metric": "power_law_fit", "t": t,
                                 "a": fit.exponent, "b": fit.log_prefactor,
                                 "residual": fit.residual})
        summary["fits"] = fits

    if preset == "fig5_longtime":
        x_left = threshold_crossing(lambda x: float(sin_quarter(x)), r.alpha,
                                    (0.0, grid.interface_positions[0]))
        x_right = grid.length - x_left
        centers = grid.cell_centers
        target = np.where((centers > x_left) & (centers < x_right), 1.0, 0.0)
        per_snapshot = []
        for task in pde_tasks:
            res = by_tag[task.tag]
            for k, t in enumerate(res.times):
                f = Field(grid=grid, values=res.values[k], t=float(t))
                jumps = detect_jump(f)
                excl = np.zeros(grid.n_cells, dtype=bool)
                for xj in (x_left, x_right):
                    idx = int(xj / grid.dx)
                    excl[max(0, idx - 3):idx + 4] = True
                err = float(np.max(np.abs(res.values[k][~excl] - target[~excl])))
                per_snapshot.append({
                    "t": float(t),
                    "jumps": [[float(x), float(h)] for x, h in jumps],
                    "step_profile_error": err,
                })
                metrics_rows.append({"run": task.tag, "metric": "step_profile_error",
                                     "t": float(t), "value": err,
                                     "n_jumps": len(jumps)})
        summary["step_formation"] = {
            "threshold_left": x_left, "threshold_right": x_right,
            "snapshots": per_snapshot,
        }

    if preset == "delta_convergence":
        sharp = next((t for t in pde_tasks if t.delta == 0.0), None)
        if sharp is not None:
            res_sharp = by_tag[sharp.tag]
            traj_sharp = _light_traj(grid, res_sharp)
            distances = {}
            for task in pde_tasks:
                if task.delta == 0.0:
                    continue
                traj_d = _light_traj(grid, by_tag[task.tag])
                dist = l2_space_time(traj_d, traj_sharp)
                distances[task.tag] = {"delta": task.delta, "l2_qt": dist}
                metrics_rows.append({"run": task.tag, "metric": "l2_qt_vs_sharp",
                                     "delta": task.delta, "value": dist})
            summary["delta_distances"] = distances

    if preset == "ode_limit_check":
        u0 = initial_field(grid, spec.initial)
        ode = solve_ode_limit(u0, r, times=[spec.t_end])
        mask = outer_cell_mask(grid)
        if grid.has_interfaces:
            left, right = grid.interface_positions
            dist = np.minimum(np.abs(grid.cell_centers - left),
                              np.abs(grid.cell_centers - right))
            far = mask & (dist > 0.1)
        else:
            far = mask
        diffs = {}
        for task in pde_tasks:
            res = by_tag[task.tag]
            diff = float(np.max(np.abs(res.values[-1][far] - ode.final.values[far])))
            diffs[task.tag] = diff
            metrics_rows.append({"run": task.tag, "metric": "ode_limit_max_diff",
                                 "t": float(res.times[-1]), "eps": task.eps,
                                 "value": diff})
        summary["ode_limit_max_diff"] = diffs


def _light_traj(grid: Grid1D, res: RunResult) -> Trajectory:
    fields = [Field(grid=grid, values=res.values[k], t=float(t))
              for k, t in enumerate(res.times)]
    return Trajectory(fields=fields, metadata={"tag": res.tag})


def build_preset_spec(name: str, overrides: dict | None = None,
                      out_dir: str = "runs") -> ExperimentSpec:
    """Materialize a preset spec, applying overrides before derived values."""
    if name not in PRESET_NAMES:
        raise ValidationError([f"unknown preset {name!r}"])
    overrides = dict(overrides or {})
    out_dir = overrides.pop("out_dir", out_dir)

    base = dict(out_dir=out_dir, preset=name)
    if name in ("fig2_snapshots", "fig3_limit_comparison"):
        base.update(eps_values=tuple(math.exp(-j) for j in (1, 2, 4, 8)),
                    t_end=0.1, snapshot_times=(0.0, 0.1))
    elif name == "fig4_gradient_decay":
        base.update(eps_values=tuple(math.exp(-j) for j in range(9)),
                    t_end=0.09, snapshot_times=(0.01, 0.04, 0.09))
    elif name == "fig5_longtime":
        base.update(eps_values=(math.exp(-16),), t_end=100.0,
                    snapshot_times=(0.0, 0.1, 1.0, 10.0, 40.0, 100.0))
    elif name == "delta_convergence":
        base.update(eps_values=(math.exp(-4),), t_end=0.1,
                    snapshot_times=(0.0, 0.05, 0.1))
    elif name == "ode_limit_check":
        base.update(eps_values=(math.exp(-8),), t_end=0.1,
                    snapshot_times=(0.0, 0.1))

    base.update(overrides)
    spec = ExperimentSpec(**base)
    if name == "delta_convergence" and not spec.delta_values:
        dx = spec.length / spec.n_cells
        spec = replace(spec, delta_values=(8 * dx, 4 * dx, 2 * dx))
    return spec


def _preset_notes(spec: ExperimentSpec) -> dict:
    notes = {}
    if spec.preset in ("fig2_snapshots", "fig3_limit_comparison"):
        notes["eps_choice"] = ("eps values e^-1, e^-2, e^-4, e^-8 are a "
                               "harness decision")
    if spec.preset == "fig5_longtime":
        notes["snapshot_choice"] = ("snapshot times 0, 0.1, 1, 10, 40, 100 are a "
                                    "harness decision")
        notes["dt_schedule"] = "dt is multiplied by 10 after t=1"
    return notes


def run_preset(name: str, overrides: dict | None = None,
               out_dir: str = "runs") -> RunManifest:
    """Execute a named preset (optionally overridden) and persist artifacts."""
    spec = build_preset_spec(name, overrides, out_dir)
    return run_experiment(spec)


def _spec_to_dict(spec: ExperimentSpec) -> dict:
    d = asdict(spec)
    for key, val in d.items():
        if isinstance(val, tuple):
            d[key] = list(val)
    return d


_SPEC_FIELDS = {f: None for f in ExperimentSpec.__dataclass_fields__}


def load_spec(path) -> ExperimentSpec:
    """Load a JSON config whose keys mirror ExperimentSpec exactly."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")

    unknown = [k for k in raw if k not in _SPEC_FIELDS]
    if unknown:
        raise ParseError(f"{path}: unknown fields {unknown}")
    for key in ("interfaces", "eps_values", "delta_values", "snapshot_times"):
        if key in raw and isinstance(raw[key], list):
            raw[key] = tuple(raw[key])
    if "out_dir" not in raw:
        raw["out_dir"] = "runs"
    return ExperimentSpec(**raw)


def validate_spec(spec: ExperimentSpec) -> list[str]:
    """Return the complete list of violations (empty when the spec is valid)."""
    problems: list[str] = []
    if spec.preset is not None and spec.preset not in PRESET_NAMES:
        problems.append(f"unknown preset {spec.preset!r}")
    if spec.length <= 0 or not math.isfinite(spec.length):
        problems.append(f"length must be positive, got {spec.length}")
    if spec.n_cells < 2:
        problems.append(f"n_cells must be >= 2, got {spec.n_cells}")
    if len(spec.interfaces) not in (0, 2):
        problems.append(f"expected 0 or 2 interfaces, got {len(spec.interfaces)}")
    if not spec.eps_values:
        problems.append("eps_values must not be empty")
    for eps in spec.eps_values:
        if not (0.0 < eps <= 1.0):
            problems.append(f"epsilon must be in (0, 1], got {eps}")
    for delta in spec.delta_values:
        if delta <= 0.0:
            problems.append(f"delta values must be positive, got {delta}")
    if not (0.0 <= spec.alpha < 1.0):
        problems.append(f"alpha must be in [0, 1), got {spec.alpha}")
    if spec.scale < 0.0:
        problems.append(f"scale must be >= 0, got {spec.scale}")
    if spec.bound < 1.0:
        problems.append(f"bound must be >= 1, got {spec.bound}")
    if isinstance(spec.initial, str) and spec.initial != "sin_quarter":
        problems.append(f"unknown initial datum {spec.initial!r}")
    if spec.face_average not in ("harmonic", "arithmetic"):
        problems.append(f"face_average must be harmonic or arithmetic, "
                        f"got {spec.face_average!r}")
    if spec.dt <= 0:
        problems.append(f"dt must be positive, got {spec.dt}")
    if not (0.5 <= spec.theta <= 1.0):
        problems.append(f"theta must be in [0.5, 1], got {spec.theta}")
    if spec.t_end <= 0:
        problems.append(f"t_end must be positive, got {spec.t_end}")
    for t in spec.snapshot_times:
        if not (0.0 <= t <= spec.t_end):
            problems.append(f"snapshot time {t} outside [0, {spec.t_end}]")
    if spec.workers < 1:
        problems.append(f"workers must be >= 1, got {spec.workers}")
    if spec.newton_tol <= 0:
        problems.append(f"newton_tol must be positive, got {spec.newton_tol}")
    if spec.newton_max_iter < 1:
        problems.append(f"newton_max_iter must be >= 1, got {spec.newton_max_iter}")

    if (spec.length > 0 and spec.n_cells >= 2
            and len(spec.interfaces) in (0, 2)):
        try:
            build_grid(spec.length, spec.n_cells, list(spec.interfaces))
        except (InterfaceNotOnFace, DuplicateInterface, ValueError) as exc:
            problems.append(f"{type(exc).__name__}: {exc}")
    return problems
