"""End-to-end evaluation: parameters -> steady state -> drift/diffusion ->
stability gate -> covariance -> entanglement measures, plus grid sweeps and
the drive-direction contrast.

Sweeps are embarrassingly parallel; rows are assembled in a fixed row-major
grid order (clockwise drive before counter-clockwise at each point) so the
result table is byte-identical for any worker count.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .linear_model import VARIANT_IMPERFECT, build_model
from .lyapunov import extract_block, solve_lyapunov
from .measures import (
    is_physical,
    log_negativity,
    residual_contangle_min,
    teleportation_fidelity,
)
from .output_mode import MAGNON_INSTANT, FilterSpec, filtered_pair_cm
from .params import DRIVE_CCW, DRIVE_CW, Detunings, DriveSpec, SystemParams
from .steady_state import resolve_drive

PAIRS_DEFAULT = (("a_cw", "m"), ("a_cw", "b"), ("a_ccw", "m"), ("a_ccw", "b"))
TRIPLES_DEFAULT = (("a_cw", "m", "b"), ("a_ccw", "m", "b"))


def partition_key(modes) -> str:
    return "|".join(modes)


@dataclass(frozen=True)
class MeasureRequest:
    """Which quantities to evaluate at each parameter point."""

    pairs: tuple = PAIRS_DEFAULT
    triples: tuple = TRIPLES_DEFAULT
    filter_spec: FilterSpec | None = None     # enables filtered-output block
    magnon_convention: str = MAGNON_INSTANT   # convention reproducing Sec. 5


@dataclass(frozen=True)
class EntReport:
    """Measures for one parameter point.

    Unstable points carry no measures: only steady-state quantities are
    reported.  ``echo`` identifies the configuration up to the drive port so
    that drive-direction comparisons can verify they compare like with like.
    """

    stable: bool
    abscissa: float
    drive_port: str
    g_m_eff: complex
    e_n: dict
    r_min: dict
    filtered_e_n: float | None
    fidelity: float | None
    physical: bool | None
    echo: tuple
    meta: dict = field(default_factory=dict, compare=False)


def evaluate_point(params: SystemParams, det: Detunings,
                   variant: str = VARIANT_IMPERFECT,
                   drive_port: str | None = None,
                   request: MeasureRequest | None = None) -> EntReport:
    """Full single-point evaluation."""
    request = request or MeasureRequest()
    port = drive_port or params.drive_port
    steady = resolve_drive(params, det, port,
                           variant_imperfect=(variant == VARIANT_IMPERFECT))
    model = build_model(params, det, steady.g_m_eff, variant)
    echo = (params.replace(drive_port=DRIVE_CW), det, variant)
    if not model.stable:
        return EntReport(stable=False, abscissa=model.abscissa, drive_port=port,
                         g_m_eff=steady.g_m_eff, e_n={}, r_min={},
                         filtered_e_n=None, fidelity=None, physical=None,
                         echo=echo)

    cm = solve_lyapunov(model.A, model.D)
    e_n = {partition_key(pair): log_negativity(extract_block(cm, pair))
           for pair in request.pairs}
    r_min = {partition_key(tri): residual_contangle_min(extract_block(cm, tri)).r_min
             for tri in request.triples}

    filtered_e_n = fidelity = None
    meta = {}
    if request.filter_spec is not None:
        out = filtered_pair_cm(model.A, model.D, params, request.filter_spec,
                               request.magnon_convention, drive_port=port)
        filtered_e_n = log_negativity(out.V)
        fidelity = teleportation_fidelity(out.V)
        meta["filtered"] = out.meta

    return EntReport(stable=True, abscissa=model.abscissa, drive_port=port,
                     g_m_eff=steady.g_m_eff, e_n=e_n, r_min=r_min,
                     filtered_e_n=filtered_e_n, fidelity=fidelity,
                     physical=is_physical(cm.V), echo=echo, meta=meta)


def nonreciprocity_contrast(report_cw: EntReport, report_ccw: EntReport,
                            partition) -> float:
    """(E_cw - E_ccw)/(E_cw + E_ccw) for one partition, in [0, 1].

    1 for perfectly one-way entanglement (the exact chiral case), 0 for a
    direction-symmetric configuration or when both vanish.  The two reports
    must describe identical configurations up to the drive port.
    """
    if report_cw.echo != report_ccw.echo:
        raise ValueError("reports do not come from matching configurations")
    key = partition_key(partition) if not isinstance(partition, str) else partition
    table_cw = report_cw.e_n if key in report_cw.e_n else report_cw.r_min
    table_ccw = report_ccw.e_n if key in report_ccw.e_n else report_ccw.r_min
    e1, e2 = table_cw[key], table_ccw[key]
    if e1 + e2 == 0.0:
        return 0.0
    return (e1 - e2) / (e1 + e2)


# ---------------------------------------------------------------------------
# sweeps

def _set_delta_a(p, d, v):
    return p, Detunings(v, d.delta_m, d.delta_m_eff)


def _set_delta_m_eff(p, d, v):
    return p, Detunings(d.delta_a, v, v)


def _set_chi(p, d, v):
    return p.replace(g_ccw=v * p.g_cw), d


def _param_setter(name):
    def set_(p, d, v):
        return p.replace(**{name: v}), d
    return set_


def _set_gm_abs(p, d, v):
    return p.replace(drive=DriveSpec("gm_abs", v)), d


def _set_amplitude(p, d, v):
    return p.replace(drive=DriveSpec("amplitude", v)), d


def _set_power(p, d, v):
    return p.replace(drive=DriveSpec("power", v)), d


SWEEPABLE = {
    "delta_a": _set_delta_a,
    "delta_m_eff": _set_delta_m_eff,
    "chi": _set_chi,
    "J": _param_setter("J"),
    "g_cw": _param_setter("g_cw"),
    "g_ccw": _param_setter("g_ccw"),
    "kappa_a_e": _param_setter("kappa_a_e"),
    "kappa_a_i": _param_setter("kappa_a_i"),
    "kappa_m": _param_setter("kappa_m"),
    "gamma_b": _param_setter("gamma_b"),
    "temperature": _param_setter("temperature"),
    "omega_b": _param_setter("omega_b"),
    "gm_abs": _set_gm_abs,
    "amplitude": _set_amplitude,
    "power": _set_power,
}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    num: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class SweepSpec:
    """1-D or 2-D grid specification over named parameters."""

    axes: tuple
    drive_ports: tuple = (DRIVE_CW,)
    variant: str = VARIANT_IMPERFECT
    request: MeasureRequest = field(default_factory=MeasureRequest)

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("sweeps support 1 or 2 axes")
        for ax in self.axes:
            if ax.num < 2:
                raise ValueError(f"axis {ax.name!r} needs at least 2 points")
            if not (np.isfinite(ax.start) and np.isfinite(ax.stop)):
                raise ValueError(f"axis {ax.name!r} range must be finite")
            if ax.name not in SWEEPABLE:
                raise ValueError(f"unknown sweep variable {ax.name!r}; "
                                 f"choose from {sorted(SWEEPABLE)}")
        ports = tuple(self.drive_ports)
        if any(p not in (DRIVE_CW, DRIVE_CCW) for p in ports):
            raise ValueError("drive_ports must be cw/ccw")


@dataclass(frozen=True)
class SweepResult:
    columns: tuple
    rows: tuple          # tuples aligned with columns
    spec: SweepSpec


def _row_columns(spec: SweepSpec) -> tuple:
    cols = [ax.name for ax in spec.axes]
    cols += ["drive_port", "stable", "abs_g_m_eff"]
    cols += [f"en_{'_'.join(p)}" for p in spec.request.pairs]
    cols += [f"rmin_{'_'.join(t)}" for t in spec.request.triples]
    if spec.request.filter_spec is not None:
        cols += ["filtered_en", "fidelity"]
    cols += ["error"]
    return tuple(cols)


def _eval_row(task):
    params, det, spec, values, port = task
    row = list(values) + [port]
    try:
        rep = evaluate_point(params, det, spec.variant, port, spec.request)
        row += [int(rep.stable), abs(rep.g_m_eff)]
        for pair in spec.request.pairs:
            row.append(rep.e_n.get(partition_key(pair), np.nan))
        for tri in spec.request.triples:
            row.append(rep.r_min.get(partition_key(tri), np.nan))
        if spec.request.filter_spec is not None:
            row += [rep.filtered_e_n if rep.filtered_e_n is not None else np.nan,
                    rep.fidelity if rep.fidelity is not None else np.nan]
        row.append("")
    except Exception as exc:  # per-point failures stay in-row
        pad = len(_row_columns(spec)) - len(row) - 1
        row += [np.nan] * pad + [f"{type(exc).__name__}: {exc}"]
    return tuple(row)


def _tasks(params: SystemParams, det: Detunings, spec: SweepSpec):
    ports = sorted(spec.drive_ports, key=lambda p: p != DRIVE_CW)  # cw first
    axes_values = [ax.values() for ax in spec.axes]
    for values in itertools.product(*axes_values):
        p, d = params, det
        for ax, v in zip(spec.axes, values):
            p, d = SWEEPABLE[ax.name](p, d, float(v))
        for port in ports:
            yield (p, d, spec, tuple(float(v) for v in values), port)


def run_sweep(params: SystemParams, det: Detunings, spec: SweepSpec,
              workers: int = 1) -> SweepResult:
    """Evaluate the grid; deterministic row order regardless of worker count."""
    tasks = list(_tasks(params, det, spec))
    workers = min(workers, len(tasks))
    if workers <= 1:
        rows = [_eval_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_row, tasks, chunksize=16))
    return SweepResult(columns=_row_columns(spec), rows=tuple(rows), spec=spec)
