"""Full-grid acquisition planning and AOM frequency mapping.

Voxels are visited in raster order (x fastest, then y, then z).  The
recurrent protocols batch voxels into cycles of at most the recurrent
readout count; the final partial cycle is costed with its true voxel
count.  The conventional protocol spends one full cycle per voxel.

Beam pointing is an affine map per axis: each scan/descan AOM channel
drives at f0 + slope * coordinate_um.  Descan slopes are typically
opposite in sign so the collected PL stays on the fixed pinhole; the map
is exactly invertible either way.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import DomainError
from .sequence import (CONVENTIONAL, LCQDM, LEIBOLD, PROTOCOLS, ProtocolParams,
                       build_conventional_cycle, build_lcqdm_cycle,
                       build_leibold_cycle, recurrent_count_lcqdm,
                       recurrent_count_leibold)


@dataclass(frozen=True)
class VoxelGrid:
    nx: int
    ny: int
    nz: int
    pitch: float  # um per axis

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise DomainError("grid dimensions must be >= 1")
        if self.pitch <= 0:
            raise DomainError(f"pitch must be positive, got {self.pitch}")

    @property
    def n_voxels(self) -> int:
        return self.nx * self.ny * self.nz

    def coords(self, flat_index: int) -> tuple[int, int, int]:
        """Raster-order (ix, iy, iz) for a flat index."""
        if not 0 <= flat_index < self.n_voxels:
            raise IndexError(f"voxel index {flat_index} outside grid")
        ix = flat_index % self.nx
        iy = (flat_index // self.nx) % self.ny
        iz = flat_index // (self.nx * self.ny)
        return ix, iy, iz


@dataclass(frozen=True)
class AOMAxis:
    f0: float     # MHz at the grid origin
    slope: float  # MHz per um

    def __post_init__(self):
        if self.slope == 0:
            raise DomainError("AOM slope must be nonzero")
        if self.f0 <= 0:
            raise DomainError(f"AOM base frequency must be positive, got {self.f0}")


@dataclass(frozen=True)
class AOMCalibration:
    scan_x: AOMAxis
    scan_y: AOMAxis
    descan_x: AOMAxis
    descan_y: AOMAxis

    def check_grid(self, grid: VoxelGrid) -> None:
        """Every drive frequency must stay positive across the grid."""
        for name, axis, extent in (("scan_x", self.scan_x, grid.nx),
                                   ("scan_y", self.scan_y, grid.ny),
                                   ("descan_x", self.descan_x, grid.nx),
                                   ("descan_y", self.descan_y, grid.ny)):
            worst = axis.f0 + axis.slope * (extent - 1) * grid.pitch
            if worst <= 0 or axis.f0 <= 0:
                raise DomainError(
                    f"AOM channel {name} drives a non-positive frequency "
                    f"({worst:.4g} MHz) inside the grid")


def rf_for_voxel(voxel: tuple[int, int, int], grid: VoxelGrid,
                 cal: AOMCalibration) -> tuple[float, float, float, float]:
    """Drive frequencies (f_sx, f_sy, f_dx, f_dy) in MHz for one voxel."""
    ix, iy, iz = voxel
    if not (0 <= ix < grid.nx and 0 <= iy < grid.ny and 0 <= iz < grid.nz):
        raise IndexError(f"voxel {voxel} outside grid")
    x_um = ix * grid.pitch
    y_um = iy * grid.pitch
    return (cal.scan_x.f0 + cal.scan_x.slope * x_um,
            cal.scan_y.f0 + cal.scan_y.slope * y_um,
            cal.descan_x.f0 + cal.descan_x.slope * x_um,
            cal.descan_y.f0 + cal.descan_y.slope * y_um)


def voxel_for_rf(freqs: tuple[float, float, float, float], grid: VoxelGrid,
                 cal: AOMCalibration, iz: int = 0) -> tuple[int, int, int]:
    """Invert rf_for_voxel from the scan-channel frequencies."""
    f_sx, f_sy, _, _ = freqs
    ix = round((f_sx - cal.scan_x.f0) / cal.scan_x.slope / grid.pitch)
    iy = round((f_sy - cal.scan_y.f0) / cal.scan_y.slope / grid.pitch)
    if not (0 <= ix < grid.nx and 0 <= iy < grid.ny):
        raise IndexError(f"frequencies {freqs} map outside the grid")
    return ix, iy, iz


@dataclass(frozen=True)
class PlannedCycle:
    voxel_start: int   # first flat voxel index, inclusive
    voxel_end: int     # last flat voxel index, inclusive
    start: float       # us
    duration: float    # us


@dataclass(frozen=True)
class ScanPlan:
    protocol_tag: str
    grid: VoxelGrid
    cycles: tuple[PlannedCycle, ...]
    total_time: float  # us, end of the last cycle
    rf_schedule: Optional[tuple[tuple[int, int, int, float, float, float, float], ...]]

    def cycles_csv(self) -> str:
        lines = ["cycle,voxel_start,voxel_end,start_us,duration_us"]
        for i, c in enumerate(self.cycles):
            lines.append(f"{i},{c.voxel_start},{c.voxel_end},"
                         f"{float(c.start)!r},{float(c.duration)!r}")
        return "\n".join(lines) + "\n"

    def rf_csv(self) -> str:
        if self.rf_schedule is None:
            raise DomainError("plan was built without an AOM calibration")
        lines = ["voxel_x,voxel_y,voxel_z,f_sx_mhz,f_sy_mhz,f_dx_mhz,f_dy_mhz"]
        for ix, iy, iz, fsx, fsy, fdx, fdy in self.rf_schedule:
            lines.append(f"{ix},{iy},{iz},{fsx!r},{fsy!r},{fdx!r},{fdy!r}")
        return "\n".join(lines) + "\n"


def _cycle_layout(protocol_tag: str, p: ProtocolParams
                  ) -> tuple[int, float, float]:
    """(max voxels per cycle, per-cycle overhead us, per-voxel slot us)."""
    if protocol_tag == LCQDM:
        return (recurrent_count_lcqdm(p), p.t_init_ls + p.t_mw,
                p.t_ro_conf + p.t_d)
    if protocol_tag == LEIBOLD:
        return (recurrent_count_leibold(p), p.t_mw,
                p.t_ro_conf + p.t_init_conf + p.t_d)
    if protocol_tag == CONVENTIONAL:
        return (1, p.t_init_conf + p.t_mw, p.t_ro_conf + p.t_d)
    raise DomainError(f"unknown protocol {protocol_tag!r}; expected one of {PROTOCOLS}")


def plan_acquisition(grid: VoxelGrid, p: ProtocolParams, protocol_tag: str,
                     cal: Optional[AOMCalibration] = None,
                     t_z_step: Optional[float] = None) -> ScanPlan:
    """Schedule every voxel of the grid once under the given protocol.

    t_z_step, when given, replaces the dead time after each readout whose
    successor voxel sits on a different z plane (focus translation);
    default is the ordinary steering dead time.
    """
    batch, overhead, slot = _cycle_layout(protocol_tag, p)
    n = grid.n_voxels
    extra_z = 0.0 if t_z_step is None else t_z_step - p.t_d
    if t_z_step is not None and t_z_step < 0:
        raise DomainError(f"t_z_step must be >= 0, got {t_z_step}")

    cycles = []
    start = 0.0
    v = 0
    plane = grid.nx * grid.ny
    while v < n:
        count = min(batch, n - v)
        dur = overhead + count * slot
        if extra_z:
            z_crossings = sum(
                1 for u in range(v, v + count)
                if u + 1 < n and (u + 1) // plane != u // plane)
            dur += extra_z * z_crossings
        cycles.append(PlannedCycle(v, v + count - 1, start, dur))
        start += dur
        v += count

    schedule = None
    if cal is not None:
        cal.check_grid(grid)
        schedule = tuple(
            (*grid.coords(i), *rf_for_voxel(grid.coords(i), grid, cal))
            for i in range(n))
    return ScanPlan(protocol_tag, grid, tuple(cycles), start, schedule)


@dataclass(frozen=True)
class SpeedupReport:
    total_lcqdm: float
    total_leibold: float
    total_conventional: float
    conventional_over_lcqdm: float
    leibold_over_lcqdm: float


def speedup_report(grid: VoxelGrid, p: ProtocolParams) -> SpeedupReport:
    """Total-time ratios of the slower protocols against the light-sheet one."""
    totals = {tag: plan_acquisition(grid, p, tag).total_time for tag in PROTOCOLS}
    return SpeedupReport(
        totals[LCQDM], totals[LEIBOLD], totals[CONVENTIONAL],
        totals[CONVENTIONAL] / totals[LCQDM],
        totals[LEIBOLD] / totals[LCQDM])


def cycle_span_by_events(protocol_tag: str, p: ProtocolParams,
                         n_voxels: int) -> float:
    """Span of one cycle measured from its built event timeline.

    Independent cross-check of the closed-form cycle costing used by
    plan_acquisition.
    """
    if protocol_tag == LCQDM:
        return build_lcqdm_cycle(p, n_voxels).span()
    if protocol_tag == LEIBOLD:
        return build_leibold_cycle(p, n_voxels).span()
    if protocol_tag == CONVENTIONAL:
        if n_voxels != 1:
            raise DomainError("conventional cycles hold exactly one voxel")
        return build_conventional_cycle(p).span()
    raise DomainError(f"unknown protocol {protocol_tag!r}")
