"""Per-voxel sensitivity of the three protocols and the comparison sweep.

Sensitivity eta = sqrt(t) / SNR, in sqrt(us) with the readout SNR
normalized to 1 at the start of spin relaxation; smaller is better.  With
the recurrent protocols the initialization and MW overhead amortizes over
every readout that fits in t1, and the SNR averaged between the first and
last readout contributes the prefactor 2 / (1 + 1/e):

    eta_lcqdm        = 2/(1+1/e) * sqrt((t_init_ls + t_mw + t1) * (t_ro + t_d) / t1)
    eta_leibold      = 2/(1+1/e) * sqrt((t_mw + t1) * (t_ro + t_init_conf + t_d) / t1)
    eta_conventional = sqrt(t_mw + t_ro + t_init_conf + t_d)

The sweep evaluates all three over an (I_conf, t_mw) grid, deriving the
laser timescales from a photophysics model, which reproduces the
characteristic comparison maps of the protocols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError, OutOfRangeError
from .photophysics import PhotophysicsModel, init_time, readout_time
from .sequence import ProtocolParams

#: Average of the first and last recurrent-readout SNR, 2 / (1 + e^-1).
RECURRENT_SNR_PREFACTOR = 2.0 / (1.0 + math.exp(-1.0))

CSV_HEADER = ("i_conf_mw_per_um2,t_mw_us,eta_lc,eta_leibold,eta_conv,"
              "ratio_leibold_lc,ratio_conv_lc,valid")


def eta_lcqdm(p: ProtocolParams) -> float:
    """Sensitivity of the light-sheet protocol with recurrent readout, sqrt(us)."""
    slot = p.t_ro_conf + p.t_d
    if slot <= 0:
        raise DomainError("t_ro_conf + t_d must be positive")
    return RECURRENT_SNR_PREFACTOR * math.sqrt(
        (p.t_init_ls + p.t_mw + p.t1) * slot / p.t1)


def eta_leibold(p: ProtocolParams) -> float:
    """Sensitivity of the recurrent readout+reinitialization protocol, sqrt(us)."""
    slot = p.t_ro_conf + p.t_init_conf + p.t_d
    if slot <= 0:
        raise DomainError("t_ro_conf + t_init_conf + t_d must be positive")
    return RECURRENT_SNR_PREFACTOR * math.sqrt((p.t_mw + p.t1) * slot / p.t1)


def eta_conventional(p: ProtocolParams) -> float:
    """Sensitivity of the single-readout-per-cycle protocol, sqrt(us)."""
    return math.sqrt(p.t_mw + p.t_ro_conf + p.t_init_conf + p.t_d)


def time_reduction_factor(eta_ratio: float) -> float:
    """Measurement-time ratio at equal SNR for a given sensitivity ratio.

    eta scales as sqrt(t) at fixed SNR, so a sensitivity improvement of r
    shortens the measurement by r**2.
    """
    return eta_ratio * eta_ratio


@dataclass(frozen=True)
class SensitivityResult:
    eta_lcqdm: float
    eta_leibold: float
    eta_conventional: float
    ratio_leibold_over_lc: float
    ratio_conv_over_lc: float

    def __post_init__(self):
        for name in ("eta_lcqdm", "eta_leibold", "eta_conventional"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")

    @classmethod
    def from_etas(cls, lc: float, leibold: float, conventional: float
                  ) -> "SensitivityResult":
        return cls(lc, leibold, conventional, leibold / lc, conventional / lc)


def evaluate_point(model: PhotophysicsModel, i_conf: float, t_mw: float,
                   i_ls: float, t1: float, t_d: float) -> SensitivityResult:
    """All three sensitivities at one (I_conf, t_mw) point.

    Laser timescales come from the model; the light-sheet initialization uses
    the same fitted init curve as the confocal beam.
    """
    p = ProtocolParams(
        t_init_ls=init_time(model, i_ls),
        t_init_conf=init_time(model, i_conf),
        t_ro_conf=readout_time(model, i_conf),
        t_mw=t_mw, t_d=t_d, t1=t1)
    return SensitivityResult.from_etas(
        eta_lcqdm(p), eta_leibold(p), eta_conventional(p))


@dataclass(frozen=True)
class SweepSpec:
    """Grid specification for the (I_conf, t_mw) comparison sweep."""

    i_conf_grid: tuple[float, ...]
    t_mw_grid: tuple[float, ...]
    i_ls: float
    model: PhotophysicsModel
    t1: float
    t_d: float

    def __post_init__(self):
        _require_increasing("i_conf_grid", self.i_conf_grid)
        _require_increasing("t_mw_grid", self.t_mw_grid)
        if self.t1 <= 0:
            raise DomainError(f"t1 must be positive, got {self.t1}")
        if self.t_d < 0:
            raise DomainError(f"t_d must be >= 0, got {self.t_d}")
        # Fails fast if i_ls is outside the model's fitted window.
        init_time(self.model, self.i_ls)


def _require_increasing(name: str, grid: tuple[float, ...]) -> None:
    if not grid:
        raise DomainError(f"{name} must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError(f"{name} must be strictly increasing")


def log_grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    """n log-spaced points from lo to hi inclusive."""
    if not (0 < lo < hi) or n < 1:
        raise DomainError(f"bad grid request lo={lo}, hi={hi}, n={n}")
    if n == 1:
        return (lo,)
    la, lb = math.log10(lo), math.log10(hi)
    return tuple(10.0 ** (la + (lb - la) * k / (n - 1)) for k in range(n))


@dataclass(frozen=True)
class SensitivityGrid:
    """Sweep output: cells[row][col] indexed (t_mw index, i_conf index).

    Cells where the intensity fell outside the model validity range are None,
    with the reason kept in cell_errors.
    """

    spec: SweepSpec
    cells: tuple[tuple[Optional[SensitivityResult], ...], ...]
    cell_errors: tuple[tuple[int, int, str], ...]

    @property
    def n_valid(self) -> int:
        return sum(1 for row in self.cells for c in row if c is not None)

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for r, t_mw in enumerate(self.spec.t_mw_grid):
            for c, i_conf in enumerate(self.spec.i_conf_grid):
                cell = self.cells[r][c]
                if cell is None:
                    vals = ["nan"] * 5 + ["0"]
                else:
                    vals = [str(float(cell.eta_lcqdm)),
                            str(float(cell.eta_leibold)),
                            str(float(cell.eta_conventional)),
                            str(float(cell.ratio_leibold_over_lc)),
                            str(float(cell.ratio_conv_over_lc)),
                            "1"]
                lines.append(",".join([str(float(i_conf)), str(float(t_mw))] + vals))
        return "\n".join(lines) + "\n"

    def to_pgm(self, which: str = "conv_lc") -> str:
        """ASCII portable graymap (P2) of log10 of a ratio map.

        which is "conv_lc" or "leibold_lc".  Valid cells scale linearly from
        the map minimum (black) to maximum (white); invalid cells are black.
        """
        if which not in ("conv_lc", "leibold_lc"):
            raise DomainError(f"unknown ratio map {which!r}")
        pick = (lambda c: c.ratio_conv_over_lc) if which == "conv_lc" else (
            lambda c: c.ratio_leibold_over_lc)
        logs = [[math.log10(pick(c)) if c is not None else None for c in row]
                for row in self.cells]
        finite = [v for row in logs for v in row if v is not None]
        lo = min(finite) if finite else 0.0
        hi = max(finite) if finite else 1.0
        scale = 255.0 / (hi - lo) if hi > lo else 0.0
        rows = []
        for row in logs:
            rows.append(" ".join(
                "0" if v is None else str(int(round((v - lo) * scale)))
                for v in row))
        w = len(self.spec.i_conf_grid)
        h = len(self.spec.t_mw_grid)
        return f"P2\n{w} {h}\n255\n" + "\n".join(rows) + "\n"


def sweep(spec: SweepSpec) -> SensitivityGrid:
    """Evaluate the sensitivity comparison over the full grid.

    Every cell is a pure function of the spec, so the output is identical
    no matter how the cells are scheduled.  Out-of-range intensities mark
    the cell invalid and the sweep continues.
    """
    rows = []
    errors = []
    for r, t_mw in enumerate(spec.t_mw_grid):
        row: list[Optional[SensitivityResult]] = []
        for c, i_conf in enumerate(spec.i_conf_grid):
            try:
                row.append(evaluate_point(
                    spec.model, i_conf, t_mw, spec.i_ls, spec.t1, spec.t_d))
            except OutOfRangeError as exc:
                row.append(None)
                errors.append((r, c, str(exc)))
        rows.append(tuple(row))
    return SensitivityGrid(spec, tuple(rows), tuple(errors))
