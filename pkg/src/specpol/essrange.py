"""Essential-numerical-range estimation from index-tail windows.

Vectors supported on far index tails are the finite surrogate for weakly
null unit sequences, so the numerical ranges of tail-window compressions
over-approximate less and less as the windows move out.  The estimator
accumulates, for each window start m_k, the hull of all windows from m_k on
(tail hull) and intersects these hulls; the stabilized intersection is the
reported estimate.  This computes a certified inner approximation of the
subspace-intersection characterization and is exact in the limit for banded
models with converging diagonals.

Also here: the selfadjoint interval formula, symbol-based regions for
constant-limit operators, the limiting essential range of a matrix sequence,
and finite-rank patching of models.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotStabilized, GridInsufficient, TooFewMatrices
from .linalg import ComplexMatrix
from .numrange import (
    Box,
    ConvexRegion,
    SupportFunction,
    angle_grid,
    hausdorff_clipped,
    hull,
    nr_boundary,
    region_from_support,
)
from .operators import OperatorModel, SymbolSpec, symbol_eval

STABILIZATION_TOL = 1e-3


@dataclass(frozen=True)
class WindowSchedule:
    """Window start indices, a common width, and the clip box for regions.

    A window with start m covers indices m .. m + width (inclusive), i.e.
    width + 1 coordinates.
    """

    starts: tuple[int, ...]
    width: int
    clip: Box

    def __post_init__(self):
        if len(self.starts) < 3:
            raise ValueError("need at least 3 windows")
        if any(b <= a for a, b in zip(self.starts, self.starts[1:])):
            raise ValueError("window starts must be strictly increasing")
        if self.width < 2:
            raise ValueError("window width must be at least 2")

    def windows(self) -> list[tuple[int, int]]:
        return [(m, m + self.width) for m in self.starts]


def default_schedule(op: OperatorModel, clip: Box) -> WindowSchedule:
    """Geometric window spread; block models get whole-block windows."""
    if op.kind == "block2x2":
        width_blocks = 16
        starts = tuple(2 * (width_blocks * 2 ** k) - 1 for k in range(1, 5))
        return WindowSchedule(starts, 2 * width_blocks - 1, clip)
    w = 64
    starts = tuple(max(op.index_origin, 2 ** k * w) for k in range(1, 5))
    return WindowSchedule(starts, w, clip)


@dataclass(frozen=True)
class EssRangeEstimate:
    """Per-window regions, tail hulls, their stabilized intersection."""

    window_starts: tuple[int, ...]
    window_regions: tuple[ConvexRegion, ...]
    tail_hulls: tuple[ConvexRegion, ...]
    intersections: tuple[ConvexRegion, ...]
    limit: ConvexRegion
    empty: bool
    increments: tuple[float | None, ...]
    stabilized: bool

    def to_json_dict(self) -> dict:
        return {
            "windows": [
                {"m": int(m), "region": r.to_json_dict()}
                for m, r in zip(self.window_starts, self.window_regions)
            ],
            "limit": self.limit.to_json_dict(),
            "empty": bool(self.empty),
            "increments": [None if i is None else float(i) for i in self.increments],
        }


def _window_region(op: OperatorModel, lo: int, hi: int, n_angles: int) -> ConvexRegion:
    mat = op.window(lo, hi)
    if op.kind == "diagonal":
        # normal compression: W equals the hull of the diagonal entries, exactly
        return hull(np.diag(mat.data))
    sf = nr_boundary(mat, n_angles)
    return hull(sf.boundary_points)


def _accumulate(regions: list[ConvexRegion], clip: Box, n_angles: int,
                stab_tol: float) -> tuple[list[ConvexRegion], list[ConvexRegion], list[float | None], bool]:
    """Suffix hulls of per-level regions, then prefix intersections of those."""
    k = len(regions)
    tail_points: list[np.ndarray] = [None] * k  # type: ignore[list-item]
    acc = None
    for j in range(k - 1, -1, -1):
        pts = regions[j].vertices
        acc = pts if acc is None else np.concatenate([acc, pts])
        tail_points[j] = acc
    tail_hulls = [hull(p) for p in tail_points]

    thetas = angle_grid(n_angles)
    running = np.full(n_angles, np.inf)
    intersections: list[ConvexRegion] = []
    for h in tail_hulls:
        dirs = np.exp(-1j * thetas)
        sup = (dirs[:, None] * h.vertices[None, :]).real.max(axis=1)
        running = np.minimum(running, sup)
        sf = SupportFunction(thetas, running.copy(), np.zeros(0, dtype=np.complex128))
        intersections.append(region_from_support(sf, clip))

    increments: list[float | None] = []
    for prev, cur in zip(intersections, intersections[1:]):
        if prev.empty and cur.empty:
            increments.append(0.0)
        elif prev.empty or cur.empty:
            increments.append(None)
        else:
            increments.append(hausdorff_clipped(prev, cur, clip))
    finite_tail = [i for i in increments[-2:] if i is not None]
    stabilized = bool(finite_tail) and max(finite_tail) <= stab_tol or not increments
    if increments and not stabilized:
        warnings.warn(
            f"tail intersection increments {increments[-2:]} exceed {stab_tol}",
            NotStabilized,
        )
    return tail_hulls, intersections, increments, stabilized


def estimate_essential_range(op: OperatorModel, sched: WindowSchedule | None = None,
                             clip: Box | None = None, n_angles: int = 720,
                             stab_tol: float = STABILIZATION_TOL) -> EssRangeEstimate:
    """Tail-window estimate of the essential numerical range of a model.

    Works for banded, diagonal and 2x2-block models.  The estimate is empty
    exactly when the stabilized tail-hull intersection misses the clip box.
    """
    if op.kind not in ("banded", "diagonal", "block2x2"):
        raise ValueError(f"estimator needs a banded/diagonal/block model, got {op.kind!r}")
    if sched is None:
        if clip is None:
            raise ValueError("pass a schedule or a clip box")
        sched = default_schedule(op, clip)
    regions = [_window_region(op, lo, hi, n_angles) for lo, hi in sched.windows()]
    tail_hulls, intersections, increments, stabilized = _accumulate(
        regions, sched.clip, n_angles, stab_tol)
    limit = intersections[-1]
    return EssRangeEstimate(
        window_starts=tuple(sched.starts),
        window_regions=tuple(regions),
        tail_hulls=tuple(tail_hulls),
        intersections=tuple(intersections),
        limit=limit,
        empty=limit.empty,
        increments=tuple(increments),
        stabilized=stabilized,
    )


def selfadjoint_essential_range(op: OperatorModel, sched: WindowSchedule) -> ConvexRegion:
    """Interval estimate for models with Hermitian windows.

    The tail limits of the extreme window eigenvalues give the endpoints;
    whatever escapes the clip box is cut at the box.
    """
    los, his = [], []
    for lo, hi in sched.windows():
        mat = op.window(lo, hi)
        if mat.hermitian_defect() > 1e-10:
            raise NotHermitian(f"window [{lo},{hi}] has defect {mat.hermitian_defect():.2e}")
        w = np.linalg.eigvalsh(mat.data)
        los.append(w[0])
        his.append(w[-1])
    los_arr, his_arr = np.array(los), np.array(his)
    k = los_arr.size
    tail_lo = np.array([los_arr[j:].min() for j in range(k)])
    tail_hi = np.array([his_arr[j:].max() for j in range(k)])
    lo_end = float(tail_lo.max())
    hi_end = float(tail_hi.min())
    re0, re1, _, _ = sched.clip
    seg_lo = max(lo_end, re0)
    seg_hi = min(hi_end, re1)
    thetas = angle_grid(720)
    if seg_lo > seg_hi:
        sf = SupportFunction(thetas, np.full(720, -np.inf), np.zeros(0, dtype=np.complex128))
        return ConvexRegion(sf, sched.clip, np.zeros(0, dtype=np.complex128), empty=True)
    ends = np.array([seg_lo, seg_hi], dtype=np.complex128)
    dirs = np.exp(-1j * thetas)
    support = (dirs[:, None] * ends[None, :]).real.max(axis=1)
    sf = SupportFunction(thetas, support, ends)
    verts = ends if seg_lo < seg_hi else ends[:1]
    return ConvexRegion(sf, sched.clip, verts, empty=False)


def symbol_essential_range(sym: SymbolSpec, xi_grid, clip: Box,
                           tol: float = 1e-6) -> ConvexRegion:
    """Clipped hull of the sampled limiting symbol.

    Raises GridInsufficient when doubling the grid extent moves the clipped
    hull by more than ``tol``.
    """
    xi = np.asarray(xi_grid, dtype=float)
    if xi.size < 8:
        raise ValueError("xi grid too small")
    if abs(xi.min() + xi.max()) > 1e-9 * (1 + abs(xi).max()):
        raise ValueError("xi grid must be symmetric about 0")

    def clipped_hull(grid: np.ndarray) -> ConvexRegion:
        vals = symbol_eval(sym, grid)
        return region_from_support(hull(vals).support, clip)

    region = clipped_hull(xi)
    step = xi[1] - xi[0] if xi.size > 1 else 1.0
    wide = np.arange(2 * xi.min(), 2 * xi.max() + step / 2, step)
    region_wide = clipped_hull(wide)
    if region.empty != region_wide.empty:
        raise GridInsufficient("clipped hull changed qualitatively under grid doubling")
    if not region.empty:
        moved = hausdorff_clipped(region, region_wide, clip)
        if moved > tol:
            raise GridInsufficient(f"clipped hull moved {moved:.2e} > {tol:.1e} under grid doubling")
    return region_wide


def limiting_essential_range(matrices, tail_fraction: float, clip: Box,
                             n_angles: int = 720,
                             stab_tol: float = STABILIZATION_TOL) -> EssRangeEstimate:
    """Limiting essential numerical range of a matrix sequence.

    For each matrix the compression to its trailing ceil(tail_fraction * dim)
    coordinates stands in for cross-sequence weakly null vectors; hulls are
    accumulated exactly as the window estimator accumulates over windows.
    """
    mats = [m if isinstance(m, ComplexMatrix) else ComplexMatrix(np.asarray(m)) for m in matrices]
    if len(mats) < 3:
        raise TooFewMatrices("need at least 3 matrices")
    dims = [m.rows for m in mats]
    if any(b < a for a, b in zip(dims, dims[1:])):
        raise ValueError("matrix dimensions must be nondecreasing")
    if not 0.0 < tail_fraction < 1.0:
        raise ValueError("tail_fraction must be in (0, 1)")
    regions = []
    for m in mats:
        k = int(np.ceil(tail_fraction * m.rows))
        sub = m.data[m.rows - k:, m.rows - k:]
        if np.count_nonzero(sub - np.diag(np.diag(sub))) == 0:
            regions.append(hull(np.diag(sub)))
        else:
            sf = nr_boundary(ComplexMatrix(sub), n_angles)
            regions.append(hull(sf.boundary_points))
    tail_hulls, intersections, increments, stabilized = _accumulate(regions, clip, n_angles, stab_tol)
    limit = intersections[-1]
    return EssRangeEstimate(
        window_starts=tuple(range(len(mats))),
        window_regions=tuple(regions),
        tail_hulls=tuple(tail_hulls),
        intersections=tuple(intersections),
        limit=limit,
        empty=limit.empty,
        increments=tuple(increments),
        stabilized=stabilized,
    )


def finite_rank_perturb(op: OperatorModel, patches) -> OperatorModel:
    """Model with finitely many entries replaced; bandwidth grows to cover them.

    ``patches`` is an iterable of (i, j, new_value).  Windows that do not meet
    any patched entry produce bit-identical matrices.
    """
    table = {(int(i), int(j)): complex(v) for i, j, v in patches}
    if not table:
        return op
    spread = max(abs(i - j) for i, j in table)
    base = op.entry

    def entry(i: int, j: int) -> complex:
        hit = table.get((i, j))
        if hit is not None:
            return hit
        if abs(i - j) > op.bandwidth:
            return 0.0
        return base(i, j)

    return OperatorModel(op.kind, entry, max(op.bandwidth, spread), op.index_origin,
                         op.adjoint_available, f"{op.label}+patch")
