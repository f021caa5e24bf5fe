"""Numerical range as a support-function region, plus the inverse problem.

The numerical range W(M) of a square complex matrix is convex, so it is fully
described by its support function s(theta) = max Re(e^{-i theta} <Mx, x>).
For each angle the maximizer is the top eigenvector of the Hermitian part of
e^{-i theta} M, which doubles as a boundary witness.

``attain`` solves the inverse problem: given z in W(M), produce a unit vector
x with <Mx, x> = z, by triangulating z between three boundary witnesses and
reducing twice through 2x2 compressions (chord bisection on each reduction).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EmptyRegion, NoWitness, OutsideRange
from .linalg import UnitVector, _as_array

DEFAULT_ANGLES = 720
Box = tuple[float, float, float, float]  # (re_min, re_max, im_min, im_max)

DEFAULT_CLIP: Box = (-100.0, 100.0, -100.0, 100.0)


def angle_grid(n_angles: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_angles) / n_angles


@dataclass(frozen=True)
class SupportFunction:
    """Sampled support values of a convex set on the grid theta_j = 2 pi j / N."""

    angles: np.ndarray
    support: np.ndarray
    boundary_points: np.ndarray
    witnesses: tuple[UnitVector, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "angles", np.asarray(self.angles, dtype=np.float64))
        object.__setattr__(self, "support", np.asarray(self.support, dtype=np.float64))
        object.__setattr__(self, "boundary_points", np.asarray(self.boundary_points, dtype=np.complex128))

    @property
    def n_angles(self) -> int:
        return self.angles.size


@dataclass(frozen=True)
class ConvexRegion:
    """Closed convex subset of C: support half-planes, clip box, clipped polygon."""

    support: SupportFunction
    clip_box: Box
    vertices: np.ndarray  # complex, counterclockwise
    empty: bool

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=np.complex128))

    def to_json_dict(self) -> dict:
        sup = [None if not np.isfinite(s) else float(s) for s in self.support.support]
        return {
            "angles": [float(a) for a in self.support.angles],
            "support": sup,
            "clip": [float(c) for c in self.clip_box],
            "vertices": [[float(v.real), float(v.imag)] for v in self.vertices],
            "empty": bool(self.empty),
        }


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SPECPOL_THREADS", "1")))
    except ValueError:
        return 1


def _boundary_at_pair(a: np.ndarray, theta: float):
    """Support data at theta and theta + pi from one Hermitian eigensolve."""
    rot = np.exp(-1j * theta) * a
    H = (rot + rot.conj().T) / 2.0
    w, V = np.linalg.eigh(H)
    top = V[:, -1]
    bot = V[:, 0]
    return (
        float(w[-1]), complex(np.vdot(top, a @ top)), top,
        float(-w[0]), complex(np.vdot(bot, a @ bot)), bot,
    )


def _nr_boundary_2x2(a: np.ndarray, thetas: np.ndarray) -> SupportFunction:
    """Closed-form support data for 2x2 matrices, vectorized over all angles."""
    rot = np.exp(-1j * thetas)[:, None, None] * a[None, :, :]
    H = (rot + rot.conj().transpose(0, 2, 1)) / 2.0
    p = H[:, 0, 0].real
    r = H[:, 1, 1].real
    q = H[:, 0, 1]
    mean = (p + r) / 2.0
    gap = np.sqrt(((p - r) / 2.0) ** 2 + np.abs(q) ** 2)
    support = mean + gap
    v = np.empty((thetas.size, 2), dtype=np.complex128)
    small = np.abs(q) <= 1e-300
    v[:, 0] = np.where(small, np.where(p >= r, 1.0, 0.0), q)
    v[:, 1] = np.where(small, np.where(p >= r, 0.0, 1.0), support - p)
    v /= np.linalg.norm(v, axis=1)[:, None]
    points = np.einsum("ti,ij,tj->t", v.conj(), a, v)
    witnesses = tuple(UnitVector.normalized(v[t]) for t in range(thetas.size))
    return SupportFunction(thetas, support, points, witnesses)


def nr_boundary(M, n_angles: int = DEFAULT_ANGLES, tol: float = 1e-9) -> SupportFunction:
    """Support function, boundary points and witnesses of W(M).

    For each grid angle theta the Hermitian part of e^{-i theta} M is
    diagonalized; its top eigenpair gives the support value and the witness.
    Opposite angles share one eigensolve; 2x2 inputs use the closed form.
    """
    if n_angles < 8:
        raise ValueError("n_angles must be at least 8")
    a = _as_array(M)
    if a.shape[0] != a.shape[1]:
        raise ValueError("numerical range requires a square matrix")
    thetas = angle_grid(n_angles)
    if a.shape[0] == 2:
        return _nr_boundary_2x2(a, thetas)
    support = np.empty(n_angles)
    points = np.empty(n_angles, dtype=np.complex128)
    wit: list[np.ndarray | None] = [None] * n_angles

    half = n_angles // 2
    paired = n_angles % 2 == 0

    def work(j: int):
        s1, p1, v1, s2, p2, v2 = _boundary_at_pair(a, thetas[j])
        support[j] = s1
        points[j] = p1
        wit[j] = v1
        if paired and j + half < n_angles:
            support[j + half] = s2
            points[j + half] = p2
            wit[j + half] = v2

    indices = range(half if paired else n_angles)
    nthreads = _thread_count()
    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(work, indices))
    else:
        for j in indices:
            work(j)
    witnesses = tuple(UnitVector.normalized(v) for v in wit)
    return SupportFunction(thetas, support, points, witnesses)


# ---------------------------------------------------------------------------
# polygon machinery (half-plane clipping, hulls, distances)
# ---------------------------------------------------------------------------

def _box_polygon(box: Box) -> np.ndarray:
    re0, re1, im0, im1 = box
    return np.array([re0 + 1j * im0, re1 + 1j * im0, re1 + 1j * im1, re0 + 1j * im1])


def _clip_halfplane(poly: np.ndarray, direction: complex, bound: float) -> np.ndarray:
    """Sutherland-Hodgman step: keep {z : Re(conj(direction) z) <= bound}."""
    if poly.size == 0:
        return poly
    vals = (poly * np.conj(direction)).real
    eps = 1e-12 * (1.0 + np.abs(poly).max() + abs(bound))
    out: list[complex] = []
    n = poly.size
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        vc, vn = vals[i], vals[(i + 1) % n]
        cur_in = vc <= bound + eps
        nxt_in = vn <= bound + eps
        if cur_in:
            out.append(cur)
        if cur_in != nxt_in:
            t = (bound - vc) / (vn - vc)
            out.append(cur + t * (nxt - cur))
    return np.array(out, dtype=np.complex128)


def _dedupe_ring(poly: np.ndarray) -> np.ndarray:
    if poly.size == 0:
        return poly
    scale = 1.0 + np.abs(poly).max()
    keep = [poly[0]]
    for z in poly[1:]:
        if abs(z - keep[-1]) > 1e-12 * scale:
            keep.append(z)
    if len(keep) > 1 and abs(keep[0] - keep[-1]) <= 1e-12 * scale:
        keep.pop()
    return np.array(keep, dtype=np.complex128)


def region_from_support(sf: SupportFunction, clip: Box) -> ConvexRegion:
    """Clipped polygon of the half-plane intersection of a support function.

    An empty intersection inside the clip box is a valid outcome and sets the
    ``empty`` flag.
    """
    if np.isneginf(sf.support).any():
        return ConvexRegion(sf, clip, np.zeros(0, dtype=np.complex128), empty=True)
    poly = _box_polygon(clip)
    for theta, s in zip(sf.angles, sf.support):
        if not np.isfinite(s):
            continue  # +inf: no constraint in this direction
        poly = _clip_halfplane(poly, np.exp(1j * theta), float(s))
        if poly.size == 0:
            break
    poly = _dedupe_ring(poly)
    return ConvexRegion(sf, clip, poly, empty=poly.size == 0)


def hull(points) -> ConvexRegion:
    """Convex hull (monotone chain) of finite points, as a ConvexRegion.

    Hull vertices are input points verbatim, so exact coordinates survive.
    Collinear inputs produce degenerate (segment or single-point) polygons.
    """
    pts = np.asarray(points, dtype=np.complex128).ravel()
    if pts.size < 1:
        raise ValueError("hull needs at least one point")
    if not np.isfinite(pts).all():
        raise ValueError("hull points must be finite")
    verts = _monotone_chain(pts)
    thetas = angle_grid(DEFAULT_ANGLES)
    dirs = np.exp(-1j * thetas)
    support = (dirs[:, None] * verts[None, :]).real.max(axis=1)
    bpoints = verts[(dirs[:, None] * verts[None, :]).real.argmax(axis=1)]
    box = (float(pts.real.min()), float(pts.real.max()), float(pts.imag.min()), float(pts.imag.max()))
    sf = SupportFunction(thetas, support, bpoints)
    return ConvexRegion(sf, box, verts, empty=False)


def _monotone_chain(pts: np.ndarray) -> np.ndarray:
    order = np.lexsort((pts.imag, pts.real))
    p = pts[order]
    uniq = [p[0]]
    for z in p[1:]:
        if z != uniq[-1]:
            uniq.append(z)
    p = np.array(uniq)
    if p.size <= 2:
        return p

    def cross(o, a, b):
        return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)

    lower: list[complex] = []
    for z in p:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], z) <= 0:
            lower.pop()
        lower.append(z)
    upper: list[complex] = []
    for z in p[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], z) <= 0:
            upper.pop()
        upper.append(z)
    ring = lower[:-1] + upper[:-1]
    return np.array(ring, dtype=np.complex128)


def contains(R: ConvexRegion, z: complex, tol: float = 1e-9) -> bool:
    """Membership via the support half-planes and the clip box."""
    if R.empty or np.isneginf(R.support.support).any():
        return False
    re0, re1, im0, im1 = R.clip_box
    if not (re0 - tol <= z.real <= re1 + tol and im0 - tol <= z.imag <= im1 + tol):
        return False
    finite = np.isfinite(R.support.support)
    proj = (np.exp(-1j * R.support.angles[finite]) * z).real
    return bool((proj <= R.support.support[finite] + tol).all())


def _point_segment_distance(z: complex, a: complex, b: complex) -> float:
    d = b - a
    L2 = (d * d.conjugate()).real
    if L2 == 0.0:
        return abs(z - a)
    t = ((z - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(z - (a + t * d))


def polygon_distance(z: complex, vertices: np.ndarray) -> float:
    """Distance from z to a convex polygon (0 when inside)."""
    v = np.asarray(vertices, dtype=np.complex128).ravel()
    if v.size == 0:
        raise EmptyRegion("distance to an empty polygon")
    if v.size == 1:
        return abs(z - v[0])
    if v.size == 2:
        return _point_segment_distance(z, v[0], v[1])
    a = v
    b = np.roll(v, -1)
    d = b - a
    scale = 1.0 + np.abs(v).max() + abs(z)
    cross = d.real * (z - a).imag - d.imag * (z - a).real
    if (cross >= -1e-12 * scale).all():
        return 0.0
    L2 = (d * d.conj()).real
    t = np.divide(((z - a) * d.conj()).real, L2, out=np.zeros_like(L2), where=L2 > 0)
    t = np.clip(t, 0.0, 1.0)
    proj = a + t * d
    return float(np.abs(z - proj).min())


def region_distance(R: ConvexRegion, z: complex) -> float:
    if R.empty:
        raise EmptyRegion("distance to an empty region")
    return polygon_distance(z, R.vertices)


def _clip_to_box(vertices: np.ndarray, box: Box) -> np.ndarray:
    poly = vertices
    if poly.size == 0:
        return poly
    if poly.size in (1, 2):
        # degenerate: clip the segment/point against box half-planes directly
        for direction, bound in (((1 + 0j), box[1]), ((-1 + 0j), -box[0]), (1j, box[3]), (-1j, -box[2])):
            poly = _clip_halfplane(poly, direction, bound)
            if poly.size == 0:
                return poly
        return _dedupe_ring(poly)
    for direction, bound in (((1 + 0j), box[1]), ((-1 + 0j), -box[0]), (1j, box[3]), (-1j, -box[2])):
        poly = _clip_halfplane(poly, direction, bound)
        if poly.size == 0:
            return poly
    return _dedupe_ring(poly)


def hausdorff_clipped(R1: ConvexRegion, R2: ConvexRegion, box: Box) -> float:
    """Symmetric Hausdorff distance of two regions clipped to a common box.

    For convex polygons the supremum of the distance function is attained at
    vertices, so vertex-to-polygon maximization in both directions is exact.
    """
    if R1.empty or R2.empty:
        raise EmptyRegion("hausdorff distance needs nonempty regions")
    p1 = _clip_to_box(R1.vertices, box)
    p2 = _clip_to_box(R2.vertices, box)
    if p1.size == 0 or p2.size == 0:
        raise EmptyRegion("region does not intersect the clip box")
    d12 = max(polygon_distance(z, p2) for z in p1)
    d21 = max(polygon_distance(z, p1) for z in p2)
    return max(d12, d21)


# ---------------------------------------------------------------------------
# attain: inverse numerical-range problem
# ---------------------------------------------------------------------------

def _eig2(B: np.ndarray) -> tuple[complex, complex]:
    tr = B[0, 0] + B[1, 1]
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    disc = np.sqrt(tr * tr / 4.0 - det + 0j)
    return complex(tr / 2 + disc), complex(tr / 2 - disc)


def _chord_solve(B: np.ndarray, q1: np.ndarray, q2: np.ndarray, target: complex) -> np.ndarray:
    """Unit y = cos(t) q1 + e^{i phi} sin(t) q2 with <By, y> = target.

    q1, q2 must be orthonormal in the coordinates of B and the target must lie
    on the segment between their two Rayleigh values.  phi is fixed by a
    bisection making the cross term parallel to the chord; then t is fixed by
    a second bisection along the chord.
    """
    z1 = complex(np.vdot(q1, B @ q1))
    z2 = complex(np.vdot(q2, B @ q2))
    beta = complex(np.vdot(q1, B @ q2))   # <B q2, q1>
    gamma = complex(np.vdot(q2, B @ q1))  # <B q1, q2>
    d = z2 - z1
    if abs(d) < 1e-15 * (1.0 + abs(z1)):
        return q1
    lam = ((target - z1) * d.conjugate()).real / abs(d) ** 2
    lam = min(1.0, max(0.0, lam))

    def g(phi: float) -> float:
        c = np.exp(1j * phi) * beta + np.exp(-1j * phi) * gamma
        return (c / d).imag

    # g(phi + pi) = -g(phi), so a sign change always exists on a half period
    phis = np.linspace(0.0, np.pi, 65)
    vals = [g(p) for p in phis]
    phi_lo, phi_hi = 0.0, np.pi
    for i in range(len(phis) - 1):
        if vals[i] == 0.0:
            phi_lo = phi_hi = phis[i]
            break
        if vals[i] * vals[i + 1] <= 0.0:
            phi_lo, phi_hi = phis[i], phis[i + 1]
            break
    else:
        phi_lo = phi_hi = phis[int(np.argmin(np.abs(vals)))]
    for _ in range(80):
        if phi_hi == phi_lo:
            break
        mid = 0.5 * (phi_lo + phi_hi)
        if g(phi_lo) * g(mid) <= 0.0:
            phi_hi = mid
        else:
            phi_lo = mid
    phi = 0.5 * (phi_lo + phi_hi)
    r = ((np.exp(1j * phi) * beta + np.exp(-1j * phi) * gamma) / d).real

    def mu(t: float) -> float:
        return np.sin(t) ** 2 + r * np.sin(t) * np.cos(t) - lam

    t_lo, t_hi = 0.0, np.pi / 2
    for _ in range(80):
        mid = 0.5 * (t_lo + t_hi)
        if mu(t_lo) * mu(mid) <= 0.0:
            t_hi = mid
        else:
            t_lo = mid
    t = 0.5 * (t_lo + t_hi)
    return np.cos(t) * q1 + np.exp(1j * phi) * np.sin(t) * q2


def _attain_2d(a: np.ndarray, va: np.ndarray, vb: np.ndarray, target: complex) -> np.ndarray:
    """Unit vector in span{va, vb} attaining target in W of the 2x2 compression.

    Uses the central symmetry of 2x2 numerical ranges: W(B2) is an ellipse
    around trace/2, so the chord of opposite support points through the
    target's direction from the center contains the target.
    """
    q1 = va / np.linalg.norm(va)
    w = vb - np.vdot(q1, vb) * q1
    nw = np.linalg.norm(w)
    if nw < 1e-13:
        return q1
    q2 = w / nw
    Q = np.column_stack([q1, q2])
    B2 = Q.conj().T @ a @ Q
    lam1, lam2 = _eig2(B2)
    center = (B2[0, 0] + B2[1, 1]) / 2.0
    scale = 1.0 + abs(lam1) + abs(lam2)
    # minor semi-axis of the elliptical range, via singular values of the
    # centered matrix: stable where the difference-of-squares formula cancels
    s_vals = np.linalg.svd(B2 - center * np.eye(2), compute_uv=False)
    minor = (s_vals[0] - s_vals[1]) / 2.0

    if minor <= 1e-12 * scale:
        # degenerate ellipse: W(B2) is the segment [lam1, lam2]; eigenvectors
        # of a normal 2x2 are orthogonal, so the chord solve applies directly
        e1, e2 = _eig2_vectors(B2, lam1, lam2)
        y = _chord_solve(B2, e1, e2, target)
    else:
        # W(B2) is the ellipse with center tr/2, foci lam1/lam2 and semi-axes
        # (s1 +- s2)/2; the support angle whose opposite-witness chord passes
        # through the target follows in closed form (no search needed)
        direction = target - center
        if abs(direction) <= 1e-14 * scale:
            th = 0.0
        else:
            gap = lam1 - lam2
            u = gap / abs(gap) if abs(gap) > 1e-14 * scale else 1.0 + 0j
            major = (s_vals[0] + s_vals[1]) / 2.0
            xi = (direction / u).real
            eta = (direction / u).imag
            rho = 1.0 / np.sqrt((xi / major) ** 2 + (eta / minor) ** 2)
            normal = u * complex(rho * xi / major ** 2, rho * eta / minor ** 2)
            th = float(np.angle(normal))
        rot = np.exp(-1j * th) * B2
        H = (rot + rot.conj().T) / 2.0
        _w2, V2 = np.linalg.eigh(H)
        y = _chord_solve(B2, V2[:, -1], V2[:, 0], target)
    out = Q @ y
    return out / np.linalg.norm(out)


def _eig2_vectors(B: np.ndarray, lam1: complex, lam2: complex) -> tuple[np.ndarray, np.ndarray]:
    def vec(lam):
        A = B - lam * np.eye(2)
        # kernel of a singular 2x2
        if abs(A[0, 0]) + abs(A[0, 1]) >= abs(A[1, 0]) + abs(A[1, 1]):
            row = A[0]
        else:
            row = A[1]
        if abs(row[0]) + abs(row[1]) < 1e-300:
            return np.array([1.0, 0.0], dtype=np.complex128)
        v = np.array([-row[1], row[0]], dtype=np.complex128)
        return v / np.linalg.norm(v)

    v1 = vec(lam1)
    v2 = vec(lam2)
    if abs(np.vdot(v1, v2)) > 1e-8:
        # nearly defective; fall back to an orthogonal completion
        v2 = np.array([-np.conj(v1[1]), np.conj(v1[0])])
    return v1, v2


def _barycentric(z: complex, a: complex, b: complex, c: complex) -> tuple[float, float, float] | None:
    det = (b.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (b.imag - a.imag)
    if det == 0.0:
        return None
    beta = ((z.real - a.real) * (c.imag - a.imag) - (c.real - a.real) * (z.imag - a.imag)) / det
    gamma = ((b.real - a.real) * (z.imag - a.imag) - (z.real - a.real) * (b.imag - a.imag)) / det
    alpha = 1.0 - beta - gamma
    return alpha, beta, gamma


def _inradius(a: complex, b: complex, c: complex) -> float:
    la, lb, lc = abs(b - c), abs(c - a), abs(a - b)
    s = (la + lb + lc) / 2.0
    if s == 0.0:
        return 0.0
    area_sq = max(s * (s - la) * (s - lb) * (s - lc), 0.0)
    return np.sqrt(area_sq) / s


def _find_triangle(points: np.ndarray, z: complex) -> tuple[int, int, int] | None:
    n = points.size
    slack = -1e-12 * (1.0 + np.abs(points).max())
    best = None
    best_r = 0.0
    third = n // 3
    for j in range(third):
        ia, ib, ic = j, j + third, j + 2 * third
        bc = _barycentric(z, points[ia], points[ib], points[ic])
        if bc is None or min(bc) < slack:
            continue
        r = _inradius(points[ia], points[ib], points[ic])
        if r > best_r:
            best_r, best = r, (ia, ib, ic)
    if best is not None:
        return best
    # fan triangulation from the nearest boundary point: guaranteed to cover
    # the polygon of boundary points
    j0 = int(np.argmin(np.abs(points - z)))
    for k in range(n - 1):
        ib, ic = (j0 + 1 + k) % n, (j0 + 2 + k) % n
        if ib == j0 or ic == j0:
            continue
        bc = _barycentric(z, points[j0], points[ib], points[ic])
        if bc is not None and min(bc) >= slack:
            r = _inradius(points[j0], points[ib], points[ic])
            if r > best_r:
                best_r, best = r, (j0, ib, ic)
    return best


def attain(M, z: complex, tol: float = 1e-10, support: SupportFunction | None = None) -> UnitVector:
    """Unit vector x with |<Mx, x> - z| <= tol, for z in W(M) (within tol).

    Raises OutsideRange when z is farther than tol from W(M) and NoWitness if
    the construction stalls (which should not happen for interior targets).
    A precomputed support function may be passed to avoid recomputation.
    """
    a = _as_array(M)
    z = complex(z)
    if a.shape[0] == 1:
        val = complex(a[0, 0])
        if abs(val - z) > tol:
            raise OutsideRange(f"target {z} vs 1x1 range {{{val}}}")
        return UnitVector(np.array([1.0 + 0j]))
    sf = support if support is not None else nr_boundary(M, DEFAULT_ANGLES, tol)
    pts = sf.boundary_points
    wit = sf.witnesses
    assert wit is not None

    hull_poly = _monotone_chain(pts)
    dist = polygon_distance(z, hull_poly)
    if dist > tol:
        raise OutsideRange(f"target {z} is {dist:.3e} outside the numerical range (tol {tol:.1e})")
    target = z
    if dist > 0.0:
        target = _project_to_polygon(z, hull_poly)

    scale = 1.0 + np.abs(pts).max()
    nearest = int(np.argmin(np.abs(pts - target)))
    if abs(pts[nearest] - target) <= max(tol * 1e-3, 1e-14 * scale):
        x = wit[nearest].components
        return UnitVector.normalized(x)

    if a.shape[0] == 2:
        # the 2x2 solver is exact on its own; no reduction needed
        eye = np.eye(2, dtype=np.complex128)
        x = _attain_2d(a, eye[:, 0], eye[:, 1], target)
        val = complex(np.vdot(x, a @ x))
        if abs(val - z) > tol:
            raise NoWitness(f"achieved {val}, target {z}, error {abs(val - z):.3e} > tol {tol:.1e}")
        return UnitVector.normalized(x)

    centered = pts - pts.mean()
    spread = np.linalg.svd(np.column_stack([centered.real, centered.imag]),
                           compute_uv=False)
    if spread[1] <= 1e-9 * max(spread[0], 1.0):
        # effectively collinear boundary (segment or point at any tilt):
        # solve in the span of the two extreme witnesses along the long axis
        widths = sf.support + np.roll(sf.support, sf.n_angles // 2)
        j = int(np.argmax(widths))
        va = wit[j].components
        vb = wit[(j + sf.n_angles // 2) % sf.n_angles].components
        x = _attain_2d(a, va, vb, target)
    else:
        tri = _find_triangle(pts, target)
        if tri is None:
            # target within tol of the boundary: chord through the two nearest points
            order = np.argsort(np.abs(pts - target))
            ia, ib = int(order[0]), int(order[1])
            x = _attain_2d(a, wit[ia].components, wit[ib].components, target)
        else:
            ia, ib, ic = tri
            bc = _barycentric(target, pts[ia], pts[ib], pts[ic])
            assert bc is not None
            alpha, beta, gamma = (max(v, 0.0) for v in bc)
            if alpha + beta <= 1e-14:
                x = wit[ic].components
            else:
                mid = (alpha * pts[ia] + beta * pts[ib]) / (alpha + beta)
                u = _attain_2d(a, wit[ia].components, wit[ib].components, mid)
                x = _attain_2d(a, u, wit[ic].components, target)
    val = complex(np.vdot(x, a @ x))
    if abs(val - z) > tol:
        raise NoWitness(f"achieved {val}, target {z}, error {abs(val - z):.3e} > tol {tol:.1e}")
    return UnitVector.normalized(x)


def _project_to_polygon(z: complex, vertices: np.ndarray) -> complex:
    v = vertices
    if v.size == 1:
        return complex(v[0])
    best = None
    best_d = np.inf
    n = v.size
    for i in range(n if n > 2 else 1):
        a, b = v[i], v[(i + 1) % n]
        d = b - a
        L2 = (d * d.conjugate()).real
        t = 0.0 if L2 == 0 else min(1.0, max(0.0, ((z - a) * d.conjugate()).real / L2))
        p = a + t * d
        dd = abs(z - p)
        if dd < best_d:
            best_d, best = dd, p
    return complex(best)
