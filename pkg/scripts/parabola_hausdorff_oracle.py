#!/usr/bin/env python3
"""Closed-form oracle for the ellipse-family / parabola-region comparison.

Computes, independently of the package geometry, the Hausdorff distance
between hull(E_m, ..., E_200) and the parabola region
{Re z >= 3/4 + (Im z)^2} inside the box [0.75, 30] x [-6, 6], where E_n is
the ellipse with foci 1 and n^2 and minor semi-axis n/2 (center (n^2+1)/2,
major semi-axis sqrt((n/2)^2 + ((n^2-1)/2)^2), axes along Re/Im).

Ellipse boundaries are sampled in closed form, parametrized by the imaginary
part so the near-vertex arcs of very eccentric ellipses stay densely
resolved; points far to the right of the box cannot influence the clipped
hull and are dropped.  Hull, clipping and distances go through shapely, so
the numbers printed here are independent of the package and fit to pin in
tests/test_acceptance.py.
"""

import numpy as np
from shapely.geometry import MultiPoint, Point, Polygon

BOX = (0.75, 30.0, -6.0, 6.0)
N_MAX = 200
Y_SAMPLES = 4000
X_KEEP = 45.0  # arcs beyond this cannot shape the hull inside the box


def ellipse_arc_points(n: int) -> np.ndarray:
    c = (n * n + 1) / 2.0
    b = n / 2.0
    a = np.hypot(n / 2.0, (n * n - 1) / 2.0)
    ymax = min(b, 6.5)
    y = np.linspace(-ymax, ymax, Y_SAMPLES)
    dx = a * np.sqrt(np.maximum(1.0 - (y / b) ** 2, 0.0))
    left = np.column_stack([c - dx, y])
    right = np.column_stack([c + dx, y])
    pts = np.concatenate([left, right])
    return pts[pts[:, 0] <= X_KEEP]


def box_polygon(box):
    re0, re1, im0, im1 = box
    return Polygon([(re0, im0), (re1, im0), (re1, im1), (re0, im1)])


def parabola_region(box) -> Polygon:
    re1 = box[1]
    ystar = np.sqrt(re1 - 0.75)
    y = np.linspace(ystar, -ystar, 20000)
    ring = [(0.75 + t * t, t) for t in y]  # parabola, top-right to bottom-right
    return Polygon(ring)  # closes along the right edge Re = re1


def hull_region(m: int, box) -> Polygon:
    pts = np.concatenate([ellipse_arc_points(n) for n in range(m, N_MAX + 1)])
    hull = MultiPoint([tuple(p) for p in pts]).convex_hull
    return hull.intersection(box_polygon(box))


def set_hausdorff(p: Polygon, q: Polygon) -> float:
    """Hausdorff distance between the filled regions (not their boundaries).

    The supremum of distance-to-a-convex-set over a convex set sits on the
    boundary, so sampling exterior coordinates is exact up to sampling.
    """
    d_pq = max(Point(c).distance(q) for c in p.exterior.coords)
    d_qp = max(Point(c).distance(p) for c in q.exterior.coords)
    return max(d_pq, d_qp)


def main():
    target = parabola_region(BOX)
    print("# m   hausdorff(hull(E_m..E_200) clip, E clip)")
    for m in (5, 10, 20, 40):
        h = hull_region(m, BOX)
        print(f"{m:3d}   {set_hausdorff(h, target):.6f}")


if __name__ == "__main__":
    main()
