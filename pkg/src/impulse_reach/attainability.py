"""Reachable sets, attraction sets and set-distance utilities.

relaxed_reach computes the terminal-moment image of the step controls on a
uniform mesh under a relaxed target box, as the convex hull of the optimal
points of support-function LPs over a fan of directions (an inner
approximation that tightens with the fan).  universal_mp computes the
limiting attraction set directly over generalized controls: the mass-b
measure cone is the closed convex hull of the scaled one-sided Diracs, so
the joint moment image is the hull of the two-sided kernel-limit curve,
sliced by the target in the constraint coordinates.  short_impulse_mp is
the exact union of one-sided-limit segments for the vanishing-support
constraint family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .dynamics import ConstraintSpec, ImpulseSystem
from .errors import DomainError, EmptySetError, NumericError, PreconditionError
from .intervals import eta, uniform_partition
from .piecewise import LEFT, RIGHT, integrate_eta
from .rational import FLOAT_DIGITS, Number, fmt_rat, num_from_json, num_to_json, rat
from .simplex import INFEASIBLE, OPTIMAL, solve_lp

Vec = tuple[Number, ...]


@dataclass(frozen=True)
class Arc:
    """Parametric polynomial curve over an open rational parameter interval."""

    t_lo: Fraction
    t_hi: Fraction
    coeffs: tuple[tuple[Number, ...], ...]  # one coefficient list per coordinate

    def __post_init__(self) -> None:
        if self.t_lo >= self.t_hi:
            raise DomainError("arc parameter interval must have positive length")

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def at(self, t: Number) -> Vec:
        out = []
        for cs in self.coeffs:
            acc: Number = 0
            for c in reversed(cs):
                acc = acc * t + c
            out.append(acc)
        return tuple(out)

    def to_json(self) -> dict:
        if self.dim != 2:
            raise DomainError("arc JSON form is two-dimensional")
        return {"param": [fmt_rat(self.t_lo), fmt_rat(self.t_hi)],
                "coeffs_x": [num_to_json(c) for c in self.coeffs[0]],
                "coeffs_y": [num_to_json(c) for c in self.coeffs[1]]}

    @staticmethod
    def from_json(obj: dict) -> "Arc":
        return Arc(rat(obj["param"][0]), rat(obj["param"][1]),
                   (tuple(num_from_json(c) for c in obj["coeffs_x"]),
                    tuple(num_from_json(c) for c in obj["coeffs_y"])))


@dataclass(frozen=True)
class PlanarSet:
    points: tuple[Vec, ...] = ()
    segments: tuple[tuple[Vec, Vec], ...] = ()
    arcs: tuple[Arc, ...] = ()
    polygons: tuple[tuple[Vec, ...], ...] = ()

    def __post_init__(self) -> None:
        for poly in self.polygons:
            if len(poly) < 3:
                raise DomainError("polygons need at least three vertices")

    @property
    def is_empty(self) -> bool:
        return not (self.points or self.segments or self.arcs or self.polygons)

    def to_json(self) -> dict:
        return {
            "points": [[num_to_json(c) for c in p] for p in self.points],
            "segments": [[[num_to_json(c) for c in p] for p in seg]
                         for seg in self.segments],
            "arcs": [a.to_json() for a in self.arcs],
            "polygons": [[[num_to_json(c) for c in p] for p in poly]
                         for poly in self.polygons],
        }

    @staticmethod
    def from_json(obj: dict) -> "PlanarSet":
        pts = tuple(tuple(num_from_json(c) for c in p) for p in obj.get("points", []))
        segs = tuple(tuple(tuple(num_from_json(c) for c in p) for p in seg)
                     for seg in obj.get("segments", []))
        arcs = tuple(Arc.from_json(a) for a in obj.get("arcs", []))
        polys = tuple(tuple(tuple(num_from_json(c) for c in p) for p in poly)
                      for poly in obj.get("polygons", []))
        return PlanarSet(pts, segs, arcs, polys)

    @staticmethod
    def empty() -> "PlanarSet":
        return PlanarSet()

    def merge(self, other: "PlanarSet") -> "PlanarSet":
        return PlanarSet(self.points + other.points,
                         self.segments + other.segments,
                         self.arcs + other.arcs,
                         self.polygons + other.polygons)


@dataclass(frozen=True)
class ReachConfig:
    mesh: int
    epsilon: Number
    directions: int = 360
    partial_j: Optional[frozenset[int]] = None  # None = relax every coordinate
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mesh < 1:
            raise DomainError("mesh must be >= 1")
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if self.directions < 3:
            raise DomainError("need at least 3 fan directions")

    @staticmethod
    def full(mesh: int, epsilon: Number, directions: int = 360) -> "ReachConfig":
        return ReachConfig(mesh, epsilon, directions, None)

    @staticmethod
    def partial(J: frozenset[int] | set[int], mesh: int, epsilon: Number,
                directions: int = 360) -> "ReachConfig":
        return ReachConfig(mesh, epsilon, directions, frozenset(J))


# -- geometry helpers ----------------------------------------------------------


def direction_fan(n: int, count: int, seed: int = 0) -> np.ndarray:
    if n == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        return np.column_stack([np.cos(angles), np.sin(angles)])
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(count, n))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def convex_hull_2d(points: Sequence[Sequence[float]]) -> list[tuple[float, float]]:
    """Monotone chain; returns counterclockwise vertices, collinear dropped."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    scale = max(max(abs(x), abs(y)) for x, y in pts) + 1.0
    eps = 1e-12 * scale * scale

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _round_vec(p: Sequence[float]) -> Vec:
    return tuple(float(format(float(c), f".{FLOAT_DIGITS}g")) for c in p)


def hull_piece(points: Sequence[Sequence[float]]) -> PlanarSet:
    """Canonical PlanarSet piece for a finite point cloud: its convex hull."""
    rounded = sorted({_round_vec(p) for p in points})
    if not rounded:
        return PlanarSet.empty()
    if len(rounded) == 1:
        return PlanarSet(points=(rounded[0],))
    if len(rounded[0]) == 2:
        hull = convex_hull_2d(rounded)
        if len(hull) == 1:
            return PlanarSet(points=(_round_vec(hull[0]),))
        if len(hull) == 2:
            lo, hi = sorted(hull)
            return PlanarSet(segments=((_round_vec(lo), _round_vec(hi)),))
        return PlanarSet(polygons=(tuple(_round_vec(p) for p in hull),))
    # higher dimensions are kept as a point cloud
    return PlanarSet(points=tuple(rounded))


def point_segment_distance(p: Sequence[float], a: Sequence[float],
                           b: Sequence[float]) -> float:
    """Exact sup-norm distance from p to the segment [a, b].

    The distance along the segment is a convex piecewise-linear function of
    the parameter, so its minimum sits at a kink, a crossing, or an end.
    """
    d = [float(pi) - float(ai) for pi, ai in zip(p, a)]
    e = [float(bi) - float(ai) for bi, ai in zip(b, a)]
    candidates = {0.0, 1.0}
    n = len(d)
    for i in range(n):
        if e[i] != 0.0:
            candidates.add(min(1.0, max(0.0, d[i] / e[i])))
        for j in range(i + 1, n):
            for sj in (1.0, -1.0):
                denom = e[i] - sj * e[j]
                if denom != 0.0:
                    s = (d[i] - sj * d[j]) / denom
                    candidates.add(min(1.0, max(0.0, s)))
    best = math.inf
    for s in candidates:
        best = min(best, max(abs(di - s * ei) for di, ei in zip(d, e)))
    return best


def _point_in_convex_polygon(p: Sequence[float], poly: Sequence[Sequence[float]],
                             eps: float = 1e-12) -> bool:
    for a, b in zip(poly, list(poly[1:]) + [poly[0]]):
        cross = ((float(b[0]) - float(a[0])) * (float(p[1]) - float(a[1]))
                 - (float(b[1]) - float(a[1])) * (float(p[0]) - float(a[0])))
        if cross < -eps:
            return False
    return True


def _arc_polyline(arc: Arc, count: int) -> list[tuple[float, ...]]:
    lo, hi = float(arc.t_lo), float(arc.t_hi)
    ts = [lo + (hi - lo) * k / (count - 1) for k in range(count)]
    return [tuple(float(c) for c in arc.at(t)) for t in ts]


def _sup_length(path: Sequence[Sequence[float]]) -> float:
    return sum(max(abs(q[i] - p[i]) for i in range(len(p)))
               for p, q in zip(path, path[1:]))


def _sample_segment(a: Sequence[float], b: Sequence[float],
                    density: int) -> list[tuple[float, ...]]:
    length = max(abs(float(bi) - float(ai)) for ai, bi in zip(a, b))
    count = max(2, int(math.ceil(length * density)) + 1)
    out = []
    for k in range(count):
        s = k / (count - 1)
        out.append(tuple(float(ai) + s * (float(bi) - float(ai))
                         for ai, bi in zip(a, b)))
    return out


def sample_set(ps: PlanarSet, density: int) -> list[tuple[float, ...]]:
    samples: list[tuple[float, ...]] = []
    samples.extend(tuple(float(c) for c in p) for p in ps.points)
    for a, b in ps.segments:
        samples.extend(_sample_segment(a, b, density))
    for arc in ps.arcs:
        coarse = _arc_polyline(arc, 33)
        count = max(2, int(math.ceil(_sup_length(coarse) * density)) + 1)
        samples.extend(_arc_polyline(arc, count))
    for poly in ps.polygons:
        for a, b in zip(poly, list(poly[1:]) + [poly[0]]):
            samples.extend(_sample_segment(a, b, density))
    return samples


def _distance_to_set(p: Sequence[float], ps: PlanarSet,
                     arc_chords: dict[int, list[tuple[float, ...]]]) -> float:
    best = math.inf
    for q in ps.points:
        best = min(best, max(abs(float(qc) - pc) for qc, pc in zip(q, p)))
    for a, b in ps.segments:
        best = min(best, point_segment_distance(p, a, b))
    for idx, arc in enumerate(ps.arcs):
        chord = arc_chords[idx]
        for a, b in zip(chord, chord[1:]):
            best = min(best, point_segment_distance(p, a, b))
    for poly in ps.polygons:
        if len(p) == 2 and _point_in_convex_polygon(p, poly):
            return 0.0
        for a, b in zip(poly, list(poly[1:]) + [poly[0]]):
            best = min(best, point_segment_distance(p, a, b))
    return best


def hausdorff_distance(a: PlanarSet, b: PlanarSet, sample_density: int = 256) -> float:
    """Symmetric Hausdorff distance in the sup-norm, from boundary samples."""
    if a.is_empty or b.is_empty:
        raise EmptySetError("Hausdorff distance needs two nonempty sets")

    def chords(ps: PlanarSet) -> dict[int, list[tuple[float, ...]]]:
        out = {}
        for idx, arc in enumerate(ps.arcs):
            coarse = _arc_polyline(arc, 33)
            count = max(2, int(math.ceil(_sup_length(coarse) * sample_density)) + 1)
            out[idx] = _arc_polyline(arc, count)
        return out

    chords_a, chords_b = chords(a), chords(b)
    d_ab = max(_distance_to_set(p, b, chords_b) for p in sample_set(a, sample_density))
    d_ba = max(_distance_to_set(p, a, chords_a) for p in sample_set(b, sample_density))
    return max(d_ab, d_ba)


def directed_distance(a: PlanarSet, b: PlanarSet, sample_density: int = 256) -> float:
    """One-sided distance sup_{x in a} dist(x, b)."""
    if a.is_empty or b.is_empty:
        raise EmptySetError("directed distance needs two nonempty sets")
    chords_b = {}
    for idx, arc in enumerate(b.arcs):
        coarse = _arc_polyline(arc, 33)
        count = max(2, int(math.ceil(_sup_length(coarse) * sample_density)) + 1)
        chords_b[idx] = _arc_polyline(arc, count)
    return max(_distance_to_set(p, b, chords_b) for p in sample_set(a, sample_density))


def fan_slack(ps: PlanarSet, directions: int, density: int = 64) -> float:
    """Upper bound on the inner-approximation gap of a direction fan."""
    pts = sample_set(ps, density)
    if not pts:
        return 0.0
    diam = 0.0
    arr = np.asarray(pts)
    lo = arr.min(axis=0)
    hi = arr.max(axis=0)
    diam = float(np.max(hi - lo))
    return diam * (1.0 - math.cos(math.pi / directions)) + 1e-9


# -- reachable sets -------------------------------------------------------------


def _mesh_columns(sys: ImpulseSystem, cons: ConstraintSpec, mesh: int):
    cells = uniform_partition(sys.domain, mesh).cells
    etas = np.array([float(eta(c)) for c in cells])
    P = np.array([[float(integrate_eta(k, c)) for c in cells] for k in sys.pi])
    S = np.array([[float(integrate_eta(k, c)) for c in cells] for k in cons.s])
    return etas, P, S


def relax_box(box: Sequence[tuple[Optional[Number], Optional[Number]]],
              epsilon: Number,
              partial_j: Optional[frozenset[int]]) -> list[tuple[Optional[float], Optional[float]]]:
    """Coordinate-wise sup-norm inflation; Partial keeps J coordinates exact."""
    out = []
    for j, (lo, hi) in enumerate(box, start=1):
        exact = partial_j is not None and j in partial_j
        pad = 0.0 if exact else float(epsilon)
        out.append((None if lo is None else float(lo) - pad,
                    None if hi is None else float(hi) + pad))
    return out


def _support_points(objective_rows: np.ndarray, mass_row: np.ndarray, mass: float,
                    coord_rows: np.ndarray,
                    bounds: Sequence[tuple[Optional[float], Optional[float]]],
                    directions: np.ndarray) -> Optional[list[tuple[float, ...]]]:
    """Argmax images of support LPs over the fan; None when infeasible.

    Feasible set: x >= 0, mass_row.x = mass, bounds on coord_rows.x.
    Images are objective_rows.x.
    """
    eq_rows = [mass_row]
    eq_rhs = [mass]
    ub_rows: list[np.ndarray] = []
    ub_rhs: list[float] = []
    for row, (lo, hi) in zip(coord_rows, bounds):
        if lo is not None and hi is not None and lo == hi:
            eq_rows.append(row)
            eq_rhs.append(lo)
            continue
        if hi is not None:
            ub_rows.append(row)
            ub_rhs.append(hi)
        if lo is not None:
            ub_rows.append(-row)
            ub_rhs.append(-lo)
    A_eq = np.vstack(eq_rows)
    A_ub = np.vstack(ub_rows) if ub_rows else None
    b_ub = ub_rhs if ub_rows else None

    points: list[tuple[float, ...]] = []
    for d in directions:
        cost = -(d @ objective_rows)
        res = solve_lp(cost, A_eq=A_eq, b_eq=eq_rhs, A_ub=A_ub, b_ub=b_ub)
        if res.status == INFEASIBLE:
            return None
        if res.status != OPTIMAL:
            raise NumericError(f"support LP ended with status {res.status}")
        points.append(tuple(float(v) for v in objective_rows @ res.x))
    return points


def relaxed_reach(sys: ImpulseSystem, cons: ConstraintSpec,
                  cfg: ReachConfig) -> PlanarSet:
    """Terminal-moment image of mesh step controls under the relaxed target."""
    for kernel in cons.s:
        if kernel.domain != sys.domain:
            raise DomainError("constraint kernel domain mismatch")
    if cfg.partial_j is not None:
        for j in cfg.partial_j:
            if not 1 <= j <= cons.n_constraints:
                raise PreconditionError(f"J index {j} out of range")
            if not cons.s[j - 1].is_step:
                raise PreconditionError(
                    "exact (Partial) coordinates need step constraint kernels")
    etas, P, S = _mesh_columns(sys, cons, cfg.mesh)
    directions = direction_fan(sys.dim, cfg.directions, cfg.seed)
    result = PlanarSet.empty()
    for box in cons.boxes:
        bounds = relax_box(box, cfg.epsilon, cfg.partial_j)
        pts = _support_points(P, etas, float(sys.b), S, bounds, directions)
        if pts is None:
            continue
        result = result.merge(hull_piece(pts))
    return result


def _augmented_curve_samples(sys: ImpulseSystem, cons: ConstraintSpec,
                             t_grid_size: int) -> np.ndarray:
    kernels = list(sys.pi) + list(cons.s)
    times = {sys.t0 + Fraction(k, max(1, t_grid_size - 1)) * (sys.theta0 - sys.t0)
             for k in range(t_grid_size)}
    for kernel in kernels:
        times.update(kernel.breakpoints)
    rows = []
    b = float(sys.b)
    for t in sorted(times):
        sides = []
        if t > sys.t0:
            sides.append(LEFT)
        if t < sys.theta0:
            sides.append(RIGHT)
        for side in sides:
            rows.append([b * float(k.side_limit(t, side)) for k in kernels])
    return np.asarray(rows)


def universal_mp(sys: ImpulseSystem, cons: ConstraintSpec,
                 t_grid_size: int = 129, directions: int = 360,
                 seed: int = 0) -> PlanarSet:
    """Attraction set over generalized controls with the exact target.

    The joint (terminal, constraint) moment image of the mass-b measure cone
    is the closed convex hull of the two-sided kernel-limit curve; each
    target box slices the hull in the constraint coordinates and the result
    is projected to the terminal coordinates by support LPs.
    """
    if t_grid_size < 2:
        raise DomainError("t_grid_size must be at least 2")
    for j in cons.J:
        if not cons.s[j - 1].is_step:
            raise PreconditionError("J-indexed constraint kernels must be step")
    samples = _augmented_curve_samples(sys, cons, t_grid_size)
    n = sys.dim
    pi_part = samples[:, :n].T        # n x K
    s_part = samples[:, n:].T         # N x K
    ones = np.ones(samples.shape[0])
    fan = direction_fan(n, directions, seed)
    result = PlanarSet.empty()
    for box in cons.boxes:
        bounds = [(None if lo is None else float(lo),
                   None if hi is None else float(hi)) for lo, hi in box]
        pts = _support_points(pi_part, ones, 1.0, s_part, bounds, fan)
        if pts is None:
            continue
        result = result.merge(hull_piece(pts))
    return result


def short_impulse_mp(sys: ImpulseSystem) -> PlanarSet:
    """Exact attraction set of the vanishing-support constraint family.

    Union over interior times of the segment between the left and right
    kernel limits, plus the one-sided limit points at the domain endpoints;
    on every open gap between kernel breakpoints the set is the arc traced
    by b * pi(t).
    """
    cuts = sorted(set().union(*[set(k.breakpoints) for k in sys.pi]))
    refined = [k.refine(cuts) for k in sys.pi]
    b = sys.b if isinstance(sys.b, (int, Fraction)) else float(sys.b)

    arcs = []
    for i, (lo, hi) in enumerate(zip(cuts, cuts[1:])):
        arcs.append(Arc(lo, hi, tuple(tuple(b * c for c in k.pieces[i])
                                      for k in refined)))

    points: list[Vec] = []
    segments: list[tuple[Vec, Vec]] = []
    for t in cuts[1:-1]:
        up = tuple(b * k.side_limit(t, LEFT) for k in refined)
        down = tuple(b * k.side_limit(t, RIGHT) for k in refined)
        if up == down:
            points.append(up)
        else:
            segments.append((up, down))
    points.append(tuple(b * k.side_limit(sys.t0, RIGHT) for k in refined))
    points.append(tuple(b * k.side_limit(sys.theta0, LEFT) for k in refined))

    return PlanarSet(points=tuple(points), segments=tuple(segments),
                     arcs=tuple(arcs))


# -- coincidence report ----------------------------------------------------------


@dataclass(frozen=True)
class CoincidenceEntry:
    mesh: int
    epsilon: float
    d_full_partial: float
    d_full_universal: float
    d_partial_universal: float
    partial_inside_full: bool
    slack: float

    def to_json(self) -> dict:
        return {
            "mesh": self.mesh,
            "epsilon": num_to_json(float(self.epsilon)),
            "d_full_partial": num_to_json(self.d_full_partial),
            "d_full_universal": num_to_json(self.d_full_universal),
            "d_partial_universal": num_to_json(self.d_partial_universal),
            "partial_inside_full": self.partial_inside_full,
            "slack": num_to_json(self.slack),
        }


@dataclass(frozen=True)
class CoincidenceReport:
    entries: tuple[CoincidenceEntry, ...]
    distances_decrease: bool
    final_d_full_partial: float
    final_d_to_universal: float

    def to_json(self) -> dict:
        return {
            "entries": [e.to_json() for e in self.entries],
            "distances_decrease": self.distances_decrease,
            "final_d_full_partial": num_to_json(self.final_d_full_partial),
            "final_d_to_universal": num_to_json(self.final_d_to_universal),
        }


def coincidence_check(sys: ImpulseSystem, cons: ConstraintSpec,
                      schedule: Sequence[tuple[int, Number]],
                      directions: int = 360, t_grid_size: int = 129,
                      sample_density: int = 256) -> CoincidenceReport:
    """Compare the fully-relaxed and partially-relaxed reach sets along a
    mesh/epsilon schedule against the generalized attraction set."""
    universal = universal_mp(sys, cons, t_grid_size, directions)
    entries = []
    for mesh, epsilon in schedule:
        full = relaxed_reach(sys, cons, ReachConfig.full(mesh, epsilon, directions))
        partial = relaxed_reach(
            sys, cons, ReachConfig.partial(cons.J, mesh, epsilon, directions))
        slack = fan_slack(full, directions) + 1e-7
        if full.is_empty or partial.is_empty or universal.is_empty:
            raise NumericError("coincidence check needs nonempty reach sets")
        entries.append(CoincidenceEntry(
            mesh=mesh,
            epsilon=float(epsilon),
            d_full_partial=hausdorff_distance(full, partial, sample_density),
            d_full_universal=hausdorff_distance(full, universal, sample_density),
            d_partial_universal=hausdorff_distance(partial, universal, sample_density),
            partial_inside_full=directed_distance(partial, full, sample_density) <= slack,
            slack=slack,
        ))
    gaps = [max(e.d_full_universal, e.d_partial_universal) for e in entries]
    decreasing = all(a >= b - 1e-12 for a, b in zip(gaps, gaps[1:]))
    return CoincidenceReport(
        entries=tuple(entries),
        distances_decrease=decreasing,
        final_d_full_partial=entries[-1].d_full_partial if entries else math.inf,
        final_d_to_universal=gaps[-1] if gaps else math.inf,
    )
