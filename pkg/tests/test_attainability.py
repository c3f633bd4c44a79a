import itertools
import math
from fractions import Fraction

import pytest

from impulse_reach.attainability import (
    Arc,
    PlanarSet,
    ReachConfig,
    coincidence_check,
    convex_hull_2d,
    directed_distance,
    fan_slack,
    hausdorff_distance,
    hull_piece,
    point_segment_distance,
    relaxed_reach,
    short_impulse_mp,
    universal_mp,
)
from impulse_reach.dynamics import ConstraintSpec, build_double_integrator
from impulse_reach.errors import EmptySetError, PreconditionError
from impulse_reach.intervals import Interval
from impulse_reach.piecewise import LEFT, RIGHT, PiecewiseFn

F = Fraction
UNIT = Interval.make(0, 1)


def const_one() -> PiecewiseFn:
    return PiecewiseFn.constant(UNIT, 1)


def zigzag() -> PiecewiseFn:
    return PiecewiseFn.build(["0", "1/2", "1"], [[1], [-1]], [1, -1, -1])


def unconstrained_sys(c=None, b=1):
    sys, _ = build_double_integrator(c or const_one(), 1, 1, b)
    return sys, ConstraintSpec.unconstrained()


def velocity_constrained_sys():
    """c == 1, one step constraint chi_[0,1/2], target {0}, exact index 1."""
    sys, (_, s2) = build_double_integrator(const_one(), 1, "1/2", 1)
    cons = ConstraintSpec((s2,), (((0, 0),),), frozenset({1}))
    return sys, cons


def seg_endpoints(ps: PlanarSet):
    assert len(ps.segments) == 1 and not ps.polygons
    return sorted(ps.segments[0])


# -- geometry helpers -----------------------------------------------------------

def test_convex_hull_ccw_square():
    pts = [(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.5, 0.0)]
    hull = convex_hull_2d(pts)
    assert hull == [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def test_hull_piece_degenerate_to_segment():
    ps = hull_piece([(0.125, 1.0), (0.375, 1.0), (0.875, 1.0)])
    assert seg_endpoints(ps) == [(0.125, 1.0), (0.875, 1.0)]


def test_point_segment_distance_sup_norm():
    assert point_segment_distance((0, 0), (0, 0), (1, 0)) == 0
    assert point_segment_distance((2, 0), (0, 0), (1, 0)) == 1
    assert point_segment_distance((0.5, 0.3), (0, 0), (1, 0)) == pytest.approx(0.3)
    # diagonal segment, sup-norm projection
    assert point_segment_distance((1, 0), (0, 0), (1, 1)) == pytest.approx(0.5)


# -- hausdorff ----------------------------------------------------------------

def test_hausdorff_identity():
    ps = PlanarSet(segments=(((0.0, 1.0), (1.0, 1.0)),))
    assert hausdorff_distance(ps, ps) == 0


def test_hausdorff_segment_to_point_sup_norm():
    seg = PlanarSet(segments=(((0.0, 0.0), (1.0, 0.0)),))
    pt = PlanarSet(points=((0.0, 0.0),))
    assert hausdorff_distance(seg, pt) == pytest.approx(1.0)


def test_hausdorff_empty_rejected():
    with pytest.raises(EmptySetError):
        hausdorff_distance(PlanarSet.empty(), PlanarSet(points=((0.0, 0.0),)))


# -- relaxed_reach --------------------------------------------------------------

def test_reach_unconstrained_mesh4_exact_segment():
    sys, cons = unconstrained_sys()
    ps = relaxed_reach(sys, cons, ReachConfig.full(4, 0.01, 64))
    # hand LP: all mass on the first/last mesh cell
    assert seg_endpoints(ps) == [(0.125, 1.0), (0.875, 1.0)]


def test_reach_inactive_constraints_match_unconstrained():
    sys, (s1, s2) = build_double_integrator(const_one(), 1, 1, 1)
    wide = ConstraintSpec((s1, s2), (((None, None), (None, None)),), frozenset())
    free = relaxed_reach(sys, ConstraintSpec.unconstrained(),
                         ReachConfig.full(8, 0.01, 64))
    constrained = relaxed_reach(sys, wide, ReachConfig.full(8, 0.01, 64))
    assert free == constrained


def test_reach_partial_forces_mass_off_prefix():
    sys, cons = velocity_constrained_sys()
    ps = relaxed_reach(sys, cons, ReachConfig.partial({1}, 256, 0.002, 64))
    limit = PlanarSet(segments=(((0.0, 1.0), (0.5, 1.0)),))
    assert hausdorff_distance(ps, limit) <= 0.01


def test_reach_infeasible_box_gives_empty_set():
    sys, (_, s2) = build_double_integrator(const_one(), 1, 1, 1)
    cons = ConstraintSpec((s2,), (((10, 11),),), frozenset())  # velocity is 1
    ps = relaxed_reach(sys, cons, ReachConfig.full(8, 0.01, 16))
    assert ps.is_empty


def test_reach_monotone_in_epsilon():
    sys, cons = velocity_constrained_sys()
    small = relaxed_reach(sys, cons, ReachConfig.full(64, 0.001, 90))
    large = relaxed_reach(sys, cons, ReachConfig.full(64, 0.01, 90))
    slack = fan_slack(large, 90) + 1e-9
    assert directed_distance(small, large) <= slack


def test_reach_partial_inside_full():
    sys, cons = velocity_constrained_sys()
    full = relaxed_reach(sys, cons, ReachConfig.full(64, 0.01, 90))
    partial = relaxed_reach(sys, cons, ReachConfig.partial({1}, 64, 0.01, 90))
    assert directed_distance(partial, full) <= fan_slack(full, 90) + 1e-9


def test_reach_partial_requires_step_kernels():
    sys, (s1, _) = build_double_integrator(const_one(), "1/2", 1, 1)
    cons = ConstraintSpec((s1,), (((0, 0),),), frozenset())
    with pytest.raises(PreconditionError):
        relaxed_reach(sys, cons, ReachConfig.partial({1}, 8, 0.01, 16))


# -- universal_mp ----------------------------------------------------------------

def test_universal_unconstrained_full_segment():
    sys, cons = unconstrained_sys()
    ps = universal_mp(sys, cons, t_grid_size=65, directions=64)
    assert seg_endpoints(ps) == [(0.0, 1.0), (1.0, 1.0)]


def brute_force_two_atom_hull(sys, cons, grid=33):
    """Oracle: measures m1*delta_{t1,side} + m2*delta_{t2,side} on a grid."""
    pts = []
    times = [F(k, grid - 1) for k in range(grid)]
    atoms = []
    for t in times:
        if t > 0:
            atoms.append((t, LEFT))
        if t < 1:
            atoms.append((t, RIGHT))
    kernels = list(sys.pi) + list(cons.s)
    vals = {a: [float(k.side_limit(a[0], a[1])) for k in kernels] for a in atoms}
    n = sys.dim
    box = cons.boxes[0]
    masses = [F(k, 8) for k in range(9)]
    for a1, a2 in itertools.combinations_with_replacement(atoms, 2):
        for m1 in masses:
            m2 = 1 - m1
            joint = [float(m1) * v1 + float(m2) * v2
                     for v1, v2 in zip(vals[a1], vals[a2])]
            ok = True
            for (lo, hi), s in zip(box, joint[n:]):
                if lo is not None and s < float(lo) - 1e-9:
                    ok = False
                if hi is not None and s > float(hi) + 1e-9:
                    ok = False
            if ok:
                pts.append(tuple(joint[:n]))
    return pts


def test_universal_constrained_matches_two_atom_oracle():
    sys, cons = velocity_constrained_sys()
    ps = universal_mp(sys, cons, t_grid_size=65, directions=64)
    assert seg_endpoints(ps) == [(0.0, 1.0), (0.5, 1.0)]
    oracle_pts = brute_force_two_atom_hull(sys, cons)
    oracle = hull_piece(oracle_pts)
    assert hausdorff_distance(ps, oracle) <= 0.02


def test_universal_unreachable_target_empty():
    sys, (_, s2) = build_double_integrator(const_one(), 1, 1, 1)
    # |S2| <= b * sup|s2| = 1; a target at 10 is unattainable
    cons = ConstraintSpec((s2,), (((10, 10),),), frozenset())
    assert universal_mp(sys, cons, 33, 16).is_empty


def test_universal_monotone_in_grid():
    sys, cons = velocity_constrained_sys()
    coarse = universal_mp(sys, cons, t_grid_size=17, directions=64)
    fine = universal_mp(sys, cons, t_grid_size=33, directions=64)  # nested grid
    assert directed_distance(coarse, fine) <= fan_slack(fine, 64) + 1e-9


# -- short_impulse_mp -------------------------------------------------------------

def test_zigzag_set_exact():
    sys, _ = build_double_integrator(zigzag(), 1, 1, 1)
    ps = short_impulse_mp(sys)
    assert sorted(ps.points) == [(0, -1), (1, 1)]
    assert len(ps.segments) == 1
    assert sorted(ps.segments[0]) == [(-F(1, 2), -1), (F(1, 2), 1)]
    assert len(ps.arcs) == 2
    first, second = ps.arcs
    assert (first.t_lo, first.t_hi) == (0, F(1, 2))
    assert first.coeffs == ((1, -1), (1,))
    assert (second.t_lo, second.t_hi) == (F(1, 2), 1)
    assert second.coeffs == ((-1, 1), (-1,))


def test_zigzag_segment_alpha_parametrization():
    sys, _ = build_double_integrator(zigzag(), 1, 1, 1)
    ps = short_impulse_mp(sys)
    a, b = ps.segments[0]
    ends = {a, b}
    # alpha = 0 and alpha = 1 states of the jump segment
    assert (-F(1, 2), -1) in ends and (F(1, 2), 1) in ends
    for alpha in (F(1, 4), F(1, 2), F(3, 4)):
        x = (alpha - F(1, 2), 2 * alpha - 1)
        hi = max(ends)
        lo = min(ends)
        interp = tuple(lo[i] + alpha * (hi[i] - lo[i]) for i in range(2))
        assert interp == x


def test_mass_drop_thrust_jump_segment():
    # thrust scale steps up from 1 to 2 at t = 1/2 (no sign reversal)
    c = PiecewiseFn.build(["0", "1/2", "1"], [[1], [2]], [1, 2, 2])
    sys, _ = build_double_integrator(c, 1, 1, 1)
    ps = short_impulse_mp(sys)
    assert sorted(ps.points) == [(0, 2), (1, 1)]
    assert sorted(ps.segments[0]) == [(F(1, 2), 1), (1, 2)]
    assert ps.arcs[0].coeffs == ((1, -1), (1,))
    assert ps.arcs[1].coeffs == ((2, -2), (2,))


def test_short_impulse_numeric_mode_floats():
    c = PiecewiseFn.build(["0", "1/2", "1"], [[1.0], [-1.0]], [1.0, -1.0, -1.0])
    sys, _ = build_double_integrator(c, 1, 1, 1)
    ps = short_impulse_mp(sys)
    assert sorted(ps.points) == [(0.0, -1.0), (1.0, 1.0)]
    assert sorted(ps.segments[0]) == [(-0.5, -1.0), (0.5, 1.0)]
    reach = relaxed_reach(sys, ConstraintSpec.unconstrained(),
                          ReachConfig.full(16, 0.01, 64))
    assert len(reach.polygons) == 1


def test_continuous_thrust_has_no_jump_segments():
    sys, _ = build_double_integrator(const_one(), 1, 1, 1)
    ps = short_impulse_mp(sys)
    assert not ps.segments
    assert len(ps.arcs) == 1
    assert sorted(ps.points) == [(0, 1), (1, 1)]


def test_short_impulse_scales_with_b():
    sys1, _ = build_double_integrator(zigzag(), 1, 1, 1)
    sys3, _ = build_double_integrator(zigzag(), 1, 1, 3)
    one = short_impulse_mp(sys1)
    three = short_impulse_mp(sys3)
    assert sorted(three.points) == [tuple(3 * c for c in p)
                                    for p in sorted(one.points)]
    assert sorted(three.segments[0]) == [tuple(3 * c for c in p)
                                         for p in sorted(one.segments[0])]
    for a1, a3 in zip(one.arcs, three.arcs):
        assert a3.coeffs == tuple(tuple(3 * c for c in cs) for cs in a1.coeffs)


def test_short_impulse_json_roundtrip():
    sys, _ = build_double_integrator(zigzag(), 1, 1, 1)
    ps = short_impulse_mp(sys)
    back = PlanarSet.from_json(ps.to_json())
    assert back == ps


def assert_convex_ccw(poly):
    n = len(poly)
    assert n >= 3
    for i in range(n):
        o, a, b = poly[i], poly[(i + 1) % n], poly[(i + 2) % n]
        cross = (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        assert cross >= -1e-9


def test_zigzag_universal_polygon():
    sys, _ = build_double_integrator(zigzag(), 1, 1, 1)
    cons = ConstraintSpec.unconstrained()
    mp = universal_mp(sys, cons, t_grid_size=65, directions=90)
    assert len(mp.polygons) == 1
    assert_convex_ccw(mp.polygons[0])
    assert set(mp.polygons[0]) == {(-0.5, -1.0), (0.0, -1.0), (1.0, 1.0), (0.5, 1.0)}


def test_reach_zigzag_polygon_converges_to_universal():
    sys, _ = build_double_integrator(zigzag(), 1, 1, 1)
    cons = ConstraintSpec.unconstrained()
    mp = universal_mp(sys, cons, t_grid_size=65, directions=90)
    prev = math.inf
    for mesh in (8, 32, 128):
        ps = relaxed_reach(sys, cons, ReachConfig.full(mesh, 0.01, 90))
        assert len(ps.polygons) == 1
        assert_convex_ccw(ps.polygons[0])
        d = hausdorff_distance(ps, mp, 128)
        assert d <= 1.0 / mesh + fan_slack(mp, 90)
        assert d <= prev + 1e-12
        prev = d


# -- reach convergence / coincidence ----------------------------------------------

def test_reach_converges_to_universal_segment():
    sys, cons = unconstrained_sys()
    limit = PlanarSet(segments=(((0.0, 1.0), (1.0, 1.0)),))
    last = math.inf
    for mesh in (4, 16, 64):
        ps = relaxed_reach(sys, cons, ReachConfig.full(mesh, 0.01, 90))
        d = hausdorff_distance(ps, limit)
        assert d <= 1.0 / mesh + fan_slack(limit, 90)
        assert d <= last + 1e-12
        last = d


def test_coincidence_identical_for_empty_J():
    sys, (s1, s2) = build_double_integrator(const_one(), 1, "1/2", 1)
    cons = ConstraintSpec((s2,), (((0, 1),),), frozenset())
    full = relaxed_reach(sys, cons, ReachConfig.full(32, 0.01, 45))
    partial = relaxed_reach(sys, cons,
                            ReachConfig.partial(frozenset(), 32, 0.01, 45))
    assert full == partial


def test_coincidence_all_step_J_is_exact_constraint():
    sys, cons = velocity_constrained_sys()
    a = relaxed_reach(sys, cons, ReachConfig.partial({1}, 64, 0.05, 45))
    b = relaxed_reach(sys, cons, ReachConfig.partial({1}, 64, 0.0001, 45))
    assert a == b  # epsilon never touches the J coordinate


def test_universal_matches_relaxation_limit_on_box_target():
    # two constraint coordinates, box target, signed thrust: the curve-hull
    # route must be the limit of the mesh-LP route as epsilon shrinks
    zig = zigzag()
    sys, (s1, s2) = build_double_integrator(zig, "3/4", "1/2", 1)
    cons = ConstraintSpec((s1, s2),
                          (((F(-1, 8), F(1, 8)), (F(0), F(1, 4))),),
                          frozenset())
    mp = universal_mp(sys, cons, t_grid_size=129, directions=180)
    assert len(mp.polygons) == 1
    prev = math.inf
    for mesh, eps in [(32, 0.05), (128, 0.01), (512, 0.002)]:
        ps = relaxed_reach(sys, cons, ReachConfig.full(mesh, eps, 180))
        d = hausdorff_distance(ps, mp, 128)
        assert d <= 3 * eps
        assert d <= prev + 1e-12
        prev = d


def test_coincidence_report_converges():
    sys, cons = velocity_constrained_sys()
    report = coincidence_check(sys, cons, [(64, 0.05), (128, 0.01)],
                               directions=90, t_grid_size=65, sample_density=64)
    assert report.entries[0].partial_inside_full
    assert report.entries[1].partial_inside_full
    assert report.distances_decrease
    assert report.final_d_to_universal <= 0.02
