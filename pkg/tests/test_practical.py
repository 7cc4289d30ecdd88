from __future__ import annotations

import math

import numpy as np
import pytest

from streamcover.errors import InvalidArgument, UnsupportedDimension
from streamcover.generators import InstanceKind, InstanceSpec, generate
from streamcover.geometry import Norm
from streamcover.practical import (
    LatticeSpec,
    centers_within,
    centers_within_many,
    lattice_assign,
    lattice_centers,
    lattice_estimate,
    lattice_tile,
    occupied_balls,
)
from streamcover.sketches import ExactCounter
from streamcover.solvers import exact_udc_l2, exact_udc_linf


def test_assign_examples():
    linf = LatticeSpec(Norm.LINF)
    assert lattice_tile(linf, (0.5, 0.5)) == (0, 0)
    assert lattice_tile(linf, (3, 3)) == (1, 1)
    assert lattice_centers(LatticeSpec(Norm.L2), [(0.0, 0.0)]).tolist() == [[0.0, 0.0]]
    assert lattice_assign(linf, (0.5, 0.5)) != lattice_assign(linf, (3, 3))


def test_l2_covering_radius_and_nearest():
    rng = np.random.default_rng(0)
    pts = rng.uniform(-100, 100, (100_000, 2))
    spec = LatticeSpec(Norm.L2, tuple(rng.uniform(0, 2, 2)))
    c = lattice_centers(spec, pts)
    d = np.linalg.norm(c - pts, axis=1)
    assert d.max() <= 1.0 + 1e-12
    # nearest: no neighbouring centre is strictly closer
    for dx, dy in ((1, 1), (1, -1), (-1, 1), (-1, -1), (2, 0), (0, 2)):
        assert np.all(d <= np.linalg.norm(c + (dx, dy) - pts, axis=1) + 1e-12)


def test_l2_tie_break_is_lexicographic():
    spec = LatticeSpec(Norm.L2)
    # (1, 0) is equidistant from centres (0,0) and (2,0) and (1,1) and (1,-1)
    assert lattice_centers(spec, [(1.0, 0.0)]).tolist() == [[0.0, 0.0]]


def test_l1_uses_rotation():
    spec = LatticeSpec(Norm.L1)
    assert lattice_tile(spec, (1.5, 0.5)) == lattice_tile(LatticeSpec(Norm.LINF), (2.0, 1.0))


def test_spec_validation():
    with pytest.raises(InvalidArgument):
        LatticeSpec(Norm.LINF, (0.5, 0.0))
    with pytest.raises(InvalidArgument):
        LatticeSpec(Norm.L2, (2.0, 0.0))
    with pytest.raises(UnsupportedDimension):
        lattice_assign(LatticeSpec(Norm.L2), (1.0, 2.0, 3.0))


def test_estimate_trivial():
    for norm in Norm:
        assert lattice_estimate([(0.3, 0.4)], LatticeSpec(norm, copies=3), 0.2).value == 1
    assert lattice_estimate([(0.5, 0.5), (3, 3)], LatticeSpec(Norm.LINF, copies=1), 0.2).value == 2
    assert lattice_estimate(np.empty((0, 2)), LatticeSpec(Norm.L2), 0.2).value == 0


@pytest.mark.parametrize("seed", range(10))
def test_occupied_count_is_a_cover(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 8, (14, 2))
    for norm, oracle in ((Norm.L2, exact_udc_l2), (Norm.LINF, exact_udc_linf)):
        off = tuple(rng.uniform(0, 2, 2)) if norm is Norm.L2 else (0.0, 0.0)
        spec = LatticeSpec(norm, off)
        assert occupied_balls(spec, pts) >= oracle(pts)
        if norm is Norm.LINF:
            assert occupied_balls(spec, pts) <= 4 * oracle(pts)
    est = lattice_estimate(pts, LatticeSpec(Norm.L2, copies=4), 0.2, seed, sketch_factory=ExactCounter)
    assert est.value >= exact_udc_l2(pts)


def test_linf_determinism():
    pts = np.random.default_rng(2).uniform(0, 50, (500, 2))
    a = lattice_estimate(pts, LatticeSpec(Norm.LINF, copies=2), 0.2, seed=4)
    b = lattice_estimate(pts, LatticeSpec(Norm.LINF, copies=2), 0.2, seed=4)
    assert a.value == b.value and a.copy_values == b.copy_values


def test_centers_within_vectorised_and_support():
    rng = np.random.default_rng(1)
    offs = rng.uniform(0, 2, (500, 2))
    q = (0.37, 1.21)
    assert centers_within_many(offs, q).tolist() == [centers_within(o, q) for o in offs]
    grid = np.linspace(0, 2, 81, endpoint=False)
    g = np.array([(a, b) for a in grid for b in grid])
    counts = centers_within_many(g, (0.0, 0.0))
    assert counts.min() >= 1 and counts.max() <= 16


def test_mean_intersection_close_to_two_pi():
    offs = np.random.default_rng(3).uniform(0, 2, (50_000, 2))
    assert abs(centers_within_many(offs, (0.0, 0.0)).mean() - 2 * math.pi) <= 0.02 * 2 * math.pi


def test_clusters_linf_exact_count():
    inst = generate(InstanceSpec(InstanceKind.SEPARATED_CLUSTERS, 400, 0, {"k": 20}))
    assert lattice_estimate(inst.points, LatticeSpec(Norm.LINF, copies=1), 0.2).value == 20
