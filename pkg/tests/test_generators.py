from __future__ import annotations

import math

import numpy as np
import pytest

from refs import brute_cover_l2
from streamcover.errors import InvalidArgument
from streamcover.generators import (
    InstanceKind,
    InstanceSpec,
    generate,
    parse_instance_spec,
    points_text,
)
from streamcover.harness.io import parse_points
from streamcover.solvers import exact_udc_l2, exact_udc_linf


def test_index_circle_no_probe():
    inst = generate(InstanceSpec(InstanceKind.INDEX_CIRCLE, 4, params={"z": "1111", "probe": False}))
    got = {(round(x, 12) + 0.0, round(y, 12) + 0.0) for x, y in inst.points}
    assert got == {(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)}
    assert inst.radius == 2.0


@pytest.mark.parametrize("bit,opt", [("0", 1), ("1", 2)])
def test_index_circle_probe_n64(bit, opt):
    z = "1" * 63 + bit
    inst = generate(InstanceSpec(InstanceKind.INDEX_CIRCLE, 64, params={"z": z}))
    assert exact_udc_l2(inst.points, limit=80, radius=2.0) == opt == inst.certified_opt
    if bit == "0":
        c = ((1 + math.cos(2 * math.pi / 64)) / 2 - 2, 0.0)
        assert max(math.dist(c, p) for p in inst.points) <= 2 + 1e-9


@pytest.mark.parametrize("n", [8, 16])
def test_index_general_i_matches_brute_force(n):
    rng = np.random.default_rng(n)
    for trial in range(3):
        z = "".join(rng.choice(["0", "1"], n))
        i = int(rng.integers(1, n + 1))
        inst = generate(InstanceSpec(InstanceKind.INDEX_CIRCLE, n, trial, {"z": z, "i": i})).normalized()
        if inst.n <= 10:
            assert brute_cover_l2([tuple(p) for p in inst.points]) == inst.certified_opt
        assert exact_udc_l2(inst.points, limit=80) == inst.certified_opt == (2 if z[i - 1] == "1" else 1)


def test_clusters_certified():
    inst = generate(InstanceSpec(InstanceKind.SEPARATED_CLUSTERS, 300, 4, {"k": 12, "ell": 1}))
    assert inst.certified_opt == 12 and inst.n == 300
    reps = []
    labels = np.floor(inst.points / 2)
    for cell in np.unique(labels, axis=0):
        members = inst.points[(labels == cell).all(axis=1)]
        assert np.max(np.ptp(members, axis=0)) <= 0.1
        reps.append(members[0])
    assert len(reps) == 12
    assert exact_udc_l2(np.array(reps)) == 12
    d = np.linalg.norm(np.array(reps)[:, None] - np.array(reps)[None], axis=2)
    assert d[np.triu_indices(12, 1)].min() >= 10


def test_grid_adversarial_certified():
    inst = generate(InstanceSpec(InstanceKind.GRID_ADVERSARIAL, 20, 1))
    assert inst.certified_opt == 10
    assert exact_udc_l2(inst.points) == 10 == exact_udc_linf(inst.points)
    xs = inst.points[:, 0]
    left, right = xs[0::2], xs[1::2]
    assert np.all(np.floor(left / 2) != np.floor(right / 2))  # every pair straddles an even line


def test_determinism_and_text_roundtrip():
    for spec in (InstanceSpec(InstanceKind.UNIFORM_BOX, 50, 3), InstanceSpec(InstanceKind.SEPARATED_CLUSTERS, 60, 3,
                                                                             {"k": 6})):
        a, b = generate(spec), generate(spec)
        assert np.array_equal(a.points, b.points)
        back = np.array(list(parse_points(points_text(a.points, {"kind": spec.kind.value}))))
        assert np.array_equal(back, a.points)


def test_parse_instance_spec():
    s = parse_instance_spec("clusters:k=50,seed=3")
    assert s.kind is InstanceKind.SEPARATED_CLUSTERS and s.n == 1000 and s.seed == 3 and s.param("k") == 50
    s = parse_instance_spec("index:n=16,z=1010101010101010,i=3")
    assert s.param("z") == "1010101010101010" and s.param("i") == 3
    assert parse_instance_spec("clusters:k=5,separation=12").n == 100
    with pytest.raises(InvalidArgument):
        parse_instance_spec("bogus:n=3")
    with pytest.raises(InvalidArgument):
        parse_instance_spec("uniform:n")
    with pytest.raises(InvalidArgument):
        generate(InstanceSpec(InstanceKind.SEPARATED_CLUSTERS, 10, 0, {"k": 11}))
    with pytest.raises(InvalidArgument):
        InstanceSpec(InstanceKind.UNIFORM_BOX, 10, 0, {"k": 1})
