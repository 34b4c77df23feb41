"""Randomized invariant tests (hypothesis)."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metriclp import (
    Domain,
    MeasurableMap,
    dp_distance,
    equivalent,
    make_space,
    restrict,
)
from metriclp.domain import AtomSet, face_adjacent_pairs, measure, urysohn
from metriclp.quantize import countable_quantize
from metriclp.relax import smoothstep

from .conftest import SPACE_NAMES

SEEDS = st.integers(0, 2**32 - 1)
SPACE = st.sampled_from(SPACE_NAMES)
P_ALL = st.sampled_from([1.0, 1.5, 2.0, 4.0, math.inf])
REL = 1e-12


def random_maps(name, seed, n_atoms, count):
    sp = make_space(name)
    rng = np.random.default_rng(seed)
    dom = Domain(rng.uniform(0.05, 2.0, n_atoms))
    return dom, sp, [
        MeasurableMap(dom, sp, sp.random_payloads(rng, n_atoms))
        for _ in range(count)
    ]


@given(name=SPACE, seed=SEEDS)
def test_ground_metric_axioms(name, seed):
    sp = make_space(name)
    rng = np.random.default_rng(seed)
    pts = sp.random_payloads(rng, 3)
    x, y, z = pts[0:1], pts[1:2], pts[2:3]
    dxy = sp.distance_many(x, y)[0]
    assert dxy >= 0.0
    assert sp.distance_many(y, x)[0] == dxy  # bitwise symmetry
    assert sp.distance_many(x, x)[0] == 0.0
    dxz = sp.distance_many(x, z)[0]
    dyz = sp.distance_many(y, z)[0]
    assert dxz <= (dxy + dyz) * (1 + REL)


@given(name=SPACE, seed=SEEDS, p=P_ALL, n=st.integers(1, 6))
def test_dp_metric_axioms(name, seed, p, n):
    dom, sp, (f, g, h) = random_maps(name, seed, n, 3)
    dfg = dp_distance(f, g, p)
    assert dfg >= 0.0
    assert dp_distance(g, f, p) == dfg  # bitwise symmetry
    assert dp_distance(f, f, p) == 0.0
    assert dp_distance(f, h, p) <= (dfg + dp_distance(g, h, p)) * (1 + REL)
    # zero iff payload-equal on live atoms
    assert (dfg == 0.0) == equivalent(f, g)
    twin = MeasurableMap(dom, sp, f.values.copy())
    assert dp_distance(f, twin, p) == 0.0 and equivalent(f, twin)


@given(name=SPACE, seed=SEEDS, p=P_ALL, n=st.integers(2, 8))
def test_restrict_is_a_contraction(name, seed, p, n):
    dom, sp, (f, g) = random_maps(name, seed, n, 2)
    rng = np.random.default_rng(seed + 1)
    sub = AtomSet.from_mask(rng.random(n) < 0.5)
    assert dp_distance(restrict(f, sub), restrict(g, sub), p) <= dp_distance(
        f, g, p
    ) * (1 + REL)


@given(
    name=SPACE,
    seed=SEEDS,
    pq=st.sampled_from([(1.0, 2.0), (2.0, 4.0), (1.5, 3.0), (1.0, 4.0)]),
    n=st.integers(1, 8),
)
def test_hoelder_inclusion_bound(name, seed, pq, n):
    p, q = pq
    dom, sp, (f, g) = random_maps(name, seed, n, 2)
    mu = measure(dom, AtomSet.full(dom.atom_count))
    lhs = dp_distance(f, g, p)
    rhs = dp_distance(f, g, q) * mu ** (1.0 / p - 1.0 / q)
    assert lhs <= rhs * (1 + REL) + 1e-300


@given(name=SPACE, seed=SEEDS, p=st.sampled_from([1.0, 2.0, 4.0]), n=st.integers(1, 6))
def test_base_invariance_bound(name, seed, p, n):
    dom, sp, (f, g, h) = random_maps(name, seed, n, 3)
    mu = measure(dom, AtomSet.full(dom.atom_count))
    lhs = dp_distance(f, h, p) ** p
    rhs = 2.0 ** (p - 1) * (
        dp_distance(f, g, p) ** p + dp_distance(g, h, math.inf) ** p * mu
    )
    assert lhs <= rhs * (1 + REL) + 1e-300


@given(name=SPACE, seed=SEEDS, eps=st.floats(0.05, 1.0), n=st.integers(1, 24))
def test_countable_quantize_stays_below_eps(name, seed, eps, n):
    dom, sp, (f,) = random_maps(name, seed, n, 1)
    g, report = countable_quantize(f, eps)
    assert report.achieved_error < eps
    assert dp_distance(g.to_map(), f, math.inf) < eps
    assert g.range_size <= n


@given(seed=SEEDS, cells=st.integers(6, 24))
def test_urysohn_properties_1d(seed, cells):
    rng = np.random.default_rng(seed)
    dom = Domain.grid(1, cells)
    lo = int(rng.integers(0, cells - 3))
    hi = int(rng.integers(lo + 3, cells + 1))
    region = AtomSet(np.arange(lo, hi), cells)
    mid = (lo + hi) // 2
    core = AtomSet(np.array([mid]), cells)
    trans = urysohn(dom, core, region)
    vals = trans.values
    assert np.all((0.0 <= vals) & (vals <= 1.0))
    assert vals[mid] == 1.0
    outside = np.setdiff1d(np.arange(cells), region.indices)
    assert np.all(vals[outside] == 0.0)
    left, right = face_adjacent_pairs(dom.geometry)
    bound = dom.geometry.cell_size / trans.gap_width
    assert np.max(np.abs(vals[left] - vals[right])) <= bound * (1 + REL)


@given(order=st.integers(0, 2), seed=SEEDS)
def test_smoothstep_monotone_endpoints(order, seed):
    rng = np.random.default_rng(seed)
    t = np.sort(np.concatenate([[0.0, 1.0], rng.uniform(0, 1, 40)]))
    s = smoothstep(t, order)
    assert s[0] == 0.0 and s[-1] == 1.0
    assert np.all(np.diff(s) >= 0.0)
    assert np.all((0.0 <= s) & (s <= 1.0))


@given(name=SPACE, seed=SEEDS, t=st.floats(0.0, 1.0))
def test_geodesic_points_stay_in_space(name, seed, t):
    sp = make_space(name)
    if not sp.has_geodesic:
        pytest.skip("no paths")
    rng = np.random.default_rng(seed)
    pts = sp.random_payloads(rng, 2)
    mid = sp.geodesic_many(pts[0:1], pts[1:2], np.array([t]))
    sp.check_payload(mid)  # raises if the payload left the space
    d_am = sp.distance_many(pts[0:1], mid)[0]
    d_ab = sp.distance_many(pts[0:1], pts[1:2])[0]
    assert d_am <= d_ab * (1 + 1e-9) + 1e-12
