"""Machine checks for the structural guarantees of the library.

Three groups:

- Completeness: fast Cauchy sequences (consecutive gaps <= 2**-n), limit
  extraction with measured tail certificates, and a fixture over a
  resolution-floored target (rationals with bounded denominator) whose
  missing limit surfaces as the documented non-convergence error.
- Separability: a countable family (base mapping altered on boolean
  combinations of generator sets, values from a dense sequence) plus a
  probe that returns the first family member within eps of a target --
  either by literal enumeration or by an equivalent branch-and-bound walk
  of the same order.
- `run_theorem_suite`: a deterministic battery asserting the library's
  invariants end to end, emitting a JSON-able ledger with one entry per
  check.
"""

from __future__ import annotations

import itertools
import math
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import fields, quantize, relax
from .domain import (
    AtomSet,
    Domain,
    face_adjacent_pairs,
    inner_closed_approx,
    is_purely_infinite,
    measure,
    outer_open_approx,
    urysohn,
)
from .errors import CapabilityError, MetricLpError, NonConvergenceError, SearchBudgetError
from .maps import (
    MeasurableMap,
    check_p,
    differing_support,
    dp_distance,
    equivalent,
    is_member,
    is_trivial,
    pointwise_distance,
    restrict,
)
from .spaces import Point, make_space

Array = np.ndarray

FAST_GAP_SLACK = 1e-12
CERTIFICATE_SLACK = 1e-9


# ---------------------------------------------------------------------------
# completeness: fast Cauchy sequences and their limits
# ---------------------------------------------------------------------------


@dataclass
class CauchySequenceSpec:
    """A D_p-Cauchy sequence: stored prefix plus optional generator.

    `generator(n)` must return the n-th term (1-based) for any n beyond
    the prefix.  The fast schedule D_p(f_n, f_{n+1}) <= 2**-n is a
    precondition on the prefix and is re-checked on every pulled term.
    """

    p: float
    prefix: list[MeasurableMap]
    generator: Callable[[int], MeasurableMap] | None = None

    def term(self, n: int) -> MeasurableMap:
        if n < 1:
            raise MetricLpError("sequence terms are 1-based")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        if self.generator is None:
            raise MetricLpError(f"term {n} beyond the stored prefix")
        return self.generator(n)


def is_fast_cauchy(spec: CauchySequenceSpec) -> bool:
    """Check the 2**-n gap schedule on the stored prefix."""
    for i in range(len(spec.prefix) - 1):
        gap = dp_distance(spec.prefix[i], spec.prefix[i + 1], spec.p)
        if gap > 2.0 ** (-(i + 1)) + FAST_GAP_SLACK:
            return False
    return True


def fast_subsequence(maps: list[MeasurableMap], p: float) -> list[int]:
    """Greedy indices of a subsequence obeying the 2**-k gap schedule.

    Starts at the first map; for each k picks the first later map within
    2**-k of the last pick.  Stops when the tail offers no admissible
    continuation, so the result may be a strict prefix selection.
    """
    if not maps:
        return []
    picks = [0]
    k = 1
    j = 0
    while True:
        budget = 2.0**-k
        nxt = None
        for cand in range(j + 1, len(maps)):
            if dp_distance(maps[j], maps[cand], p) <= budget + FAST_GAP_SLACK:
                nxt = cand
                break
        if nxt is None:
            return picks
        picks.append(nxt)
        j = nxt
        k += 1


@dataclass
class RieszFischerResult:
    limit: MeasurableMap
    n_terms: int
    residual: float
    certificates: list[tuple[int, float, float]]  # (n, measured, bound)


def riesz_fischer_limit(
    spec: CauchySequenceSpec, tol: float = 1e-10, max_pull: int = 64
) -> RieszFischerResult:
    """Certified limit of a fast Cauchy sequence.

    Pulls terms until the schedule residual 2**-(m-1) (the worst possible
    distance from term m to any limit, summing the remaining gap bounds)
    drops below `tol`, then returns term m as the limit with measured
    certificates D_p(f_n, limit) <= 2**-(n-1) + 1e-9 for every stored n.
    A pulled gap exceeding its 2**-k budget means the sequence left the
    fast schedule before stabilizing -- the observable trace of a missing
    limit -- and raises NonConvergenceError.
    """
    p = check_p(spec.p)
    maps = list(spec.prefix)
    if not maps:
        raise MetricLpError("need at least one stored term")
    if not is_fast_cauchy(spec):
        raise MetricLpError("stored prefix violates the fast gap schedule")
    target_m = max(len(maps), int(math.ceil(-math.log2(tol))) + 1)
    pulls = 0
    while len(maps) < target_m:
        if spec.generator is None or pulls >= max_pull:
            raise NonConvergenceError(
                f"cannot certify a limit: residual 2**-(m-1) with m={len(maps)} "
                f"terms exceeds tol={tol} and no further terms are available"
            )
        nxt = spec.term(len(maps) + 1)
        k = len(maps)
        gap = dp_distance(maps[-1], nxt, p)
        if gap > 2.0**-k + FAST_GAP_SLACK:
            raise NonConvergenceError(
                f"gap {gap:.3e} at index {k} exceeds the fast schedule "
                f"2**-{k} = {2.0 ** -k:.3e}; the sequence stalled before a "
                "limit could be certified"
            )
        maps.append(nxt)
        pulls += 1
    limit = MeasurableMap(maps[-1].domain, maps[-1].space, maps[-1].values.copy())
    residual = 2.0 ** (-(len(maps) - 1))
    certificates = []
    for i, f_n in enumerate(maps):
        n = i + 1
        bound = 2.0 ** (-(n - 1)) + CERTIFICATE_SLACK
        measured = dp_distance(f_n, limit, p)
        if measured > bound:
            raise MetricLpError(
                f"certificate violated at n={n}: {measured:.3e} > {bound:.3e}"
            )
        certificates.append((n, measured, bound))
    return RieszFischerResult(limit, len(maps), residual, certificates)


def incomplete_fixture() -> CauchySequenceSpec:
    """Fast Cauchy sequence in a resolution-floored target with no limit.

    Values live on the rational grid with denominator <= 10**6 (modelling
    the rationals as an incomplete target).  The sequence chases
    sqrt(2)/2: dyadic truncations floor(a*2**n)/2**n are legal grid
    rationals up to n = 19 (denominator 2**19 < 10**6), after which the
    best available terms are the two grid rationals bracketing the
    irrational limit, 10**-6 apart.  That oscillation breaks the 2**-n
    schedule at n = 20 (2**-20 < 10**-6), so `riesz_fischer_limit` raises
    its non-convergence error -- precisely because the limit is missing
    from the target.
    """
    alpha = math.sqrt(2.0) / 2.0
    domain = Domain(np.full(4, 0.25))
    space = make_space("euclidean1")
    low = math.floor(alpha * 10**6) / 10**6
    high = low + 1e-6

    def term(n: int) -> MeasurableMap:
        if n <= 19:
            v = math.floor(alpha * 2**n) / 2**n
        else:
            v = high if n % 2 else low
        return MeasurableMap.constant(domain, space, Point(space.tag, [v]))

    return CauchySequenceSpec(p=2.0, prefix=[term(n) for n in range(1, 13)], generator=term)


def geodesic_cauchy_fixture(
    domain: Domain,
    space,
    rng: np.random.Generator,
    p: float,
) -> tuple[CauchySequenceSpec, MeasurableMap]:
    """Fast Cauchy sequence sliding along per-atom geodesics, plus its
    known limit.  Per-atom geodesic lengths are clipped to 0.9 and the
    domain measure is at most 1, so gaps are at most 0.9 * 2**-n."""
    n_atoms = domain.atom_count
    start = space.random_payloads(rng, n_atoms)
    raw = space.random_payloads(rng, n_atoms)
    lengths = space.distance_many(start, raw)
    shrink = np.minimum(1.0, 0.9 / np.maximum(lengths, 1e-12))
    target = space.geodesic_many(start, raw, shrink)

    def term(n: int) -> MeasurableMap:
        t = 1.0 - 2.0 ** (-(n - 1))
        vals = space.geodesic_many(start, target, np.full(n_atoms, t))
        return MeasurableMap(domain, space, vals)

    spec = CauchySequenceSpec(p=p, prefix=[term(n) for n in range(1, 7)], generator=term)
    return spec, MeasurableMap(domain, space, target)


# ---------------------------------------------------------------------------
# separability: countable dense family and the first-member probe
# ---------------------------------------------------------------------------


@dataclass
class DenseFamily:
    """Countable family: base mapping altered on Venn cells of generator
    sets, with altered values drawn from a dense-sequence prefix.

    Members are enumerated by (number of altered cells ascending, cell
    index combinations lexicographic, value index tuples lexicographic);
    member 0 is the unaltered base.
    """

    domain: Domain
    space: object
    base: MeasurableMap
    generators: list[AtomSet]
    cells: list[AtomSet]
    values: Array

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_values(self) -> int:
        return int(self.values.shape[0])


def build_dense_family(
    base: MeasurableMap, gen_levels: int = 2, val_budget: int = 8
) -> DenseFamily:
    """Generators are dyadic half-spaces {coordinate_axis <= j/2**l} for
    grid domains (ordered by level, then axis, then threshold) and atom
    singletons otherwise; cells are the nonempty Venn atoms of the
    generators, ordered by first atom index."""
    domain = base.domain
    n = domain.atom_count
    generators: list[AtomSet] = []
    if domain.geometry is not None:
        coords = domain.coordinates()
        for level in range(1, gen_levels + 1):
            for axis in range(domain.geometry.dim):
                for j in range(1, 2**level, 2):
                    thr = j / 2.0**level
                    generators.append(AtomSet.from_mask(coords[:, axis] <= thr))
    else:
        generators = [AtomSet(np.array([i]), n) for i in range(n)]
    signature = np.stack([g.mask() for g in generators], axis=1) if generators else np.zeros((n, 0), dtype=bool)
    _, first, inverse = np.unique(
        signature, axis=0, return_index=True, return_inverse=True
    )
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    cell_ids = rank[inverse.reshape(-1)]
    cells = [AtomSet.from_mask(cell_ids == c) for c in range(order.size)]
    values = base.space.dense_payloads(val_budget)
    return DenseFamily(domain, base.space, base, generators, cells, values)


def member_from_pairs(
    family: DenseFamily, pairs: tuple[tuple[int, int], ...]
) -> MeasurableMap:
    """Materialize the family member altering cell c to value v per pair."""
    vals = family.base.values.copy()
    for c, v in pairs:
        vals[family.cells[c].indices] = family.values[v]
    return MeasurableMap(family.domain, family.space, vals)


def enumerate_members(family: DenseFamily, cap: int):
    """Yield (pairs, member) in the documented order, at most cap members."""
    count = 0
    for k in range(family.n_cells + 1):
        for cells in itertools.combinations(range(family.n_cells), k):
            for vals in itertools.product(range(family.n_values), repeat=k):
                if count >= cap:
                    return
                pairs = tuple(zip(cells, vals))
                yield pairs, member_from_pairs(family, pairs)
                count += 1


@dataclass
class ProbeReport:
    found: bool
    pairs: tuple[tuple[int, int], ...]
    distance: float | None
    p: float
    eps: float
    mode: str
    scanned: int | None = None


def separability_probe(
    f: MeasurableMap,
    family: DenseFamily,
    p: float,
    eps: float,
    exhaustive: bool = False,
    member_cap: int = 200_000,
) -> ProbeReport:
    """First family member at D_p distance strictly below eps from f.

    `exhaustive=True` literally walks the enumeration (the oracle path,
    capped at member_cap members).  The default path computes per-cell
    alteration costs and walks cell combinations / value tuples with an
    exact best-completion bound, visiting candidates in the same order as
    the enumeration and returning the same first solution.
    """
    p = check_p(p)
    if math.isinf(p):
        raise MetricLpError("the probe needs a finite exponent p")
    if eps <= 0:
        raise MetricLpError("eps must be positive")
    if exhaustive:
        scanned = 0
        for pairs, member in enumerate_members(family, member_cap):
            scanned += 1
            dist = dp_distance(f, member, p)
            if dist < eps:
                return ProbeReport(True, pairs, dist, p, eps, "exhaustive", scanned)
        return ProbeReport(False, (), None, p, eps, "exhaustive", scanned)

    w = np.where(np.isinf(family.domain.weights), 0.0, family.domain.weights)
    d_base = pointwise_distance(f, family.base)
    eps_pow = eps**p
    n_cells, n_vals = family.n_cells, family.n_values
    cost_base = np.array(
        [float(np.sum(w[c.indices] * d_base[c.indices] ** p)) for c in family.cells]
    )
    cost_val = np.zeros((n_cells, n_vals))
    for ci, c in enumerate(family.cells):
        idx = c.indices
        for vi in range(n_vals):
            dv = family.space.distance_many(
                f.values[idx], np.broadcast_to(family.values[vi], f.values[idx].shape)
            )
            cost_val[ci, vi] = float(np.sum(w[idx] * dv**p))
    total_base = float(cost_base.sum())
    gains = cost_base - cost_val.min(axis=1)
    need = total_base - eps_pow  # feasible iff selected gains sum > need

    def first_feasible_cells(k: int) -> list[int] | None:
        chosen: list[int] = []
        acc = 0.0
        last = -1
        for slot in range(k):
            r = k - slot - 1
            found = None
            for c in range(last + 1, n_cells - r):
                rest = gains[c + 1 :]
                top = float(np.sort(rest)[::-1][:r].sum()) if r else 0.0
                if acc + gains[c] + top > need:
                    found = c
                    break
            if found is None:
                return None
            chosen.append(found)
            acc += gains[found]
            last = found
        return chosen

    if total_base < eps_pow:
        dist = dp_distance(f, family.base, p)
        return ProbeReport(True, (), dist, p, eps, "optimized")
    for k in range(1, n_cells + 1):
        cells = first_feasible_cells(k)
        if cells is None:
            continue
        base_rest = total_base - float(cost_base[cells].sum())
        min_rest = [float(cost_val[c].min()) for c in cells]
        chosen_vals: list[int] = []
        fixed = 0.0
        for i, c in enumerate(cells):
            tail = sum(min_rest[i + 1 :])
            pick = None
            for v in range(n_vals):
                if base_rest + fixed + cost_val[c, v] + tail < eps_pow:
                    pick = v
                    break
            if pick is None:
                raise MetricLpError("internal probe inconsistency")
            chosen_vals.append(pick)
            fixed += float(cost_val[c, pick])
        pairs = tuple(zip(cells, chosen_vals))
        dist = dp_distance(f, member_from_pairs(family, pairs), p)
        return ProbeReport(True, pairs, dist, p, eps, "optimized")
    return ProbeReport(False, (), None, p, eps, "optimized")


# ---------------------------------------------------------------------------
# the theorem suite
# ---------------------------------------------------------------------------


@dataclass
class SuiteConfig:
    seed: int = 0
    mutations: tuple[str, ...] = ()


@dataclass
class SuiteResult:
    entries: list[dict]
    seed: int
    runtime_seconds: float

    @property
    def all_pass(self) -> bool:
        return all(e["status"] == "pass" for e in self.entries)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "all_pass": self.all_pass,
            "runtime_seconds": self.runtime_seconds,
            "entries": self.entries,
        }


class SuiteContext:
    def __init__(self, config: SuiteConfig):
        self.config = config

    def rng(self, tag: str) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, zlib.crc32(tag.encode())])

    def space(self, name: str):
        space = make_space(name)
        if "negate_euclidean_distance" in self.config.mutations and name.startswith(
            "euclidean"
        ):
            orig = space._distance_many
            space._distance_many = lambda a, b: -orig(a, b)
        return space


SPACE_NAMES = ["euclidean3", "spd2", "simplex3", "histogram8", "circle"]


def _check_space_metric_axioms(ctx: SuiteContext) -> dict:
    worst_tri = 0.0
    for name in SPACE_NAMES:
        space = ctx.space(name)
        rng = ctx.rng(f"axioms-{name}")
        x = space.random_payloads(rng, 120)
        a, b, c = x[0::3], x[1::3], x[2::3]
        d_ab = space.distance_many(a, b)
        d_ba = space.distance_many(b, a)
        d_ac = space.distance_many(a, c)
        d_cb = space.distance_many(c, b)
        assert np.array_equal(d_ab, d_ba), f"{name}: symmetry not exact"
        assert np.all(space.distance_many(a, a) == 0.0), f"{name}: identity not exact"
        assert np.all(d_ab > 0.0), f"{name}: positivity violated"
        slack = d_ab - (d_ac + d_cb)
        rel = float(np.max(slack / np.maximum(d_ab, 1e-300)))
        worst_tri = max(worst_tri, rel)
        assert rel <= 1e-12, f"{name}: triangle violated by {rel:.2e} relative"
    return {"worst_triangle_rel": worst_tri}


def _check_space_geodesics(ctx: SuiteContext) -> dict:
    worst = 0.0
    for name in SPACE_NAMES:
        space = ctx.space(name)
        rng = ctx.rng(f"geodesic-{name}")
        a = space.random_payloads(rng, 40)
        b = space.random_payloads(rng, 40)
        d = space.distance_many(a, b)
        ends0 = space.geodesic_many(a, b, np.zeros(40))
        ends1 = space.geodesic_many(a, b, np.ones(40))
        assert np.array_equal(ends0, a) and np.array_equal(ends1, b), (
            f"{name}: geodesic endpoints not verbatim"
        )
        for t in (0.25, 0.5, 0.75):
            mid = space.geodesic_many(a, b, np.full(40, t))
            gap = np.abs(space.distance_many(a, mid) - t * d)
            rel = float(np.max(gap / (1.0 + d)))
            worst = max(worst, rel)
            assert rel <= 1e-9, f"{name}: geodesic speed off by {rel:.2e} at t={t}"
    return {"worst_speed_rel": worst}


def _check_space_dense(ctx: SuiteContext) -> dict:
    metrics = {}
    for name in SPACE_NAMES:
        space = ctx.space(name)
        if not space.has_dense_sequence:
            continue
        k = 40
        prefix = space.dense_payloads(k)
        longer = space.dense_payloads(k + 17)
        assert np.array_equal(prefix, longer[:k]), f"{name}: enumeration not a prefix"
        probe = space.unit_probe()
        radii = []
        for m in (5, 10, 20, 40):
            chunk = prefix[:m]
            dist = np.stack(
                [
                    space.distance_many(
                        probe, np.broadcast_to(chunk[j], probe.shape)
                    )
                    for j in range(m)
                ]
            )
            radii.append(float(dist.min(axis=0).max()))
        assert all(
            r2 <= r1 + 1e-12 for r1, r2 in zip(radii, radii[1:])
        ), f"{name}: covering radius not shrinking {radii}"
        metrics[f"{name}_covering_radius_40"] = radii[-1]
    return metrics


def _check_space_nets(ctx: SuiteContext) -> dict:
    space = ctx.space("euclidean2")
    center = Point(space.tag, [0.0, 0.0])
    net = space.epsilon_net(center, 1.0, 0.4)
    table = np.vstack([q.payload for q in net])
    probes = space.probe_ball(center, 1.0, 0.05)
    dist = np.stack(
        [
            space.distance_many(probes, np.broadcast_to(row, probes.shape))
            for row in table
        ]
    )
    assert float(dist.min(axis=0).max()) < 0.4, "euclidean net fails its covering"
    # Greedy farthest-first on the full circle: {0, pi} covers at radius
    # pi/2, so eps above pi/2 stops at 2 points; below it the third insert
    # still leaves an antipodal midpoint at distance pi/2, forcing a
    # fourth -- greedy never returns 3 here.  Margins of 0.3 keep both
    # assertions clear of the probe-grid spacing (~eps/4).
    circle = ctx.space("circle")
    north = Point("circle", [0.0])
    net2 = circle.epsilon_net(north, math.pi, math.pi / 2 + 0.3)
    assert len(net2) == 2, f"circle net size {len(net2)} != 2"
    net4 = circle.epsilon_net(north, math.pi, math.pi / 2 - 0.3)
    assert len(net4) == 4, f"circle net size {len(net4)} != 4"
    hist = ctx.space("histogram8")
    try:
        hist.epsilon_net(Point(hist.tag, np.full(8, 1 / 8)), 1.0, 0.1)
        raise AssertionError("histogram accepted an epsilon net request")
    except CapabilityError:
        pass
    return {
        "euclidean_net_size": len(net),
        "circle_net_sizes": [len(net2), len(net4)],
    }


def _check_domain_measure(ctx: SuiteContext) -> dict:
    rng = ctx.rng("measure")
    domain = Domain.grid(2, 16)
    full = AtomSet.full(domain.atom_count)
    assert abs(measure(domain, full) - 1.0) <= 1e-12
    mask = rng.random(domain.atom_count) < 0.5
    s1, s2 = AtomSet.from_mask(mask), AtomSet.from_mask(~mask)
    add_gap = abs(measure(domain, s1) + measure(domain, s2) - measure(domain, full))
    assert add_gap <= 1e-12, "additivity violated"
    w = np.array([0.0, math.inf, 1.0])
    dom_inf = Domain(w)
    assert math.isinf(measure(dom_inf, AtomSet.full(3)))
    assert not is_purely_infinite(dom_inf)
    assert is_purely_infinite(Domain(np.array([0.0, math.inf])))
    return {"additivity_gap": add_gap}


def _check_domain_morphology(ctx: SuiteContext) -> dict:
    rng = ctx.rng("morphology")
    domain = Domain.grid(2, 24)
    coords = domain.coordinates()
    worst_urysohn = 0.0
    for trial in range(4):
        c0 = rng.uniform(0.3, 0.7, size=2)
        r0 = rng.uniform(0.12, 0.25)
        b = AtomSet.from_mask(((coords - c0) ** 2).sum(axis=1) <= r0**2)
        if b.size == 0:
            continue
        delta = float(rng.uniform(0.01, 0.08))
        inner = inner_closed_approx(domain, b, delta)
        outer = outer_open_approx(domain, b, delta)
        assert inner.atoms.size > 0, "erosion emptied the core"
        assert np.all(np.isin(inner.atoms.indices, b.indices)), "core not inside input"
        assert np.all(np.isin(b.indices, outer.atoms.indices)), "input not inside envelope"
        if not inner.over_budget:
            assert inner.gap < delta, "erosion exceeded its measure budget"
        if not outer.over_budget:
            assert outer.gap < delta, "dilation exceeded its measure budget"
        trans = urysohn(domain, inner.atoms, outer.atoms)
        vals = trans.values
        assert np.all(vals[inner.atoms.indices] == 1.0), "transition not 1 on the core"
        outside = AtomSet.full(domain.atom_count).difference(outer.atoms)
        assert np.all(vals[outside.indices] == 0.0), "transition not 0 outside"
        assert np.all((vals >= 0.0) & (vals <= 1.0))
        left, right = face_adjacent_pairs(domain.geometry)
        diffs = np.abs(vals[left] - vals[right])
        bound = domain.geometry.cell_size / trans.gap_width + 1e-12
        worst_urysohn = max(worst_urysohn, float(diffs.max() - bound))
        assert diffs.max() <= bound, "transition modulus violated"
    return {"worst_urysohn_slack": worst_urysohn}


def _check_lp_metric(ctx: SuiteContext) -> dict:
    domain = Domain(np.concatenate([ctx.rng("lpw").uniform(0.01, 1.0, 30), [0.0, 0.0]]))
    worst = 0.0
    for name in ("euclidean2", "simplex3"):
        space = ctx.space(name)
        rng = ctx.rng(f"lp-{name}")
        f, g, h = (fields.random_map(domain, space, rng) for _ in range(3))
        for p in (1.0, 1.7, 2.0, 4.0, math.inf):
            d_fg = dp_distance(f, g, p)
            assert d_fg == dp_distance(g, f, p), "D_p symmetry not exact"
            assert dp_distance(f, f, p) == 0.0
            slack = d_fg - (dp_distance(f, h, p) + dp_distance(h, g, p))
            rel = slack / max(d_fg, 1e-300)
            worst = max(worst, rel)
            assert rel <= 1e-12, f"D_{p} triangle violated by {rel:.2e}"
        twin = MeasurableMap(domain, space, f.values.copy())
        twin.values[-1] = g.values[-1]  # zero-weight atom may differ freely
        assert equivalent(f, twin)
        for p in (1.0, 2.0, math.inf):
            assert dp_distance(f, twin, p) == 0.0
        other = MeasurableMap(domain, space, f.values.copy())
        other.values[0] = g.values[0]
        assert not equivalent(f, other)
        assert dp_distance(f, other, 2.0) > 0.0
    return {"worst_triangle_rel": float(worst)}


def _check_lp_embedding(ctx: SuiteContext) -> dict:
    rng = ctx.rng("embed")
    space = ctx.space("euclidean3")
    worst = 0.0
    for mu in (0.5, 1.0, 4.0):
        domain = Domain(np.full(16, mu / 16))
        pts = space.random_payloads(rng, 2)
        a, b = Point(space.tag, pts[0]), Point(space.tag, pts[1])
        fa = MeasurableMap.constant(domain, space, a)
        fb = MeasurableMap.constant(domain, space, b)
        d = space.distance_many(pts[0][None], pts[1][None])[0]
        for p in (1.0, 2.0, 4.0):
            got = dp_distance(fa, fb, p)
            want = mu ** (1.0 / p) * d
            rel = abs(got - want) / want
            worst = max(worst, rel)
            assert rel <= 1e-12
        assert abs(dp_distance(fa, fb, math.inf) - d) <= 1e-12 * d
    return {"worst_embedding_rel": float(worst)}


def _check_lp_holder_base(ctx: SuiteContext) -> dict:
    rng = ctx.rng("holder")
    domain = Domain.grid(1, 64)
    space = ctx.space("euclidean2")
    worst_h = worst_b = 0.0
    for _ in range(20):
        f = fields.random_map(domain, space, rng)
        g = fields.random_map(domain, space, rng)
        h2 = fields.random_map(domain, space, rng)
        for p, q in ((1.0, 2.0), (2.0, 4.0), (1.5, 3.0)):
            lhs = dp_distance(f, g, p)
            rhs = dp_distance(f, g, q) * 1.0 ** (1 / p - 1 / q)
            rel = (lhs - rhs) / max(rhs, 1e-300)
            worst_h = max(worst_h, rel)
            assert rel <= 1e-12, "Hoelder inclusion violated"
        for p in (1.0, 2.0, 4.0):
            lhs = dp_distance(f, h2, p) ** p
            rhs = 2.0 ** (p - 1) * (
                dp_distance(f, g, p) ** p + dp_distance(g, h2, math.inf) ** p * 1.0
            )
            rel = (lhs - rhs) / max(rhs, 1e-300)
            worst_b = max(worst_b, rel)
            assert rel <= 1e-12, "base-invariance bound violated"
    return {"worst_holder_rel": float(worst_h), "worst_base_rel": float(worst_b)}


def _check_lp_triviality_support(ctx: SuiteContext) -> dict:
    rng = ctx.rng("trivial")
    space = ctx.space("euclidean2")
    dom_pinf = Domain(np.array([0.0, math.inf, math.inf, 0.0]))
    assert is_trivial(dom_pinf, space)
    h = fields.random_map(dom_pinf, space, rng)
    f = MeasurableMap(dom_pinf, space, h.values.copy())
    f.values[0] = f.values[0] + 5.0  # zero-weight atom
    for p in (1.0, 2.0, 4.0):
        assert is_member(f, h, p) and dp_distance(f, h, p) == 0.0
    assert not is_trivial(Domain.grid(1, 4), space)
    assert is_trivial(Domain.grid(1, 4), make_space("simplex1"))

    domain = Domain(np.concatenate([[0.0], ctx.rng("supw").uniform(0.01, 2.0, 40)]))
    f = fields.random_map(domain, space, rng)
    h2 = fields.random_map(domain, space, rng)
    pieces = differing_support(f, h2, 2.0)
    seen = np.zeros(domain.atom_count, dtype=bool)
    d = pointwise_distance(f, h2)
    live = (d > 0) & (domain.weights > 0)
    for (nlev, mlev), atoms in pieces.items():
        assert not seen[atoms.indices].any(), "support pieces overlap"
        seen[atoms.indices] = True
        assert math.isfinite(measure(domain, atoms))
        for x in atoms.indices:
            assert d[x] > 1.0 / nlev
            assert nlev == 1 or d[x] <= 1.0 / (nlev - 1)
            base_d = space.distance_many(
                h2.values[x][None], space.dense_payloads(1)[0][None]
            )[0]
            assert base_d <= mlev, "base-boundedness level misses the target-side value"
            assert base_d > mlev - 1 or mlev == 0, "base-boundedness level is not minimal"
    assert np.array_equal(np.nonzero(seen)[0], np.nonzero(live)[0])
    return {"n_pieces": len(pieces)}


def _check_approx_countable(ctx: SuiteContext) -> dict:
    rng = ctx.rng("countable")
    domain = Domain.grid(2, 16)
    space = ctx.space("euclidean2")
    f = fields.smooth_field(domain, space, rng)
    eps = 0.2
    simple, report = quantize.countable_quantize(f, eps)
    assert report.achieved_error < eps
    assert simple.range_size <= domain.atom_count
    half = AtomSet.from_mask(np.arange(domain.atom_count) < domain.atom_count // 2)
    out2, rep2 = quantize.countable_quantize(
        f, eps, pieces=[half, half.complement()], p=2.0
    )
    assert rep2.achieved_error < eps
    return {"sup_error": report.achieved_error, "sigma_error": rep2.achieved_error}


def _check_approx_almost_simple(ctx: SuiteContext) -> dict:
    metrics = {}
    for name in ("spd2", "simplex3"):
        space = ctx.space(name)
        rng = ctx.rng(f"almost-{name}")
        domain = Domain.grid(2, 24)
        f = fields.smooth_field(domain, space, rng)
        h = MeasurableMap.constant(
            domain, space, Point(space.tag, space.random_payloads(rng, 1)[0])
        )
        for p in (1.0, 2.0):
            eps = 0.3
            simple, report = quantize.almost_simple_approx(f, h, p, eps)
            assert report.achieved_error < eps, f"{name} p={p}: error too large"
            for step, err in report.step_breakdown.items():
                assert err < eps / 3, f"{name} p={p}: {step} overspent"
            metrics[f"{name}_p{p}_error"] = report.achieved_error
            metrics[f"{name}_p{p}_range"] = report.range_size
    return metrics


def _check_approx_sup_net(ctx: SuiteContext) -> dict:
    metrics = {}
    for name in ("euclidean2", "circle"):
        space = ctx.space(name)
        rng = ctx.rng(f"supnet-{name}")
        domain = Domain.grid(2, 12)
        f = fields.smooth_field(domain, space, rng)
        h = MeasurableMap.constant(domain, space, Point(space.tag, f.values[0].copy()))
        eps = 0.25
        simple, report = quantize.simple_approx_sup(f, h, eps)
        assert report.achieved_error < eps
        metrics[f"{name}_error"] = report.achieved_error
    hist = ctx.space("histogram8")
    rng = ctx.rng("supnet-hist")
    domain = Domain.grid(2, 6)
    f = fields.random_map(domain, hist, rng)
    h = MeasurableMap.constant(domain, hist, Point(hist.tag, f.values[0].copy()))
    try:
        quantize.simple_approx_sup(f, h, 0.25)
        raise AssertionError("histogram target accepted a sup quantization")
    except CapabilityError:
        pass
    return metrics


def _check_approx_orthonormal(ctx: SuiteContext) -> dict:
    floor = math.sqrt(2.0) / 2.0
    metrics = {}
    for n, k in ((4, 3), (6, 2), (6, 5)):
        rep = quantize.orthonormal_lower_bound(n, k)
        assert rep.min_max_error >= floor - 1e-12
        assert abs(rep.min_max_error - rep.pigeonhole_bound) <= 1e-12
        d_inf = dp_distance(rep.mapping, rep.best_map.to_map(), math.inf)
        assert abs(d_inf - rep.min_max_error) <= 1e-12
        metrics[f"minmax_{n}_{k}"] = rep.min_max_error
    assert quantize.orthonormal_lower_bound(4, 4).min_max_error == 0.0
    return metrics


def _check_approx_divergence(ctx: SuiteContext) -> dict:
    const_seq, k_seq = [], []
    for n in (64, 128, 256, 512, 1024):
        rep = quantize.divergence_fixture("unbounded_base", n, 2.0, 3)
        assert rep.best_k_error <= rep.best_constant_error + 1e-12
        const_seq.append(rep.best_constant_error)
        k_seq.append(rep.best_k_error)
    assert all(a < b for a, b in zip(const_seq, const_seq[1:])), const_seq
    assert all(a < b for a, b in zip(k_seq, k_seq[1:])), k_seq
    exp_seq = []
    for t in (1, 2, 3, 4, 5):
        rep = quantize.divergence_fixture("exponential_base", t, 1.0, 3)
        exp_seq.append(rep.best_k_error)
    assert all(a < b for a, b in zip(exp_seq, exp_seq[1:])), exp_seq
    return {"unbounded_last": const_seq[-1], "exponential_last": exp_seq[-1]}


def _relax_fixture_2d(ctx: SuiteContext):
    space = ctx.space("euclidean2")
    domain = Domain.grid(2, 48)
    labels = fields.disk_labels(
        domain.geometry, np.array([[0.3, 0.3], [0.7, 0.65]]), np.array([0.12, 0.15])
    )
    table = np.array([[0.0, 0.0], [0.4, 0.0], [0.0, 0.45]])
    g = fields.simple_from_labels(domain, space, labels, table)
    z0 = Point(space.tag, [0.0, 0.0])
    return g, z0


def _check_relax_continuous(ctx: SuiteContext) -> dict:
    g, z0 = _relax_fixture_2d(ctx)
    eps, p = 0.25, 1.0
    out = relax.continuous_from_simple(g, z0, p, eps)
    assert out.flags["guarantee_holds"], "budget flags raised on a sized fixture"
    assert out.achieved_error < relax.error_bound(out) <= eps
    for piece in out.pieces:
        core_vals = out.values[piece.core.indices]
        assert np.array_equal(
            core_vals, np.tile(piece.value, (piece.core.size, 1))
        ), "core values not exact"
    covered = np.zeros(g.domain.atom_count, dtype=bool)
    for piece in out.pieces:
        covered[piece.region.indices] = True
    outside = out.values[~covered]
    assert np.array_equal(outside, np.tile(out.background, (outside.shape[0], 1)))
    report = relax.adjacent_difference_report(out)
    assert report["max_ratio"] <= 1.0 + 1e-9, report
    return {"error": out.achieved_error, "modulus_ratio": report["max_ratio"]}


def _check_relax_smooth(ctx: SuiteContext) -> dict:
    g, z0 = _relax_fixture_2d(ctx)
    eps, p = 0.25, 1.0
    smooth = relax.smooth_from_simple(g, z0, p, eps, order=2)
    cont = relax.continuous_from_simple(g, z0, p, eps)
    order0 = relax.smooth_from_simple(g, z0, p, eps, order=0)
    assert np.array_equal(order0.values, cont.values), "order 0 is not bit-identical"
    assert smooth.achieved_error < eps
    for piece in smooth.pieces:
        assert piece.sup_gap <= piece.sup_gap_budget, "smooth sup budget exceeded"
    t = np.array([0.25])
    assert float(relax.smoothstep(t, 2)[0]) == 0.103515625
    assert relax.smoothstep_max_slope(1) == 1.5
    assert relax.smoothstep_max_slope(2) == 1.875

    space1 = ctx.space("euclidean1")
    domain1 = Domain.grid(1, 2**16)
    labels1 = fields.band_labels(domain1.geometry, 0.5, 0.09)
    g1 = fields.simple_from_labels(
        domain1, space1, labels1, np.array([[0.0], [1.0]])
    )
    z1 = Point(space1.tag, [0.0])
    sm1 = relax.smooth_from_simple(g1, z1, 1.0, 0.2, order=2)
    scan = relax.boundary_difference_scan(sm1)
    cell = domain1.geometry.cell_size
    assert scan["max_boundary_first_difference"] <= 10 * cell**2, scan
    assert scan["max_boundary_second_difference"] <= 10 * cell**2, scan
    co1 = relax.continuous_from_simple(g1, z1, 1.0, 0.2)
    scan0 = relax.boundary_difference_scan(co1)
    assert (
        scan["max_boundary_second_difference"]
        < scan0["max_boundary_second_difference"]
    ), "smoothstep did not flatten the boundary"
    return {
        "error": smooth.achieved_error,
        "boundary_d2": scan["max_boundary_second_difference"],
        "boundary_d2_continuous": scan0["max_boundary_second_difference"],
    }


def _check_riesz_fischer(ctx: SuiteContext) -> dict:
    worst = 0.0
    for name in SPACE_NAMES:
        space = ctx.space(name)
        domain = Domain(np.full(12, 1.0 / 12))
        for trial in range(10):
            rng = ctx.rng(f"riesz-{name}-{trial}")
            spec, known = geodesic_cauchy_fixture(domain, space, rng, p=2.0)
            result = riesz_fischer_limit(spec)
            gap = dp_distance(result.limit, known, 2.0)
            assert gap <= result.residual + 1e-9, "limit far from the known target"
            worst = max(worst, gap)
            for n, measured, bound in result.certificates:
                assert measured <= bound
    try:
        riesz_fischer_limit(incomplete_fixture())
        raise AssertionError("incomplete fixture produced a limit")
    except NonConvergenceError:
        pass
    space = ctx.space("euclidean1")
    domain = Domain(np.full(4, 0.25))
    slow = [
        MeasurableMap.constant(domain, space, Point("euclidean1", [1.0 / (j + 1)]))
        for j in range(40)
    ]
    picks = fast_subsequence(slow, 1.0)
    assert len(picks) >= 4
    for k in range(len(picks) - 1):
        gap = dp_distance(slow[picks[k]], slow[picks[k + 1]], 1.0)
        assert gap <= 2.0 ** -(k + 1) + FAST_GAP_SLACK
    return {"worst_limit_gap": worst, "fast_subsequence_len": len(picks)}


def _check_separability(ctx: SuiteContext) -> dict:
    space = ctx.space("euclidean1")
    domain = Domain.grid(1, 16)
    rng = ctx.rng("separability")
    h = MeasurableMap.constant(domain, space, Point(space.tag, [0.0]))
    family = build_dense_family(h, gen_levels=4, val_budget=5)
    assert family.n_cells == 16, "generators failed to isolate the cells"
    native_pairs = ((2, 1), (9, 3))
    native = member_from_pairs(family, native_pairs)
    probe = separability_probe(native, family, 2.0, 0.05)
    assert probe.found and probe.distance == 0.0
    assert probe.pairs == native_pairs, probe.pairs

    f = fields.smooth_field(domain, space, rng, spread=0.4)
    fam_fine = build_dense_family(h, gen_levels=4, val_budget=64)
    rep = separability_probe(f, fam_fine, 2.0, 0.05)
    assert rep.found and rep.distance is not None and rep.distance < 0.05

    small_dom = Domain.grid(1, 4)
    h_small = MeasurableMap.constant(small_dom, space, Point(space.tag, [0.0]))
    fam_small = build_dense_family(h_small, gen_levels=2, val_budget=3)
    for trial in range(3):
        rng_t = ctx.rng(f"sep-oracle-{trial}")
        target = fields.random_map(small_dom, space, rng_t, spread=0.5)
        eps = float(rng_t.uniform(0.2, 0.8))
        fast = separability_probe(target, fam_small, 2.0, eps)
        slow = separability_probe(target, fam_small, 2.0, eps, exhaustive=True)
        assert fast.found == slow.found
        if fast.found:
            assert fast.pairs == slow.pairs, (fast.pairs, slow.pairs)
            assert abs(fast.distance - slow.distance) <= 1e-12
    return {"native_distance": probe.distance, "quantized_distance": rep.distance}


CHECKS: list[tuple[str, str, Callable[[SuiteContext], dict]]] = [
    (
        "space.metric_axioms",
        "Each bundled target is a metric space: exact identity and symmetry, triangle inequality within 1e-12 relative.",
        _check_space_metric_axioms,
    ),
    (
        "space.geodesics",
        "Geodesics reproduce endpoints verbatim and run at constant speed within 1e-9.",
        _check_space_geodesics,
    ),
    (
        "space.dense_sequences",
        "Dense enumerations are stable prefixes with shrinking covering radii.",
        _check_space_dense,
    ),
    (
        "space.epsilon_nets",
        "Greedy nets cover their probe grids; the 1-D transport target refuses nets; circle net sizes bracket eps = pi/2 at 2 and 4 points.",
        _check_space_nets,
    ),
    (
        "domain.measure",
        "Grid weights integrate to one, measure is additive, and infinite atoms propagate.",
        _check_domain_measure,
    ),
    (
        "domain.morphology",
        "Erosion/dilation respect their measure budgets and inclusions; the distance-ratio transition is 1 on the core, 0 outside, with bounded adjacent increments.",
        _check_domain_morphology,
    ),
    (
        "lp.metric_axioms",
        "D_p is a metric for every p, with exact symmetry and zero exactly on equivalent pairs.",
        _check_lp_metric,
    ),
    (
        "lp.constant_embedding",
        "Constant mappings embed the target isometrically up to the factor measure(M)**(1/p).",
        _check_lp_embedding,
    ),
    (
        "lp.holder_base_bounds",
        "Hoelder inclusion D_p <= D_q * mu**(1/p-1/q) and the base-change bound with factor 2**(p-1) hold.",
        _check_lp_holder_base,
    ),
    (
        "lp.triviality_support",
        "Purely infinite weights collapse the space to one class; difference supports split into finite-measure pieces.",
        _check_lp_triviality_support,
    ),
    (
        "approx.countable_quantize",
        "Value snapping stays under its sup budget, including the sigma-finite piecewise mode.",
        _check_approx_countable,
    ),
    (
        "approx.almost_simple",
        "The three-step finite-value approximation spends under a third of the budget per step.",
        _check_approx_almost_simple,
    ),
    (
        "approx.sup_quantize",
        "Net-based sup quantization meets its budget on net-capable targets and refuses on the rest.",
        _check_approx_sup_net,
    ),
    (
        "approx.orthonormal_bound",
        "No k-valued map approximates n > k orthonormal directions below sqrt(2)/2 in sup distance.",
        _check_approx_orthonormal,
    ),
    (
        "approx.divergence",
        "Best simple errors increase strictly across refinements of the divergence fixtures.",
        _check_approx_divergence,
    ),
    (
        "relax.continuous",
        "The continuous relaxation meets its D_p budget with exact plateaus and the adjacent-cell modulus.",
        _check_relax_continuous,
    ),
    (
        "relax.smooth",
        "The smooth relaxation meets the same budgets, flattens boundary differences, and order 0 is bit-identical to the continuous construction.",
        _check_relax_smooth,
    ),
    (
        "verify.riesz_fischer",
        "Fast Cauchy sequences converge with tail certificates; the resolution-floored fixture raises the non-convergence error.",
        _check_riesz_fischer,
    ),
    (
        "verify.separability",
        "The countable family probe finds members within eps, exactly recovers native members, and matches the literal enumeration.",
        _check_separability,
    ),
]


def run_theorem_suite(config: SuiteConfig | None = None) -> SuiteResult:
    """Run every bundled check; one ledger entry per check, pass iff all pass."""
    config = config or SuiteConfig()
    ctx = SuiteContext(config)
    entries = []
    t0 = time.perf_counter()
    for check_id, statement, fn in CHECKS:
        try:
            metrics = fn(ctx)
            status = "pass"
        except Exception as exc:  # noqa: BLE001 - each check reports its own failure
            metrics = {"error": f"{type(exc).__name__}: {exc}"}
            status = "fail"
        entries.append(
            {
                "check_id": check_id,
                "statement": statement,
                "status": status,
                "metrics": metrics,
            }
        )
    return SuiteResult(entries, config.seed, time.perf_counter() - t0)
