"""Constructive approximation by mappings with few values.

- `countable_quantize` snaps every atom to the first sufficiently close
  value in a dense list built from the mapping's own distinct values, so
  the sup-distance to the input stays strictly under eps.  A sigma-finite
  mode quantizes a list of finite-measure pieces with geometrically
  shrinking sup budgets so the D_p error also stays under eps.
- `almost_simple_approx` runs the three-step construction that makes
  mappings with finitely many values (plus a base region) D_p-dense:
  revert small deviations to the base mapping, keep only values inside
  finitely many radius-R balls around a dense list, then collapse each
  ball remainder to its center (first cover wins).  Each step spends
  strictly less than a third of the budget.
- `simple_approx_sup` is the sup-norm variant: it covers the essential
  range with a finite epsilon net, which requires the target to supply
  nets (boundedly compact balls).
- `orthonormal_lower_bound` and `divergence_fixture` are the negative
  results: quantization cannot be better than sup-error sqrt(2)/2 against
  infinitely many orthonormal directions, and best-simple errors grow
  without saturating for base mappings that quantization cannot follow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .domain import AtomSet, Domain, measure
from .errors import MetricLpError, SearchBudgetError
from .maps import (
    BASE_LABEL,
    MeasurableMap,
    SimpleMap,
    check_p,
    dp_distance,
    is_member,
    pointwise_distance,
    restrict,
)
from .spaces import EuclideanSpace, MetricSpace, Point

Array = np.ndarray

STEP_SEARCH_CAP = 10**6


@dataclass
class ApproxReport:
    p: float
    target_eps: float
    achieved_error: float
    range_size: int
    altered_measure: float
    step_breakdown: dict[str, float] = field(default_factory=dict)
    flags: dict[str, bool] = field(default_factory=dict)


def _dedup_rows_in_order(values: Array) -> tuple[Array, Array]:
    """Distinct rows in first-occurrence order; also the inverse labels."""
    uniq, first, inverse = np.unique(
        values, axis=0, return_index=True, return_inverse=True
    )
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return uniq[order], rank[inverse.reshape(-1)]


def _first_cover(space: MetricSpace, values: Array, table: Array, radius: float) -> Array:
    """Per row of `values`, the first index of `table` strictly within
    `radius`; -1 when none.  Chunked so the cross-distance block stays small."""
    m, k = values.shape[0], table.shape[0]
    out = np.full(m, -1, dtype=np.int64)
    if m == 0 or k == 0:
        return out
    chunk = max(1, (1 << 22) // max(k, 1))
    for lo in range(0, m, chunk):
        hi = min(m, lo + chunk)
        block = values[lo:hi]
        left = np.repeat(block, k, axis=0)
        right = np.tile(table, (hi - lo, 1))
        dist = space.distance_many(left, right).reshape(hi - lo, k)
        covered = dist < radius
        hit = covered.any(axis=1)
        idx = np.argmax(covered, axis=1)
        out[lo:hi] = np.where(hit, idx, -1)
    return out


# ---------------------------------------------------------------------------
# countable quantization (sup norm)
# ---------------------------------------------------------------------------


def countable_quantize(
    f: MeasurableMap,
    eps: float,
    pieces: list[AtomSet] | None = None,
    p: float | None = None,
) -> tuple[SimpleMap, ApproxReport]:
    """Snap each atom to the first of the mapping's distinct values within eps.

    The dense list is f's distinct atom values in ascending atom order, so
    every atom finds a cover (its own value at distance 0) and the sup
    distance is strictly below eps.  With `pieces` (disjoint finite-measure
    atom sets covering the domain) and an exponent p, piece n is quantized
    with the shrunken budget eps / (2**(n+1) * measure(piece))**(1/p),
    which keeps the D_p error below eps on sigma-finite decompositions.
    """
    if eps <= 0:
        raise MetricLpError("eps must be positive")
    if pieces is None:
        return _quantize_once(f, eps)
    if p is None:
        raise MetricLpError("sigma-finite mode needs the exponent p")
    p = check_p(p)
    if math.isinf(p):
        raise MetricLpError("sigma-finite mode is for finite p")
    n_atoms = f.domain.atom_count
    seen = np.zeros(n_atoms, dtype=bool)
    labels = np.zeros(n_atoms, dtype=np.int64)
    tables: list[Array] = []
    offset = 0
    worst = 0.0
    for n, piece in enumerate(pieces):
        if seen[piece.indices].any():
            raise MetricLpError("pieces must be disjoint")
        seen[piece.indices] = True
        mu = measure(f.domain, piece)
        if math.isinf(mu):
            raise MetricLpError("sigma-finite pieces must have finite measure")
        budget = eps if mu == 0 else eps / (2 ** (n + 1) * mu) ** (1.0 / p)
        sub, rep = _quantize_once(restrict(f, piece), budget)
        labels[piece.indices] = sub.labels + offset
        tables.append(sub.value_table)
        offset += sub.value_table.shape[0]
        worst = max(worst, rep.achieved_error)
    if not seen.all():
        raise MetricLpError("pieces must cover the domain")
    table = np.vstack(tables) if tables else np.zeros((0, f.space.dim))
    out = SimpleMap(f.domain, f.space, labels, table)
    achieved = dp_distance(f, out.to_map(), p)
    report = ApproxReport(
        p=p,
        target_eps=eps,
        achieved_error=achieved,
        range_size=out.range_size,
        altered_measure=float(np.sum(f.domain.weights[np.isfinite(f.domain.weights)])),
        step_breakdown={"worst_piece_sup": worst},
    )
    return out, report


def _quantize_once(f: MeasurableMap, eps: float) -> tuple[SimpleMap, ApproxReport]:
    table, _ = _dedup_rows_in_order(f.values)
    labels = _first_cover(f.space, f.values, table, eps)
    if np.any(labels < 0):  # unreachable: each value covers itself at distance 0
        raise MetricLpError("quantization failed to cover a value")
    used = labels.max(initial=-1) + 1
    out = SimpleMap(f.domain, f.space, labels, table[:used])
    achieved = dp_distance(f, out.to_map(), math.inf)
    report = ApproxReport(
        p=math.inf,
        target_eps=eps,
        achieved_error=achieved,
        range_size=out.range_size,
        altered_measure=float(np.sum(f.domain.weights[np.isfinite(f.domain.weights)])),
    )
    return out, report


# ---------------------------------------------------------------------------
# almost-simple D_p approximation
# ---------------------------------------------------------------------------


def _smallest_index(lo: int, hi: int, pred) -> int:
    """Smallest n in [lo, hi] with pred(n), assuming pred is monotone."""
    if not pred(hi):
        raise SearchBudgetError(f"step search exhausted its cap ({hi})")
    while lo < hi:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def almost_simple_approx(
    f: MeasurableMap, h: MeasurableMap, p: float, eps: float
) -> tuple[SimpleMap, ApproxReport]:
    """Three-step construction of a finite-valued map within eps of f in D_p.

    Step 1 reverts atoms deviating from h by less than 1/n back to h, for
    the smallest n keeping the reverted error under eps/3.  Step 2 keeps
    only values inside the first balls of radius
    R = eps / (3 * measure(altered)**(1/p)) around a dense list of f's
    altered values, growing the ball prefix until the discarded error is
    under eps/3.  Step 3 assigns each surviving atom the center of the
    first ball covering it, spending at most R per atom, hence under eps/3
    in total.  Atoms reverted at any step carry the base label.
    """
    p = check_p(p)
    if math.isinf(p):
        raise MetricLpError("almost_simple_approx is the finite-p construction")
    if eps <= 0:
        raise MetricLpError("eps must be positive")
    if not is_member(f, h, p):
        raise MetricLpError("f must lie at finite D_p distance from h")
    n_atoms = f.domain.atom_count
    d = pointwise_distance(f, h)
    w = np.where(np.isinf(f.domain.weights), 0.0, f.domain.weights)
    contrib = w * d**p
    budget = (eps / 3.0) ** p

    # step 1: revert deviations below 1/n
    order = np.argsort(d, kind="stable")
    d_sorted = d[order]
    cum = np.cumsum(contrib[order])

    def step1_error_pow(n: int) -> float:
        k = int(np.searchsorted(d_sorted, 1.0 / n, side="left"))
        return float(cum[k - 1]) if k else 0.0

    n0 = _smallest_index(1, STEP_SEARCH_CAP, lambda n: step1_error_pow(n) < budget)
    step1 = max(step1_error_pow(n0), 0.0) ** (1.0 / p)
    altered_mask = d >= 1.0 / n0
    altered = AtomSet.from_mask(altered_mask)
    mu_altered = measure(f.domain, altered)

    if mu_altered == 0.0:
        labels = np.full(n_atoms, BASE_LABEL, dtype=np.int64)
        out = SimpleMap(
            f.domain, f.space, labels, np.zeros((0, f.space.dim)), base_flag=BASE_LABEL
        )
        achieved = dp_distance(f, out.to_map(h), p)
        report = ApproxReport(
            p=p,
            target_eps=eps,
            achieved_error=achieved,
            range_size=0,
            altered_measure=0.0,
            step_breakdown={"step1": step1, "step2": 0.0, "step3": 0.0},
            flags={"degenerate_altered_set": True},
        )
        return out, report

    # step 2: keep values inside the first n1 balls of radius R
    radius = eps / (3.0 * mu_altered ** (1.0 / p))
    dense, _ = _dedup_rows_in_order(f.values[altered_mask])
    cover = _first_cover(f.space, f.values[altered_mask], dense, radius)
    alt_contrib = contrib[altered_mask]
    total_alt = float(alt_contrib.sum())
    cover_for_sort = np.where(cover < 0, dense.shape[0], cover)
    by_cover = np.argsort(cover_for_sort, kind="stable")
    gain = np.concatenate([[0.0], np.cumsum(alt_contrib[by_cover])])
    sorted_cover = cover_for_sort[by_cover]

    def step2_error_pow(n: int) -> float:
        k = int(np.searchsorted(sorted_cover, n, side="left"))
        return total_alt - float(gain[k])

    n1 = _smallest_index(1, dense.shape[0], lambda n: step2_error_pow(n) < budget)
    # cumulative-gain cancellation can dip the residual a hair below zero
    step2 = max(step2_error_pow(n1), 0.0) ** (1.0 / p)

    # step 3: collapse each kept atom onto its first covering center
    kept = (cover >= 0) & (cover < n1)
    labels = np.full(n_atoms, BASE_LABEL, dtype=np.int64)
    alt_idx = altered.indices
    labels[alt_idx[kept]] = cover[kept]
    out = SimpleMap(f.domain, f.space, labels, dense[:n1], base_flag=BASE_LABEL)
    g = out.to_map(h)
    keep_set = AtomSet(alt_idx[kept], n_atoms)
    dist_kept = f.space.distance_many(f.values[keep_set.indices], g.values[keep_set.indices])
    step3 = float(np.sum(w[keep_set.indices] * dist_kept**p)) ** (1.0 / p)

    achieved = dp_distance(f, g, p)
    report = ApproxReport(
        p=p,
        target_eps=eps,
        achieved_error=achieved,
        range_size=out.range_size,
        altered_measure=float(measure(f.domain, keep_set)),
        step_breakdown={"step1": step1, "step2": step2, "step3": step3},
    )
    return out, report


# ---------------------------------------------------------------------------
# sup-norm simple approximation via epsilon nets
# ---------------------------------------------------------------------------


def simple_approx_sup(
    f: MeasurableMap, h: MeasurableMap, eps: float
) -> tuple[SimpleMap, ApproxReport]:
    """Quantize onto a finite eps-net of a ball covering the essential range.

    Needs the target's epsilon-net capability (boundedly compact balls);
    targets without it refuse by raising CapabilityError.  Every atom takes
    the first net point strictly within eps of its value (ties to the
    lowest index); an atom the net misses falls back to its nearest net
    point, and the measured sup error is reported either way.
    """
    if eps <= 0:
        raise MetricLpError("eps must be positive")
    if not is_member(f, h, math.inf):
        raise MetricLpError("f must lie at finite sup distance from h")
    live = f.domain.weights > 0
    if not live.any():
        labels = np.full(f.domain.atom_count, BASE_LABEL, dtype=np.int64)
        out = SimpleMap(f.domain, f.space, labels, np.zeros((0, f.space.dim)), BASE_LABEL)
        return out, ApproxReport(math.inf, eps, 0.0, 0, 0.0)
    center_idx = int(np.nonzero(live)[0][0])
    center = Point(f.space.tag, f.values[center_idx].copy())
    radius = float(
        f.space.distance_many(
            f.values[live], np.broadcast_to(center.payload, f.values[live].shape)
        ).max()
    )
    net = f.space.epsilon_net(center, radius, eps)
    table = np.vstack([q.payload for q in net])
    labels = _first_cover(f.space, f.values, table, eps)
    missed = labels < 0
    if missed.any():  # probe grid missed a corner of the ball: snap to nearest
        for i in np.nonzero(missed)[0]:
            dist = f.space.distance_many(
                np.broadcast_to(f.values[i], table.shape), table
            )
            labels[i] = int(np.argmin(dist))
    out = SimpleMap(f.domain, f.space, labels, table)
    achieved = dp_distance(f, out.to_map(), math.inf)
    report = ApproxReport(
        p=math.inf,
        target_eps=eps,
        achieved_error=achieved,
        range_size=out.range_size,
        altered_measure=float(np.sum(f.domain.weights[np.isfinite(f.domain.weights)])),
        step_breakdown={"net_size": float(len(net)), "ball_radius": radius},
        flags={"net_fallback_used": bool(missed.any())},
    )
    return out, report


# ---------------------------------------------------------------------------
# counterexample: orthonormal directions defeat sup quantization
# ---------------------------------------------------------------------------


@dataclass
class OrthonormalBoundReport:
    n_directions: int
    k_values: int
    min_max_error: float
    pigeonhole_bound: float
    best_map: SimpleMap
    domain: Domain
    mapping: MeasurableMap


def _partitions_into_at_most(items: list[int], k: int):
    """All set partitions of `items` into at most k blocks."""
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _partitions_into_at_most(rest, k):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [head]] + part[i + 1 :]
        if len(part) < k:
            yield part + [[head]]


def orthonormal_lower_bound(
    n_directions: int, k_values: int, trunc_dim: int | None = None
) -> OrthonormalBoundReport:
    """Best possible sup error of any k-valued map against n orthonormal values.

    The mapping sends interval-shaped atoms of growing weight 1, 2, ..., n
    to distinct orthonormal basis vectors.  Any assignment of k < n values
    puts two basis vectors (mutual distance sqrt(2)) on a common value, so
    the sup error is at least sqrt(2)/2 > 1/2 no matter how fine the
    quantization budget was.  The exact optimum is found by brute force
    over all assignments, using the smallest enclosing ball of each block
    of basis vectors (radius sqrt(1 - 1/block_size), centered at the mean).
    """
    if n_directions < 2 or n_directions > 12:
        raise MetricLpError("n_directions must be in [2, 12] for brute force")
    if k_values < 1:
        raise MetricLpError("k_values must be positive")
    dim = trunc_dim if trunc_dim is not None else n_directions
    if dim < n_directions:
        raise MetricLpError("truncation must keep all used directions")
    space = EuclideanSpace(dim)
    domain = Domain(np.arange(1, n_directions + 1, dtype=np.float64))
    values = np.eye(n_directions, dim)
    mapping = MeasurableMap(domain, space, values)

    best = math.inf
    best_partition: list[list[int]] | None = None
    for part in _partitions_into_at_most(list(range(n_directions)), k_values):
        worst = max(math.sqrt(1.0 - 1.0 / len(block)) for block in part)
        if worst < best:
            best = worst
            best_partition = part
    assert best_partition is not None
    labels = np.zeros(n_directions, dtype=np.int64)
    table = np.zeros((len(best_partition), dim))
    for j, block in enumerate(best_partition):
        labels[block] = j
        table[j] = values[block].mean(axis=0)
    best_map = SimpleMap(domain, space, labels, table)
    pigeonhole = math.sqrt(1.0 - 1.0 / math.ceil(n_directions / k_values))
    return OrthonormalBoundReport(
        n_directions=n_directions,
        k_values=k_values,
        min_max_error=best,
        pigeonhole_bound=pigeonhole,
        best_map=best_map,
        domain=domain,
        mapping=mapping,
    )


# ---------------------------------------------------------------------------
# divergence fixtures: base mappings no simple map can follow
# ---------------------------------------------------------------------------


@dataclass
class DivergenceReport:
    kind: str
    refinement: int
    p: float
    k_values: int
    best_constant_error: float
    best_k_error: float


def _divergence_grid(kind: str, refinement: int, p: float) -> tuple[Array, Array]:
    if kind == "unbounded_base":
        n = refinement
        x = (np.arange(n) + 0.5) / n
        return np.full(n, 1.0 / n), x ** (-1.0 / p)
    if kind == "exponential_base":
        half_width = float(refinement)
        n = 64 * refinement
        x = np.linspace(-half_width, half_width, n, endpoint=False) + half_width / n
        return np.full(n, 2.0 * half_width / n), np.exp(-np.abs(x))
    raise MetricLpError(f"unknown divergence kind {kind!r}")


def _best_constant_error(w: Array, h: Array, p: float) -> float:
    lo, hi = float(h.min()), float(h.max())
    if lo == hi:
        return 0.0
    res = optimize.minimize_scalar(
        lambda c: float(np.sum(w * np.abs(h - c) ** p)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.fun) ** (1.0 / p)


def _segment_costs(w: Array, h: Array, j: int, p: float) -> Array:
    """Cost of clustering sorted points i..j-1 onto one value, for all i < j."""
    cw = np.concatenate([[0.0], np.cumsum(w)])
    cwh = np.concatenate([[0.0], np.cumsum(w * h)])
    i = np.arange(j)
    if p == 2:
        cwh2 = np.concatenate([[0.0], np.cumsum(w * h * h)])
        seg_w = cw[j] - cw[i]
        seg_wh = cwh[j] - cwh[i]
        seg_wh2 = cwh2[j] - cwh2[i]
        # prefix-sum cancellation can dip a zero-variance segment slightly
        # negative; clamp so the final root stays real
        return np.maximum(seg_wh2 - seg_wh**2 / seg_w, 0.0)
    if p == 1:
        half = (cw[i] + cw[j]) / 2.0
        t = np.searchsorted(cw, half, side="left")
        t = np.clip(t, i + 1, j) - 1  # index of the weighted median point
        med = h[t]
        left = med * (cw[t + 1] - cw[i]) - (cwh[t + 1] - cwh[i])
        right = (cwh[j] - cwh[t + 1]) - med * (cw[j] - cw[t + 1])
        return np.maximum(left + right, 0.0)
    raise MetricLpError("best-k clustering supports p in {1, 2}")


def _best_k_error(w: Array, h: Array, p: float, k: int) -> float:
    order = np.argsort(h, kind="stable")
    w, h = w[order], h[order]
    n = h.size
    prev = np.full(n + 1, np.inf)
    prev[0] = 0.0
    for _layer in range(k):
        best = np.full(n + 1, np.inf)
        best[0] = 0.0
        for j in range(1, n + 1):
            seg = _segment_costs(w, h, j, p)
            best[j] = float(np.min(prev[:j] + seg))
        # "at most k" values: a layer may decline to open a new segment
        prev = np.minimum(best, prev)
    return float(prev[n]) ** (1.0 / p)


def divergence_fixture(kind: str, refinement: int, p: float, k_values: int = 3) -> DivergenceReport:
    """Best-constant and best-k-value simple errors against a base mapping
    that simple maps cannot follow across refinements.

    kind "unbounded_base": h(x) = x**(-1/p) on a uniform grid over (0, 1];
    refining the grid toward 0 makes every simple error grow without bound.
    kind "exponential_base": h(x) = exp(-|x|) on [-T, T] with T = refinement;
    the errors increase strictly with T (here they grow toward a finite
    ceiling: exp(-|x|) is p-integrable, so the trend is monotone growth,
    not blow-up).
    """
    p = check_p(p)
    if math.isinf(p):
        raise MetricLpError("divergence fixtures are for finite p")
    w, h = _divergence_grid(kind, refinement, p)
    return DivergenceReport(
        kind=kind,
        refinement=refinement,
        p=p,
        k_values=k_values,
        best_constant_error=_best_constant_error(w, h, p),
        best_k_error=_best_k_error(w, h, p, k_values),
    )
