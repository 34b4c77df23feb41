"""Concrete metric target spaces.

Every space works on flat float64 payloads so that mappings can be stored
as (atoms, payload_dim) arrays and distances evaluated in batch.

Conventions
-----------
- A point is a pair (space tag, payload).  Payload layouts:
    euclidean d   : the d coordinates
    spd n         : row-major n x n symmetric positive-definite matrix
    simplex d     : d nonnegative weights summing to 1
    histogram     : one weight per grid node, nonnegative, summing to 1
    circle        : a single angle in [0, 2*pi)
- Geodesics are constant speed: d(gamma(s), gamma(t)) = |s-t| * d(a, b).
  Endpoints are returned verbatim, so gamma(0) == a and gamma(1) == b hold
  bit for bit.
- Dense sequences follow fixed dyadic refinement orders documented on each
  space; they are pure functions of k.
- Epsilon nets are built greedily (farthest point first) over a documented
  probe grid of the requested ball and certified by covering that grid.

Capability flags say which of geodesic / dense_sequence / epsilon_net a
space supports.  The histogram space deliberately refuses epsilon nets:
it stands in for distributions on the line under the 1-Wasserstein
distance, where closed balls are not compact and no finite net exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, DimensionMismatchError, InvalidPointError

Array = np.ndarray

TWO_PI = 2.0 * math.pi

# Net construction: probe grids are this many times finer than the target
# radius, and greedy insertion stops once every probe is strictly covered.
NET_PROBE_FRACTION = 8
NET_PROBE_CAP = 2_000_000


@dataclass(eq=False)
class Point:
    """A single element of a target space: tag plus flat payload."""

    space: str
    payload: Array

    def __post_init__(self):
        self.payload = np.asarray(self.payload, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(self.payload)):
            raise InvalidPointError("payload entries must be finite")

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.payload, other.payload)

    def __repr__(self):
        return f"Point({self.space!r}, {np.array2string(self.payload, precision=6)})"


def _lex_greater(a: Array, b: Array) -> Array:
    """Row-wise lexicographic a > b for two equal-shape (m, k) arrays."""
    diff = a != b
    any_diff = diff.any(axis=1)
    first = np.argmax(diff, axis=1)
    rows = np.arange(a.shape[0])
    return any_diff & (a[rows, first] > b[rows, first])


# ---------------------------------------------------------------------------
# dyadic enumeration helpers
# ---------------------------------------------------------------------------


def dyadic_reals(k: int) -> list[float]:
    """First k terms of the dyadic enumeration of the real line.

    Generation 0 is {0}; generation l >= 1 lists the values j * 2**(1-l)
    with |value| <= l that are new at this generation, ordered by
    (|value|, positive before negative).  The sequence therefore starts
    0, 1, -1, 1/2, -1/2, 3/2, -3/2, 2, -2, ...
    """
    out = [0.0]
    seen = {0.0}
    level = 1
    while len(out) < k:
        step = 2.0 ** (1 - level)
        j_max = int(round(level / step))
        fresh = []
        for j in range(1, j_max + 1):
            for v in (j * step, -j * step):
                if v not in seen:
                    seen.add(v)
                    fresh.append(v)
        fresh.sort(key=lambda v: (abs(v), -np.sign(v)))
        out.extend(fresh)
        level += 1
    return out[:k]


def dyadic_tuples(dim: int, k: int) -> Array:
    """First k points of the dyadic enumeration of R^dim.

    Index tuples (i_1..i_dim) into the 1-D enumeration are ordered by
    (sum of indices, lexicographic), and each tuple is mapped through
    `dyadic_reals`.  The first point is always the origin.
    """
    if dim == 0:
        return np.zeros((1, 0))
    rows: list[tuple[int, ...]] = []
    total = 0
    while len(rows) < k:
        rows.extend(_compositions(total, dim))
        total += 1
    rows = rows[:k]
    max_idx = max(max(r) for r in rows)
    vals = dyadic_reals(max_idx + 1)
    return np.array([[vals[i] for i in row] for row in rows], dtype=np.float64)


def _compositions(total: int, dim: int):
    """All index tuples of length dim summing to total, lexicographic."""
    if dim == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, dim - 1):
            yield (head,) + rest


def dyadic_simplex(dim: int, k: int) -> Array:
    """First k points of the dyadic refinement of the probability simplex.

    Level l lists all weight vectors (j_1..j_dim)/2**l with integer j_i
    summing to 2**l; within a level new points are ordered lexicographically
    by the integer tuple.  Level 0 gives the vertices.
    """
    out: list[tuple[float, ...]] = []
    seen: set[tuple[float, ...]] = set()
    level = 0
    while len(out) < k:
        denom = 2**level
        for combo in _compositions(denom, dim):
            v = tuple(j / denom for j in combo)
            if v not in seen:
                seen.add(v)
                out.append(v)
                if len(out) >= k and level > 0:
                    break
        level += 1
        if level > 40:
            break
    return np.array(out[:k], dtype=np.float64)


# ---------------------------------------------------------------------------
# base class
# ---------------------------------------------------------------------------


class MetricSpace:
    """Shared behaviour for all concrete targets.

    Subclasses implement `_distance_many` and friends on stacked payload
    arrays; the scalar Point API wraps those.
    """

    tag: str = "abstract"
    has_geodesic = False
    has_dense_sequence = False
    has_epsilon_net = False

    dim: int  # payload length

    # -- validation --------------------------------------------------------

    def check_payload(self, arr: Array) -> Array:
        arr = np.asarray(arr, dtype=np.float64)
        flat = arr.reshape(-1, arr.shape[-1]) if arr.ndim > 1 else arr.reshape(1, -1)
        if flat.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"{self.tag}: payload length {flat.shape[-1]}, expected {self.dim}"
            )
        if not np.all(np.isfinite(flat)):
            raise InvalidPointError(f"{self.tag}: non-finite payload entries")
        self._check_valid(flat)
        return arr

    def _check_valid(self, flat: Array) -> None:
        """Space-specific payload constraints; flat is (m, dim)."""

    def check_point(self, p: Point) -> Array:
        if p.space != self.tag:
            raise DimensionMismatchError(f"point tagged {p.space!r} in space {self.tag!r}")
        return self.check_payload(p.payload)

    @property
    def single_point(self) -> bool:
        """True when the space holds exactly one element."""
        return False

    # -- distances ----------------------------------------------------------

    def distance_many(self, a: Array, b: Array) -> Array:
        """Pairwise distances between rows of two (m, dim) payload stacks.

        Identical rows give exactly 0.0, and each pair is evaluated in a
        canonical argument order (lexicographic on the payload), so the
        identity and symmetry axioms hold bit for bit even where the
        underlying kernel is only symmetric up to rounding.
        """
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        b = np.atleast_2d(np.asarray(b, dtype=np.float64))
        if a.shape != b.shape:
            a, b = np.broadcast_arrays(a, b)
        if a.shape[1] == 0:
            return np.zeros(a.shape[0])
        swap = _lex_greater(a, b)
        if np.any(swap):
            a, b = a.copy(), b.copy()
            a[swap], b[swap] = b[swap], a[swap].copy()
        out = self._distance_many(a, b)
        equal = (a == b).all(axis=1)
        if np.any(equal):
            out = np.where(equal, 0.0, out)
        return out

    def distance(self, a: Point, b: Point) -> float:
        pa, pb = self.check_point(a), self.check_point(b)
        return float(self.distance_many(pa[None, :], pb[None, :])[0])

    def _distance_many(self, a: Array, b: Array) -> Array:
        raise NotImplementedError

    # -- geodesics ----------------------------------------------------------

    def geodesic_many(self, a: Array, b: Array, t: Array) -> Array:
        """Constant-speed geodesic points for stacked endpoints and times."""
        if not self.has_geodesic:
            raise CapabilityError(f"{self.tag}: no geodesic capability")
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        b = np.atleast_2d(np.asarray(b, dtype=np.float64))
        t = np.atleast_1d(np.asarray(t, dtype=np.float64))
        a, b = np.broadcast_arrays(a, b)
        if a.shape[0] == 1 and t.shape[0] > 1:
            a = np.broadcast_to(a, (t.shape[0], a.shape[1]))
            b = np.broadcast_to(b, (t.shape[0], b.shape[1]))
        out = self._geodesic_many(a, b, t)
        # endpoint times reproduce the inputs verbatim
        at0 = t == 0.0
        at1 = t == 1.0
        if np.any(at0):
            out[at0] = a[at0]
        if np.any(at1):
            out[at1] = b[at1]
        return out

    def geodesic_point(self, a: Point, b: Point, t: float) -> Point:
        if not 0.0 <= t <= 1.0:
            raise ValueError("geodesic parameter must lie in [0, 1]")
        pa, pb = self.check_point(a), self.check_point(b)
        out = self.geodesic_many(pa[None, :], pb[None, :], np.array([t]))[0]
        return Point(self.tag, out)

    def _geodesic_many(self, a: Array, b: Array, t: Array) -> Array:
        raise NotImplementedError

    # -- dense sequences -----------------------------------------------------

    def dense_payloads(self, k: int) -> Array:
        if not self.has_dense_sequence:
            raise CapabilityError(f"{self.tag}: no dense-sequence capability")
        if k < 0:
            raise ValueError("k must be nonnegative")
        return self._dense_payloads(k)

    def dense_sequence(self, k: int) -> list[Point]:
        return [Point(self.tag, row) for row in self.dense_payloads(k)]

    def _dense_payloads(self, k: int) -> Array:
        raise NotImplementedError

    # -- epsilon nets ---------------------------------------------------------

    def epsilon_net(self, center: Point, radius: float, eps: float) -> list[Point]:
        """Greedy finite net whose open eps-balls cover the closed ball.

        Probes from the documented `probe_ball` grid are inserted
        farthest-first until every probe lies strictly within
        eps - spacing of the net; the grids place every ball point within
        `spacing` of a probe, so the whole ball ends up strictly within
        eps of the net, not just the probes.
        """
        if not self.has_epsilon_net:
            raise CapabilityError(
                f"{self.tag}: no epsilon-net capability (closed balls are not compact)"
            )
        if eps <= 0:
            raise ValueError("eps must be positive")
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        c = self.check_point(center)
        if radius == 0:
            return [Point(self.tag, c.copy())]
        spacing = eps / NET_PROBE_FRACTION
        probes = self.probe_ball(center, radius, spacing)
        net = [c.copy()]
        dist = self.distance_many(probes, np.broadcast_to(c, probes.shape))
        while dist.size and dist.max() >= eps - spacing:
            idx = int(np.argmax(dist))
            new = probes[idx].copy()
            net.append(new)
            dist = np.minimum(
                dist, self.distance_many(probes, np.broadcast_to(new, probes.shape))
            )
        return [Point(self.tag, row) for row in net]

    def probe_ball(self, center: Point, radius: float, spacing: float) -> Array:
        """Documented finite probe grid for the closed ball B(center, radius)."""
        raise CapabilityError(f"{self.tag}: no probe grid")

    # -- misc -----------------------------------------------------------------

    def unit_probe(self) -> Array:
        """Fixed unit-scale reference payloads used for covering diagnostics."""
        raise NotImplementedError

    def random_payloads(self, rng: np.random.Generator, m: int, spread: float = 1.0) -> Array:
        raise NotImplementedError

    def descriptor(self) -> dict:
        return {"space": self.tag, "dim": self.dim}

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


# ---------------------------------------------------------------------------
# Euclidean R^d
# ---------------------------------------------------------------------------


class EuclideanSpace(MetricSpace):
    """R^d with the usual norm; geodesics are straight segments."""

    has_geodesic = True
    has_dense_sequence = True
    has_epsilon_net = True

    def __init__(self, dim: int):
        if dim < 0:
            raise ValueError("dim must be >= 0")
        self.dim = int(dim)
        self.tag = f"euclidean{self.dim}"

    @property
    def single_point(self) -> bool:
        return self.dim == 0

    def _distance_many(self, a, b):
        return np.linalg.norm(a - b, axis=-1)

    def _geodesic_many(self, a, b, t):
        return a + t[:, None] * (b - a)

    def _dense_payloads(self, k):
        return dyadic_tuples(self.dim, k) if self.dim else np.zeros((min(k, 1), 0))

    def probe_ball(self, center, radius, spacing):
        c = self.check_point(center)
        h = spacing / math.sqrt(self.dim)
        n_axis = int(math.ceil(2 * radius / h)) + 1
        if n_axis**self.dim > NET_PROBE_CAP:
            raise CapabilityError(
                f"{self.tag}: probe grid would need {n_axis}^{self.dim} nodes"
            )
        axes = [np.linspace(c[i] - radius, c[i] + radius, n_axis) for i in range(self.dim)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        keep = np.linalg.norm(grid - c, axis=1) <= radius
        return grid[keep]

    def unit_probe(self):
        if self.dim == 0:
            return np.zeros((1, 0))
        side = max(2, int(round(9 ** (1 / self.dim))))
        axes = [np.linspace(-1.0, 1.0, side)] * self.dim
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)

    def random_payloads(self, rng, m, spread=1.0):
        return spread * rng.standard_normal((m, self.dim))


# ---------------------------------------------------------------------------
# symmetric positive-definite matrices, affine-invariant metric
# ---------------------------------------------------------------------------

# Eigenvalues of the congruence-transformed matrix are clamped below at
# EIG_CLAMP; clamping that moves an eigenvalue by more than EIG_CLAMP_REL
# relative is treated as an invalid (non-SPD) input instead.
EIG_CLAMP = 1e-12
EIG_CLAMP_REL = 1e-9


class SpdSpace(MetricSpace):
    r"""SPD(n) with the affine-invariant distance.

    .. math::
        d(A, B) = \|\log(A^{-1/2} B A^{-1/2})\|_F
                = \Big(\sum_i \log^2 \lambda_i(A^{-1}B)\Big)^{1/2}

    and geodesic :math:`\gamma(t) = A^{1/2}(A^{-1/2} B A^{-1/2})^t A^{1/2}`.
    Payloads store the full matrix row-major.  The space is complete and
    its dense sequence enumerates matrix exponentials of symmetric matrices
    with dyadic entries (the exponential chart is a global homeomorphism).
    """

    has_geodesic = True
    has_dense_sequence = True
    has_epsilon_net = True

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("matrix order must be >= 1")
        self.n = int(n)
        self.dim = self.n * self.n
        self.tag = f"spd{self.n}"

    def _mats(self, flat: Array) -> Array:
        return flat.reshape(flat.shape[0], self.n, self.n)

    def _check_valid(self, flat):
        mats = self._mats(flat)
        sym_gap = np.abs(mats - np.swapaxes(mats, -1, -2)).max(initial=0.0)
        if sym_gap > 1e-12:
            raise InvalidPointError(f"spd payload not symmetric (gap {sym_gap:.2e})")
        w = np.linalg.eigvalsh(mats)
        if w.size and w.min() <= EIG_CLAMP:
            raise InvalidPointError("spd payload has a nonpositive eigenvalue")

    def _nu_spectrum(self, a: Array, b: Array) -> Array:
        """Shifted pencil spectrum: the nu with det((b - a) - nu a) = 0.

        The eigenvalues of a^{-1} b are 1 + nu; solving for nu instead of
        lambda avoids the catastrophic cancellation the direct quadratic
        (or eigh of the congruence) suffers when b is close to a, keeping
        tiny distances accurate in relative terms.
        """
        e = b - a
        if self.n == 2:
            det_a = a[:, 0, 0] * a[:, 1, 1] - a[:, 0, 1] * a[:, 1, 0]
            det_e = e[:, 0, 0] * e[:, 1, 1] - e[:, 0, 1] * e[:, 1, 0]
            mid = (
                a[:, 0, 0] * e[:, 1, 1]
                + a[:, 1, 1] * e[:, 0, 0]
                - a[:, 0, 1] * e[:, 1, 0]
                - a[:, 1, 0] * e[:, 0, 1]
            )
            s = np.sqrt(np.maximum(mid**2 - 4 * det_a * det_e, 0.0))
            big = 0.5 * (mid + np.where(mid >= 0, s, -s))
            nu1 = big / det_a
            nu2 = np.where(big != 0, det_e / np.where(big != 0, big, 1.0), 0.0)
            return np.stack([nu1, nu2], axis=-1)
        wa, va = np.linalg.eigh(a)
        isqrt = (va * (wa[:, None, :] ** -0.5)) @ np.swapaxes(va, -1, -2)
        mid = isqrt @ e @ isqrt
        mid = 0.5 * (mid + np.swapaxes(mid, -1, -2))
        return np.linalg.eigvalsh(mid)

    def _distance_many(self, a, b):
        nu = self._nu_spectrum(self._mats(a), self._mats(b))
        floor = EIG_CLAMP - 1.0  # pencil eigenvalues 1 + nu must stay positive
        clamped = np.maximum(nu, floor)
        moved = (clamped - nu) / np.maximum(np.abs(1.0 + nu), EIG_CLAMP)
        if moved.max(initial=0.0) > EIG_CLAMP_REL:
            raise InvalidPointError("spd distance: eigenvalue clamp exceeded tolerance")
        return np.linalg.norm(np.log1p(clamped), axis=-1)

    def _geodesic_many(self, a, b, t):
        am = self._mats(a)
        bm = self._mats(b)
        wa, va = np.linalg.eigh(am)
        wa = np.maximum(wa, EIG_CLAMP)
        sqrt_a = (va * np.sqrt(wa)[:, None, :]) @ np.swapaxes(va, -1, -2)
        isqrt_a = (va * (wa**-0.5)[:, None, :]) @ np.swapaxes(va, -1, -2)
        mid = isqrt_a @ bm @ isqrt_a
        mid = 0.5 * (mid + np.swapaxes(mid, -1, -2))
        wm, vm = np.linalg.eigh(mid)
        wm = np.maximum(wm, EIG_CLAMP)
        powed = (vm * (wm[:, None, :] ** t[:, None, None])) @ np.swapaxes(vm, -1, -2)
        out = sqrt_a @ powed @ sqrt_a
        out = 0.5 * (out + np.swapaxes(out, -1, -2))
        return out.reshape(out.shape[0], self.dim)

    # dense sequence: dyadic coordinates in the log chart
    def _sym_from_coords(self, coords: Array) -> Array:
        m = coords.shape[0]
        s = np.zeros((m, self.n, self.n))
        iu = np.triu_indices(self.n)
        s[:, iu[0], iu[1]] = coords
        s[:, iu[1], iu[0]] = coords
        return s

    def _dense_payloads(self, k):
        n_free = self.n * (self.n + 1) // 2
        coords = dyadic_tuples(n_free, k)
        s = self._sym_from_coords(coords)
        w, v = np.linalg.eigh(s)
        out = (v * np.exp(w)[:, None, :]) @ np.swapaxes(v, -1, -2)
        out = 0.5 * (out + np.swapaxes(out, -1, -2))
        return out.reshape(out.shape[0], self.dim)

    def probe_ball(self, center, radius, spacing):
        """Grid in the log chart at the center, then mapped through exp.

        Sectional curvature of SPD(n) lies in [-1/2, 0], so chart spacing
        is shrunk by the hyperbolic comparison factor sinh(r')/r' with
        r' = radius / sqrt(2) to keep the image grid fine enough.
        """
        c = self.check_point(center)
        cm = c.reshape(self.n, self.n)
        wc, vc = np.linalg.eigh(cm)
        sqrt_c = (vc * np.sqrt(wc)) @ vc.T
        n_free = self.n * (self.n + 1) // 2
        rp = radius / math.sqrt(2)
        factor = math.sinh(rp) / rp if rp > 1e-9 else 1.0
        h = spacing / factor / math.sqrt(2)  # off-diagonal coords count twice
        n_axis = int(math.ceil(2 * radius / h)) + 1
        if n_axis**n_free > NET_PROBE_CAP:
            raise CapabilityError(f"spd{self.n}: probe grid too large ({n_axis}^{n_free})")
        axes = [np.linspace(-radius, radius, n_axis)] * n_free
        coords = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n_free)
        s = self._sym_from_coords(coords)
        keep = np.linalg.norm(s, axis=(1, 2)) <= radius
        s = s[keep]
        w, v = np.linalg.eigh(s)
        inner = (v * np.exp(w)[:, None, :]) @ np.swapaxes(v, -1, -2)
        out = sqrt_c[None] @ inner @ sqrt_c[None]
        out = 0.5 * (out + np.swapaxes(out, -1, -2))
        return out.reshape(out.shape[0], self.dim)

    def unit_probe(self):
        return self.probe_ball(Point(self.tag, np.eye(self.n).reshape(-1)), 1.0, 0.35)

    def random_payloads(self, rng, m, spread=1.0):
        coords = spread * rng.standard_normal((m, self.n * (self.n + 1) // 2)) * 0.5
        s = self._sym_from_coords(coords)
        w, v = np.linalg.eigh(s)
        out = (v * np.exp(w)[:, None, :]) @ np.swapaxes(v, -1, -2)
        out = 0.5 * (out + np.swapaxes(out, -1, -2))
        return out.reshape(m, self.dim)


# ---------------------------------------------------------------------------
# probability simplex with the Fisher-Rao distance
# ---------------------------------------------------------------------------


class SimplexSpace(MetricSpace):
    r"""Closed probability simplex under the Fisher-Rao distance.

    .. math:: d(p, q) = 2 \arccos \sum_i \sqrt{p_i q_i}
                      = 4 \arcsin \tfrac{1}{2} \lVert \sqrt{p} - \sqrt{q} \rVert_2

    The square-root map sends the simplex isometrically (up to the factor 2)
    onto the nonnegative orthant of the unit sphere; geodesics are great
    circle arcs in those coordinates, which stay inside the orthant.  The
    arcsin form (chord length of the sphere arc) is used for evaluation: the
    arccos form destroys all precision for nearby points, while the identity
    2(1 - sum sqrt(pq)) = ||sqrt(p) - sqrt(q)||^2 holds exactly when both
    arguments sum to one.
    """

    has_geodesic = True
    has_dense_sequence = True
    has_epsilon_net = True

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("simplex needs at least one weight")
        self.dim = int(dim)
        self.tag = f"simplex{self.dim}"

    @property
    def single_point(self) -> bool:
        return self.dim == 1

    def _check_valid(self, flat):
        if flat.size == 0:
            return
        if flat.min() < -1e-12:
            raise InvalidPointError("simplex payload has a negative weight")
        gap = np.abs(flat.sum(axis=-1) - 1.0).max()
        if gap > 1e-9:
            raise InvalidPointError(f"simplex payload does not sum to 1 (gap {gap:.2e})")

    def _distance_many(self, a, b):
        chord = np.linalg.norm(np.sqrt(np.maximum(a, 0.0)) - np.sqrt(np.maximum(b, 0.0)), axis=-1)
        return 4.0 * np.arcsin(np.clip(0.5 * chord, 0.0, 1.0))

    def _geodesic_many(self, a, b, t):
        u = np.sqrt(np.maximum(a, 0.0))
        v = np.sqrt(np.maximum(b, 0.0))
        cos = np.clip((u * v).sum(axis=-1), -1.0, 1.0)
        theta = np.arccos(cos)
        out = np.empty_like(u)
        tiny = theta < 1e-15
        if np.any(tiny):
            out[tiny] = a[tiny]
        rest = ~tiny
        if np.any(rest):
            th = theta[rest][:, None]
            tt = t[rest][:, None]
            g = (np.sin((1 - tt) * th) * u[rest] + np.sin(tt * th) * v[rest]) / np.sin(th)
            sq = g * g
            out[rest] = sq / sq.sum(axis=-1, keepdims=True)
        return out

    def _dense_payloads(self, k):
        return dyadic_simplex(self.dim, k)

    def probe_ball(self, center, radius, spacing):
        """Dyadic simplex grid at a level fine enough for the requested spacing.

        Neighbouring level-l grid points are at Fisher-Rao distance at most
        pi * sqrt(2) * 2**(-l/2), which picks the level.
        """
        c = self.check_point(center)
        level = max(0, math.ceil(2 * math.log2(math.pi * math.sqrt(2) / spacing)))
        count = math.comb(2**level + self.dim - 1, self.dim - 1)
        while count > NET_PROBE_CAP and level > 0:
            level -= 1
            count = math.comb(2**level + self.dim - 1, self.dim - 1)
        if count > NET_PROBE_CAP:
            raise CapabilityError(f"{self.tag}: probe grid too large")
        grid = dyadic_simplex(self.dim, count)
        d = self.distance_many(grid, np.broadcast_to(c, grid.shape))
        return grid[d <= radius]

    def unit_probe(self):
        return dyadic_simplex(self.dim, math.comb(2**5 + self.dim - 1, self.dim - 1))

    def random_payloads(self, rng, m, spread=1.0):
        w = rng.dirichlet(np.ones(self.dim), size=m)
        return np.asarray(w, dtype=np.float64)


# ---------------------------------------------------------------------------
# discrete distributions on a fixed 1-D grid, 1-Wasserstein distance
# ---------------------------------------------------------------------------


class HistogramSpace(MetricSpace):
    r"""Probability weights on a fixed sorted grid of real nodes.

    The 1-Wasserstein distance has the closed CDF form

    .. math:: W_1(p, q) = \sum_j |F_p(x_j) - F_q(x_j)| (x_{j+1} - x_j).

    Linear mixtures are constant-speed geodesics (the distance is induced
    by the Kantorovich-Rubinstein norm, which is linear in p - q).  No
    epsilon-net capability: the space models distributions on the line,
    whose closed balls are not compact, so the net request is refused
    rather than silently truncated.
    """

    has_geodesic = True
    has_dense_sequence = True
    has_epsilon_net = False

    def __init__(self, grid: Array):
        grid = np.asarray(grid, dtype=np.float64).reshape(-1)
        if grid.size < 1:
            raise ValueError("histogram grid needs at least one node")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise ValueError("histogram grid must be strictly increasing")
        self.grid = grid
        self.dim = grid.size
        self.tag = f"histogram{self.dim}"

    @property
    def single_point(self) -> bool:
        return self.dim == 1

    def _check_valid(self, flat):
        if flat.min(initial=0.0) < -1e-12:
            raise InvalidPointError("histogram payload has a negative weight")
        if flat.size:
            gap = np.abs(flat.sum(axis=-1) - 1.0).max()
            if gap > 1e-9:
                raise InvalidPointError(f"histogram weights do not sum to 1 (gap {gap:.2e})")

    def _distance_many(self, a, b):
        if self.dim == 1:
            return np.zeros(a.shape[0])
        cdf_gap = np.abs(np.cumsum(a - b, axis=-1))[:, :-1]
        return (cdf_gap * np.diff(self.grid)).sum(axis=-1)

    def _geodesic_many(self, a, b, t):
        return a + t[:, None] * (b - a)

    def _dense_payloads(self, k):
        return dyadic_simplex(self.dim, k)

    def unit_probe(self):
        return dyadic_simplex(self.dim, math.comb(2**4 + self.dim - 1, self.dim - 1))

    def random_payloads(self, rng, m, spread=1.0):
        return np.asarray(rng.dirichlet(np.ones(self.dim), size=m), dtype=np.float64)

    def descriptor(self):
        return {"space": self.tag, "dim": self.dim, "grid": self.grid.tolist()}


# ---------------------------------------------------------------------------
# circle with arc-length distance
# ---------------------------------------------------------------------------


class CircleSpace(MetricSpace):
    """Unit circle parameterized by an angle in [0, 2*pi), arc-length metric.

    Geodesics follow the shorter arc; an exact tie (antipodal endpoints)
    moves counterclockwise.  The dense sequence lists dyadic angles
    2*pi*j/2**l level by level: 0, pi, pi/2, 3*pi/2, pi/4, ...
    """

    has_geodesic = True
    has_dense_sequence = True
    has_epsilon_net = True

    def __init__(self):
        self.dim = 1
        self.tag = "circle"

    def _check_valid(self, flat):
        if flat.size and (flat.min() < 0.0 or flat.max() >= TWO_PI):
            raise InvalidPointError("circle angle must lie in [0, 2*pi)")

    def _distance_many(self, a, b):
        gap = np.abs(a[:, 0] - b[:, 0])
        return np.minimum(gap, TWO_PI - gap)

    def _geodesic_many(self, a, b, t):
        delta = math.pi - np.mod(math.pi - (b[:, 0] - a[:, 0]), TWO_PI)
        ang = np.mod(a[:, 0] + t * delta, TWO_PI)
        return ang[:, None]

    def _dense_payloads(self, k):
        out = [0.0]
        level = 1
        while len(out) < k:
            step = TWO_PI / 2**level
            out.extend(j * step for j in range(1, 2**level, 2))
            level += 1
        return np.array(out[:k])[:, None]

    def probe_ball(self, center, radius, spacing):
        c = float(self.check_point(center)[0])
        span = min(radius, math.pi)
        m = int(math.ceil(2 * span / spacing)) + 1
        ang = np.mod(np.linspace(c - span, c + span, m), TWO_PI)
        return ang[:, None]

    def unit_probe(self):
        return np.linspace(0.0, TWO_PI, 64, endpoint=False)[:, None]

    def random_payloads(self, rng, m, spread=1.0):
        return rng.uniform(0.0, TWO_PI, size=(m, 1))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def make_space(name: str, grid: Array | None = None) -> MetricSpace:
    """Build a space from a compact name: euclidean2, spd3, simplex3,
    histogram8 (uniform grid on [0, 1] unless `grid` is given), circle."""
    name = name.strip().lower()
    if name == "circle":
        return CircleSpace()
    for prefix, cls in (("euclidean", EuclideanSpace), ("spd", SpdSpace), ("simplex", SimplexSpace)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return cls(int(name[len(prefix):]))
    if name.startswith("histogram"):
        if grid is not None:
            return HistogramSpace(grid)
        k = int(name[len("histogram"):])
        return HistogramSpace(np.linspace(0.0, 1.0, k))
    raise ValueError(f"unknown space name {name!r}")


def space_from_descriptor(desc: dict) -> MetricSpace:
    tag = desc["space"]
    if tag.startswith("histogram") and "grid" in desc:
        return HistogramSpace(np.asarray(desc["grid"], dtype=np.float64))
    return make_space(tag)
