"""
Natural visibility graphs of ordered sequences.

Two points ``(a, h[a])`` and ``(b, h[b])`` see each other when every
intermediate height lies strictly below the straight segment joining them.
Positions are the integer grid ``0..N-1``.

Two constructions are provided:

``build_naive``
    O(n^2) sweep right from every node, tracking the steepest node seen so far.
``build_dc``
    Divide & conquer around the leftmost maximum of each sub-range,
    O(n log n) on typical inputs.

Both return a :class:`VisibilityGraph` whose canonical form is a sorted
``(E, 2)`` edge array with ``i < j`` on every row.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from numba import njit

from .errors import IngestionError, UsageError, ValidationError

Algorithm = Literal["dc", "naive"]
ALGORITHMS = ("dc", "naive")


def as_sequence(heights) -> np.ndarray:
    """Validate ``heights`` and return them as a contiguous float64 vector."""
    arr = np.ascontiguousarray(heights, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"a sequence must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError("a sequence needs at least one height")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValidationError(f"non-finite height at index {int(bad[0])}")
    return arr


@dataclass(frozen=True, eq=False)
class VisibilityGraph:
    """Undirected visibility graph on ``n`` nodes.

    ``edges`` holds unordered pairs as rows ``(i, j)`` with ``i < j``,
    sorted lexicographically.
    """

    n: int
    edges: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, VisibilityGraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __len__(self):
        return len(self.edges)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in self.edges}

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        lo, hi = (i, j) if i < j else (j, i)
        pos = np.searchsorted(self.edges[:, 0], lo, side="left")
        end = np.searchsorted(self.edges[:, 0], lo, side="right")
        return bool(np.any(self.edges[pos:end, 1] == hi))

    def adjacency(self) -> np.ndarray:
        """Dense N x N binary adjacency matrix (materialized on demand)."""
        a = np.zeros((self.n, self.n), dtype=np.uint8)
        a[self.edges[:, 0], self.edges[:, 1]] = 1
        a[self.edges[:, 1], self.edges[:, 0]] = 1
        return a


def visible(seq, a: int, b: int) -> bool:
    """Literal chord test: does ``a`` see ``b``?

    Requires ``0 <= a < b <= N-1``. An intermediate point lying exactly on
    the chord blocks visibility; the comparison is exact for the given
    floating-point heights.
    """
    h = _prepared(seq)
    n = h.size
    if not (0 <= a < b <= n - 1):
        raise UsageError(f"need 0 <= a < b <= {n - 1}, got a={a}, b={b}")
    return bool(_visible_kernel(h, a, b))


# -- numba kernels -----------------------------------------------------------
#
# Every visibility decision reduces to one orientation test: is point c
# strictly below the chord from a to b?  Its sign is taken from
#     D = (b - a) h[c] - (c - a) h[b] - (b - c) h[a]
# evaluated in floating point when the result clears a rounding bound and
# with exact expansion arithmetic otherwise, so both constructions (and
# ``visible``) agree even on sequences that are collinear up to rounding.

_FILTER = 1e-15  # comfortably above the 3u rounding error of D


@njit(cache=True, inline="always")
def _two_sum(a, b):
    x = a + b
    bv = x - a
    av = x - bv
    return x, (a - av) + (b - bv)


@njit(cache=True, inline="always")
def _split(a):
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def _two_prod(a, b):
    x = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = x - ahi * bhi - alo * bhi - ahi * blo
    return x, alo * blo - err


@njit(cache=True)
def _exact_sign(terms):
    # grow a non-overlapping expansion one term at a time
    expansion = np.zeros(terms.shape[0] + 1)
    length = 0
    for t in terms:
        q = t
        for k in range(length):
            q, expansion[k] = _two_sum(q, expansion[k])
        expansion[length] = q
        length += 1
    for k in range(length - 1, -1, -1):
        if expansion[k] > 0:
            return 1
        if expansion[k] < 0:
            return -1
    return 0


@njit(cache=True)
def _below_exact(wc, hc, wb, hb, wa, ha):
    terms = np.empty(6)
    terms[0], terms[1] = _two_prod(wc, hc)
    terms[2], terms[3] = _two_prod(-wb, hb)
    terms[4], terms[5] = _two_prod(-wa, ha)
    return _exact_sign(terms) < 0


@njit(cache=True, inline="always")
def _below(h, a, c, b):
    wc = float(b - a)
    wb = float(c - a)
    wa = float(b - c)
    t1 = wc * h[c]
    t2 = wb * h[b]
    t3 = wa * h[a]
    d = t1 - t2 - t3
    if abs(d) > _FILTER * (abs(t1) + abs(t2) + abs(t3)):
        return d < 0
    return _below_exact(wc, h[c], wb, h[b], wa, h[a])


@njit(cache=True)
def _visible_kernel(h, a, b):
    for c in range(a + 1, b):
        if not _below(h, a, c, b):
            return False
    return True


@njit(cache=True)
def _append(buf, count, i, j):
    if count == buf.shape[0]:
        grown = np.empty((2 * buf.shape[0], 2), dtype=np.int64)
        grown[:count] = buf[:count]
        buf = grown
    buf[count, 0] = i
    buf[count, 1] = j
    return buf, count + 1


@njit(cache=True)
def _naive_kernel(h, want_edges):
    n = h.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    buf = np.empty((max(16, 2 * n), 2), dtype=np.int64)
    count = 0
    for a in range(n - 1):
        # horizon: the node of steepest slope from a seen so far
        horizon = a + 1
        deg[a] += 1
        deg[a + 1] += 1
        if want_edges:
            buf, count = _append(buf, count, a, a + 1)
        for b in range(a + 2, n):
            if _below(h, a, horizon, b):
                deg[a] += 1
                deg[b] += 1
                if want_edges:
                    buf, count = _append(buf, count, a, b)
                horizon = b
    return deg, buf[:count]


@njit(cache=True)
def _dc_kernel(h, want_edges):
    n = h.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    buf = np.empty((max(16, 2 * n), 2), dtype=np.int64)
    count = 0
    stack = np.empty((n + 1, 2), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = n - 1
    top = 1 if n > 1 else 0
    while top > 0:
        top -= 1
        lo = stack[top, 0]
        hi = stack[top, 1]
        # leftmost maximum; ties resolve to the smallest index
        m = lo
        for k in range(lo + 1, hi + 1):
            if h[k] > h[m]:
                m = k
        # leftward: horizon holds the smallest slope towards m seen so far
        horizon = -1
        for i in range(m - 1, lo - 1, -1):
            if horizon < 0 or _below(h, i, horizon, m):
                deg[i] += 1
                deg[m] += 1
                if want_edges:
                    buf, count = _append(buf, count, i, m)
                horizon = i
        horizon = -1
        for j in range(m + 1, hi + 1):
            if horizon < 0 or _below(h, m, horizon, j):
                deg[j] += 1
                deg[m] += 1
                if want_edges:
                    buf, count = _append(buf, count, m, j)
                horizon = j
        # only ranges of two or more nodes can hold edges
        if m - 1 > lo:
            stack[top, 0] = lo
            stack[top, 1] = m - 1
            top += 1
        if hi > m + 1:
            stack[top, 0] = m + 1
            stack[top, 1] = hi
            top += 1
    return deg, buf[:count]


def _prepared(heights):
    """Validated heights rescaled by a power of two so the largest is near 1.

    Power-of-two scaling is exact and leaves visibility unchanged; it keeps
    the error-free products inside the normal floating-point range.
    """
    h = as_sequence(heights)
    peak = np.max(np.abs(h))
    if peak > 0:
        h = np.ldexp(h, -np.frexp(peak)[1])
    return h


_KERNELS = {"naive": _naive_kernel, "dc": _dc_kernel}


def _kernel(algorithm):
    try:
        return _KERNELS[algorithm]
    except KeyError:
        raise UsageError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}") from None


def _graph(h, algorithm):
    _, raw = _kernel(algorithm)(h, True)
    edges = raw[np.lexsort((raw[:, 1], raw[:, 0]))]
    return VisibilityGraph(n=h.size, edges=edges)


def build_naive(seq) -> VisibilityGraph:
    """Visibility graph by sweeping right from every node (O(n^2))."""
    return _graph(_prepared(seq), "naive")


def build_dc(seq) -> VisibilityGraph:
    """Visibility graph by divide & conquer around range maxima."""
    return _graph(_prepared(seq), "dc")


def build(seq, algorithm: Algorithm = "dc") -> VisibilityGraph:
    return _graph(_prepared(seq), algorithm)


def sequence_degrees(seq, algorithm: Algorithm = "dc") -> np.ndarray:
    """Degree vector of ``seq`` without materializing the edge list."""
    deg, _ = _kernel(algorithm)(_prepared(seq), False)
    return deg


def degree_vector(g: VisibilityGraph) -> np.ndarray:
    """Number of edges incident to each node."""
    deg = np.zeros(g.n, dtype=np.int64)
    np.add.at(deg, g.edges[:, 0], 1)
    np.add.at(deg, g.edges[:, 1], 1)
    return deg


def degree_distribution(degrees) -> np.ndarray:
    """Normalized degree histogram of fixed length N.

    Entry ``d`` is the fraction of nodes having degree ``d``; the length is
    the node count so distributions of equal-length sequences line up.
    """
    k = np.asarray(degrees, dtype=np.int64)
    n = k.size
    if n == 0:
        raise UsageError("degree distribution of an empty degree vector")
    if k.min() < 0 or k.max() > max(n - 1, 0):
        raise ValidationError("degrees must lie in [0, N-1]")
    return np.bincount(k, minlength=n).astype(np.float64) / n


# -- file formats ------------------------------------------------------------

def read_sequence_csv(path) -> np.ndarray:
    """Read a single-column CSV of heights, optional header ``height``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestionError(f"{path}: {exc.strerror or exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        cell = line.strip()
        if not cell:
            continue
        if lineno == 1 and cell.lower() == "height":
            continue
        try:
            values.append(float(cell))
        except ValueError:
            raise IngestionError(f"{path}:{lineno}: cannot parse {cell!r} as a number") from None
        if not np.isfinite(values[-1]):
            raise IngestionError(f"{path}:{lineno}: non-finite height {cell!r}")
    if not values:
        raise IngestionError(f"{path}: no heights found")
    return np.array(values, dtype=np.float64)


def write_sequence_csv(path, heights) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("height\n")
        for v in np.asarray(heights, dtype=np.float64):
            fh.write(f"{float(v)!r}\n")


def write_edges_csv(fh, g: VisibilityGraph) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["i", "j"])
    w.writerows(g.edges.tolist())


def write_degrees_csv(fh, degrees) -> None:
    fh.write("degree\n")
    for d in np.asarray(degrees).tolist():
        fh.write(f"{d}\n")


def write_adjacency_csv(fh, g: VisibilityGraph) -> None:
    for row in g.adjacency():
        fh.write(",".join(map(str, row.tolist())) + "\n")
