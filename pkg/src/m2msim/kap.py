"""k-cardinality assignment by padding to a square assignment problem.

A k-AP on an ``n x m`` weight matrix asks for at most ``k`` pairwise
disjoint edges of maximum total weight. Padding turns it into a standard
assignment of side ``n + m - k``:

* ``m - k`` padding rows, joined to every real column with weight ``A``;
* ``n - k`` padding columns, joined to every real row with weight ``A``;
* padding rows x padding columns get weight 0.

``A = (max weight + 1) * (n + m)`` exceeds the weight of any k real
edges, so a maximum-weight perfect matching always uses exactly
``(n - k) + (m - k)`` A-edges and the remaining ``k`` edges are an optimal
k-AP solution.

Matrix file format (used by the command line ``solve``)::

    n_left n_right k
    w_00 w_01 ...      # n_left rows of n_right weights
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numba
import numpy as np

BRUTE_FORCE_LIMIT = 8


@dataclass(frozen=True)
class PaddedProblem:
    weights: np.ndarray  # square, maximization sense
    a_value: float
    real_rows: int
    real_cols: int
    k: int

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @property
    def n_padding_edges(self) -> int:
        return (self.real_rows - self.k) + (self.real_cols - self.k)


@dataclass(frozen=True)
class Matching:
    """Real edges of a k-AP solution.

    ``assignment`` maps row -> column for real edges only. For solver
    output, ``padded_assignment`` holds the full row -> column vector of the
    padded problem (real rows first) and ``padded_total`` its weight.
    """

    assignment: dict[int, int]
    total_real_weight: float
    padded_assignment: np.ndarray | None = field(default=None, repr=False)
    padded_total: float | None = None
    a_value: float | None = None
    n_padding_edges: int | None = None

    @property
    def cardinality(self) -> int:
        return len(self.assignment)


def _check_k(n: int, m: int, k: int) -> None:
    if k < 0 or k > min(n, m):
        raise ValueError(f"k={k} must lie in [0, min(n, m)] = [0, {min(n, m)}]")


def _as_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2:
        raise ValueError("weights must be a 2-D matrix")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return w


def a_value(weights) -> float:
    w = np.asarray(weights, dtype=float)
    top = float(w.max()) if w.size else 0.0
    return (top + 1.0) * (w.shape[0] + w.shape[1])


def pad_to_standard(weights, k: int) -> PaddedProblem:
    w = _as_weights(weights)
    n, m = w.shape
    _check_k(n, m, k)
    size = n + m - k
    a = a_value(w)
    padded = np.zeros((size, size))
    padded[:n, :m] = w
    padded[:n, m:] = a
    padded[n:, :m] = a
    return PaddedProblem(padded, a, n, m, k)


@numba.njit(cache=True)
def _shortest_augmenting_path(cost):
    # Kuhn-Munkres with Dijkstra-style augmentation and lazy dual updates.
    # Ties prefer a free column so flat blocks end the search early.
    n = cost.shape[0]
    u = np.zeros(n)
    v = np.zeros(n)
    col4row = np.full(n, -1, np.int64)
    row4col = np.full(n, -1, np.int64)
    path = np.full(n, -1, np.int64)
    dist = np.empty(n)
    remaining = np.empty(n, np.int64)
    seen_row = np.empty(n, np.bool_)
    seen_col = np.empty(n, np.bool_)
    for cur in range(n):
        min_val = 0.0
        i = cur
        n_rem = n
        for it in range(n):
            remaining[it] = n - it - 1
        seen_row[:] = False
        seen_col[:] = False
        dist[:] = np.inf
        sink = -1
        while sink == -1:
            index = -1
            lowest = np.inf
            seen_row[i] = True
            for it in range(n_rem):
                j = remaining[it]
                r = min_val + cost[i, j] - u[i] - v[j]
                if r < dist[j]:
                    path[j] = i
                    dist[j] = r
                if dist[j] < lowest or (dist[j] == lowest and row4col[j] == -1):
                    lowest = dist[j]
                    index = it
            min_val = lowest
            j = remaining[index]
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
            seen_col[j] = True
            n_rem -= 1
            remaining[index] = remaining[n_rem]

        u[cur] += min_val
        for r in range(n):
            if seen_row[r] and r != cur:
                u[r] += min_val - dist[col4row[r]]
        for c in range(n):
            if seen_col[c]:
                v[c] -= min_val - dist[c]

        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            nxt = col4row[i]
            col4row[i] = j
            j = nxt
            if i == cur:
                break
    return col4row


def hungarian_min(cost) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect matching of a square cost matrix.

    Returns ``(assignment, total)`` where ``assignment[i]`` is the column
    matched to row ``i``. Exact for integer-valued costs below 2**53.
    """
    c = np.ascontiguousarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix must be finite")
    if c.shape[0] == 0:
        return np.zeros(0, dtype=np.int64), 0.0
    assignment = _shortest_augmenting_path(c)
    total = math.fsum(c[np.arange(len(assignment)), assignment])
    return assignment, total


def solve_kap(weights, k: int) -> Matching:
    """Maximum-weight matching with at most ``k`` edges via padding + Hungarian."""
    problem = pad_to_standard(weights, k)
    n, m = problem.real_rows, problem.real_cols
    assignment, neg_total = hungarian_min(-problem.weights)
    real = {i: int(assignment[i]) for i in range(n) if assignment[i] < m}
    w = problem.weights
    return Matching(
        real,
        math.fsum(w[i, j] for i, j in sorted(real.items())),
        assignment,
        -neg_total,
        problem.a_value,
        problem.n_padding_edges,
    )


def brute_force_kap(weights, k: int) -> Matching:
    """Exhaustive k-AP oracle for matrices up to 8 x 8."""
    w = _as_weights(weights)
    n, m = w.shape
    if n > BRUTE_FORCE_LIMIT or m > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} rows and columns, got {n}x{m}")
    _check_k(n, m, k)

    best_value = 0.0
    best: dict[int, int] = {}
    for size in range(1, k + 1):
        perms = np.array(list(itertools.permutations(range(m), size)), dtype=np.int64)
        for rows in itertools.combinations(range(n), size):
            totals = w[np.asarray(rows)[None, :], perms].sum(axis=1)
            idx = int(np.argmax(totals))
            if totals[idx] > best_value:
                best_value = float(totals[idx])
                best = dict(zip(rows, (int(c) for c in perms[idx])))
    return Matching(best, math.fsum(w[i, j] for i, j in sorted(best.items())))


class MatrixFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_matrix(text: str) -> tuple[np.ndarray, int]:
    rows: list[list[float]] = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 3:
                raise MatrixFormatError(lineno, "header must be 'n_left n_right k'")
            try:
                header = tuple(int(p) for p in parts)
            except ValueError as exc:
                raise MatrixFormatError(lineno, str(exc)) from None
            if min(header) < 0:
                raise MatrixFormatError(lineno, "sizes must be >= 0")
            continue
        n_left, n_right, _ = header
        if len(rows) == n_left:
            raise MatrixFormatError(lineno, f"expected {n_left} rows, found more")
        if len(parts) != n_right:
            raise MatrixFormatError(lineno, f"expected {n_right} weights, found {len(parts)}")
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise MatrixFormatError(lineno, str(exc)) from None
        if any(not math.isfinite(x) or x < 0 for x in row):
            raise MatrixFormatError(lineno, "weights must be finite and nonnegative")
        rows.append(row)
    if header is None:
        raise MatrixFormatError(0, "empty matrix file")
    n_left, n_right, k = header
    if n_right == 0 and not rows:
        rows = [[] for _ in range(n_left)]  # rows without columns carry no data lines
    if len(rows) != n_left:
        raise MatrixFormatError(0, f"expected {n_left} rows, found {len(rows)}")
    if k > min(n_left, n_right):
        raise MatrixFormatError(1, f"k={k} exceeds min(n_left, n_right)")
    return np.array(rows, dtype=float).reshape(n_left, n_right), k


def format_matrix(weights, k: int) -> str:
    w = np.asarray(weights, dtype=float)
    lines = [f"{w.shape[0]} {w.shape[1]} {k}"]
    if w.shape[1]:
        lines += [" ".join(repr(float(x)) for x in row) for row in w]
    return "\n".join(lines) + "\n"


def read_matrix(path) -> tuple[np.ndarray, int]:
    return parse_matrix(Path(path).read_text())


def write_matrix(weights, k: int, path) -> None:
    Path(path).write_text(format_matrix(weights, k))
