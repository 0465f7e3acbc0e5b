"""Integer kernels behind the exact-distance operations.

Every distance table is held as an integer matrix over one common
denominator, so shortest paths, triangle scans and isometry backtracking
are exact integer computations.  Each kernel has a numba version and a
plain numpy/Python version with identical results; set
``RIGIDMETRIC_NUMBA=0`` to force the fallback.  Object-dtype matrices
(values too large for int64) always take the fallback.
"""

from __future__ import annotations

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

INT64_SAFE = 2**61


def numba_enabled() -> bool:
    flag = os.environ.get("RIGIDMETRIC_NUMBA", "1").strip().lower()
    return HAVE_NUMBA and flag not in {"0", "false", "no", "off"}


def _use_numba(*arrays: np.ndarray) -> bool:
    return numba_enabled() and all(a.dtype == np.int64 for a in arrays)


# {{{ floyd-warshall


def _fw_numpy(D: np.ndarray) -> np.ndarray:
    # INF entries stay >= INF because every finite sum is < INF (see caller)
    for k in range(D.shape[0]):
        np.minimum(D, D[:, k : k + 1] + D[k : k + 1, :], out=D)
    return D


if HAVE_NUMBA:

    @njit(cache=True)
    def _fw_numba(D, inf):  # pragma: no cover - compiled
        n = D.shape[0]
        for k in range(n):
            for i in range(n):
                dik = D[i, k]
                if dik >= inf:
                    continue
                for j in range(n):
                    dkj = D[k, j]
                    if dkj >= inf:
                        continue
                    s = dik + dkj
                    if s < D[i, j]:
                        D[i, j] = s
        return D


def floyd_warshall(W: np.ndarray, inf: int) -> np.ndarray:
    """All-pairs shortest paths on a square weight matrix.

    ``inf`` marks missing edges and must exceed the sum of all finite
    weights; entries still ``>= inf`` on return are unreachable pairs.
    """
    D = W.copy()
    if _use_numba(D):
        return _fw_numba(D, np.int64(inf))
    return _fw_numpy(D)


# }}}

# {{{ triangle inequality scan


def _triangle_numpy(D: np.ndarray) -> np.ndarray:
    n = D.shape[0]
    found = []
    for j in range(n):
        bad = D > D[:, j : j + 1] + D[j : j + 1, :]
        ii, kk = np.nonzero(bad)
        for i, k in zip(ii.tolist(), kk.tolist()):
            if i < k and j != i and j != k:
                found.append((i, j, k))
    found.sort()
    return np.array(found, dtype=np.int64).reshape(-1, 3)


if HAVE_NUMBA:

    @njit(cache=True)
    def _triangle_count(D, out, fill):  # pragma: no cover - compiled
        # k == j needs no test: D[j, j] = 0 and the distances are nonnegative
        n = D.shape[0]
        count = 0
        for i in range(n):
            row_i = D[i]
            for j in range(n):
                if j == i:
                    continue
                dij = row_i[j]
                row_j = D[j]
                for k in range(i + 1, n):
                    if row_i[k] > dij + row_j[k]:
                        if fill:
                            out[count, 0] = i
                            out[count, 1] = j
                            out[count, 2] = k
                        count += 1
        return count

    def _triangle_numba(D):
        n = _triangle_count(D, np.empty((0, 3), dtype=np.int64), False)
        out = np.empty((n, 3), dtype=np.int64)
        if n:
            _triangle_count(D, out, True)
        # rows come out ordered by (i, j, k)
        return out


def triangle_violations(D: np.ndarray) -> np.ndarray:
    """Rows ``(i, j, k)`` with ``i < k`` and ``D[i,k] > D[i,j] + D[j,k]``, sorted."""
    if _use_numba(D):
        return _triangle_numba(D)
    return _triangle_numpy(D)


# }}}

# {{{ injective distance-preserving maps


def _embed_python(A, B, cand, order, limit):
    n = A.shape[0]
    m = B.shape[0]
    A = A.tolist()
    B = B.tolist()
    cand = cand.tolist()
    order = [int(v) for v in order]
    assign = [-1] * n
    used = [False] * m
    out: list[list[int]] = []

    def rec(depth: int) -> bool:
        if depth == n:
            out.append(list(assign))
            return limit >= 0 and len(out) >= limit
        v = order[depth]
        row_a = A[v]
        cand_v = cand[v]
        for w in range(m):
            if used[w] or not cand_v[w]:
                continue
            row_b = B[w]
            ok = True
            for p in range(depth):
                u = order[p]
                if row_a[u] != row_b[assign[u]]:
                    ok = False
                    break
            if not ok:
                continue
            assign[v] = w
            used[w] = True
            stop = rec(depth + 1)
            used[w] = False
            assign[v] = -1
            if stop:
                return True
        return False

    rec(0)
    return np.array(out, dtype=np.int64).reshape(len(out), n)


if HAVE_NUMBA:

    @njit(cache=True)
    def _embed_numba(A, B, cand, order, limit):  # pragma: no cover - compiled
        n = A.shape[0]
        m = B.shape[0]
        cap = 16
        out = np.empty((cap, n), dtype=np.int64)
        count = 0
        if n == 0:
            return out[:0]
        assign = np.full(n, -1, dtype=np.int64)
        used = np.zeros(m, dtype=np.bool_)
        nxt = np.zeros(n, dtype=np.int64)
        depth = 0
        while depth >= 0:
            v = order[depth]
            if assign[v] >= 0:
                used[assign[v]] = False
                assign[v] = -1
            c = nxt[depth]
            found = -1
            while c < m:
                w = c
                c += 1
                if used[w] or not cand[v, w]:
                    continue
                ok = True
                for p in range(depth):
                    u = order[p]
                    if A[v, u] != B[w, assign[u]]:
                        ok = False
                        break
                if ok:
                    found = w
                    break
            nxt[depth] = c
            if found < 0:
                nxt[depth] = 0
                depth -= 1
                continue
            assign[v] = found
            used[found] = True
            if depth == n - 1:
                if count == cap:
                    cap *= 2
                    grown = np.empty((cap, n), dtype=np.int64)
                    grown[:count] = out[:count]
                    out = grown
                out[count] = assign
                count += 1
                if limit >= 0 and count >= limit:
                    break
            else:
                depth += 1
        return out[:count]


def search_embeddings(
    A: np.ndarray,
    B: np.ndarray,
    cand: np.ndarray,
    order: np.ndarray,
    limit: int = -1,
) -> np.ndarray:
    """Enumerate injective maps ``v -> w`` with ``A[u,v] == B[f(u),f(v)]``.

    ``cand[v, w]`` restricts the images of ``v``; ``order`` is the order in
    which source points are assigned.  Rows come out in depth-first order,
    i.e. lexicographic in ``(f(order[0]), f(order[1]), ...)``.  ``limit < 0``
    means no limit.  The empty source has exactly one (empty) map.
    """
    n = A.shape[0]
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if n > B.shape[0]:
        return np.zeros((0, n), dtype=np.int64)
    order = np.asarray(order, dtype=np.int64)
    cand = np.ascontiguousarray(cand, dtype=np.bool_)
    if _use_numba(A, B):
        return _embed_numba(A, B, cand, order, np.int64(limit))
    return _embed_python(A, B, cand, order, limit)


# }}}
