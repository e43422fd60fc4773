# cython: boundscheck=False, wraparound=False
"""Compiled shortest-edit-script kernel.

Same algorithm and tie conventions as linefix._myers_py; the two must stay
in lockstep (the test suite diffs their outputs).
"""

from libc.stdlib cimport free, malloc
from libc.string cimport memcpy


def lcs_pairs(a, b):
    """Matched index pairs of one minimal edit script, ascending in both coords."""
    cdef Py_ssize_t n = len(a)
    cdef Py_ssize_t m = len(b)
    if n == 0 or m == 0:
        return []
    cdef Py_ssize_t max_d = n + m
    cdef Py_ssize_t offset = max_d
    cdef Py_ssize_t i, d, k, x, y, end_d, prev_k, prev_x, prev_y, width, depths
    cdef Py_ssize_t *av = NULL
    cdef Py_ssize_t *bv = NULL
    cdef Py_ssize_t *v = NULL
    cdef Py_ssize_t **trace = NULL
    cdef Py_ssize_t *snap = NULL

    av = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    bv = <Py_ssize_t *> malloc(m * sizeof(Py_ssize_t))
    v = <Py_ssize_t *> malloc((2 * max_d + 1) * sizeof(Py_ssize_t))
    trace = <Py_ssize_t **> malloc((max_d + 1) * sizeof(Py_ssize_t *))
    depths = 0
    pairs = []
    try:
        if av == NULL or bv == NULL or v == NULL or trace == NULL:
            raise MemoryError()
        for i in range(n):
            av[i] = a[i]
        for i in range(m):
            bv[i] = b[i]
        for i in range(2 * max_d + 1):
            v[i] = 0

        end_d = -1
        for d in range(max_d + 1):
            width = 2 * d + 1
            snap = <Py_ssize_t *> malloc(width * sizeof(Py_ssize_t))
            if snap == NULL:
                raise MemoryError()
            memcpy(snap, v + offset - d, width * sizeof(Py_ssize_t))
            trace[d] = snap
            depths = d + 1
            k = -d
            while k <= d:
                if k == -d or (k != d and v[offset + k - 1] < v[offset + k + 1]):
                    x = v[offset + k + 1]
                else:
                    x = v[offset + k - 1] + 1
                y = x - k
                while x < n and y < m and av[x] == bv[y]:
                    x += 1
                    y += 1
                v[offset + k] = x
                if x >= n and y >= m:
                    end_d = d
                    break
                k += 2
            if end_d >= 0:
                break

        x = n
        y = m
        for d in range(end_d, -1, -1):
            if d == 0:
                prev_x = 0
                prev_y = 0
            else:
                snap = trace[d]
                k = x - y
                if k == -d or (k != d and snap[k - 1 + d] < snap[k + 1 + d]):
                    prev_k = k + 1
                else:
                    prev_k = k - 1
                prev_x = snap[prev_k + d]
                prev_y = prev_x - prev_k
            while x > prev_x and y > prev_y:
                x -= 1
                y -= 1
                pairs.append((x, y))
            x = prev_x
            y = prev_y
    finally:
        for i in range(depths):
            free(trace[i])
        free(trace)
        free(v)
        free(bv)
        free(av)

    pairs.reverse()
    return pairs
