# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled Levenshtein kernel.

Same contract as scalemine._pykernels.levenshtein; selected at import
time by scalemine.distance when the extension built successfully.
"""

from libc.stdlib cimport free, malloc

BACKEND = "c"


def levenshtein(str a, str b):
    """Classic unit-cost Levenshtein distance between two strings."""
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    cdef Py_ssize_t lo = 0
    cdef str tmp

    if a == b:
        return 0

    # Strip common prefix and suffix; never changes the distance.
    while lo < la and lo < lb and a[lo] == b[lo]:
        lo += 1
    while la > lo and lb > lo and a[la - 1] == b[lb - 1]:
        la -= 1
        lb -= 1
    a = a[lo:la]
    b = b[lo:lb]
    la -= lo
    lb -= lo
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la < lb:
        tmp = a
        a = b
        b = tmp
        la, lb = lb, la

    cdef Py_ssize_t* prev = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t* cur = <Py_ssize_t*> malloc((lb + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        if prev != NULL:
            free(prev)
        if cur != NULL:
            free(cur)
        raise MemoryError()

    cdef Py_ssize_t i, j, cost, dele, ins, result
    cdef Py_UCS4 ca
    cdef Py_ssize_t* swap
    try:
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            ca = a[i - 1]
            cur[0] = i
            for j in range(1, lb + 1):
                if ca == <Py_UCS4> b[j - 1]:
                    cost = prev[j - 1]
                else:
                    cost = prev[j - 1] + 1
                dele = prev[j] + 1
                if dele < cost:
                    cost = dele
                ins = cur[j - 1] + 1
                if ins < cost:
                    cost = ins
                cur[j] = cost
            swap = prev
            prev = cur
            cur = swap
        result = prev[lb]
    finally:
        free(prev)
        free(cur)
    return result
