# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled distance kernels: heap Dijkstra and horizontal sweeping.

Same contracts as the pure fallback in _slow.py; see that module for the
update rules.  Distances are float64; the hot loops run without the GIL.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, floor, sqrt

BACKEND = "compiled"


# --- binary min-heap with position tracking (decrease-key) ---------------

cdef inline void _sift_up(long* heap, long* pos, double* key, long i) noexcept nogil:
    cdef long parent, node
    node = heap[i]
    while i > 0:
        parent = (i - 1) >> 1
        if key[heap[parent]] <= key[node]:
            break
        heap[i] = heap[parent]
        pos[heap[i]] = i
        i = parent
    heap[i] = node
    pos[node] = i


cdef inline void _sift_down(long* heap, long* pos, double* key, long size, long i) noexcept nogil:
    cdef long child, node
    node = heap[i]
    while True:
        child = 2 * i + 1
        if child >= size:
            break
        if child + 1 < size and key[heap[child + 1]] < key[heap[child]]:
            child += 1
        if key[node] <= key[heap[child]]:
            break
        heap[i] = heap[child]
        pos[heap[i]] = i
        i = child
    heap[i] = node
    pos[node] = i


def grid_dijkstra(shape, offsets, weights, source):
    """Shortest distances from `source` on the grid graph (see _slow)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] shape_arr = np.ascontiguousarray(shape, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef long dim = shape_arr.shape[0]
    cdef long K = off.shape[0]
    cdef long nodes = 1
    cdef long a
    for a in range(dim):
        nodes *= shape_arr[a]

    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.full(nodes, np.inf)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] heap_arr = np.empty(nodes, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] pos_arr = np.full(nodes, -1, dtype=np.int64)

    cdef double* d = <double*> dist.data
    cdef long* heap = <long*> heap_arr.data
    cdef long* pos = <long*> pos_arr.data
    cdef double* wp = <double*> w.data
    cdef long* op = <long*> off.data
    cdef long* sp = <long*> shape_arr.data

    cdef long strides[8]
    strides[dim - 1] = 1
    for a in range(dim - 2, -1, -1):
        strides[a] = strides[a + 1] * sp[a + 1]

    cdef long size = 0
    cdef long src = source
    cdef long u, v, k, s, rem, coord, tcoord, i
    cdef bint ok
    cdef double wu, cand

    d[src] = 0.0
    heap[0] = src
    pos[src] = 0
    size = 1

    with nogil:
        while size > 0:
            u = heap[0]
            size -= 1
            heap[0] = heap[size]
            pos[heap[0]] = 0
            if size > 0:
                _sift_down(heap, pos, d, size, 0)
            pos[u] = -2  # settled
            for k in range(K):
                for s in range(2):
                    # follow offset k forward (s=0) or backward (s=1)
                    ok = True
                    v = u
                    rem = u
                    for a in range(dim):
                        coord = rem / strides[a]
                        rem = rem % strides[a]
                        if s == 0:
                            tcoord = coord + op[k * dim + a]
                        else:
                            tcoord = coord - op[k * dim + a]
                        if tcoord < 0 or tcoord >= sp[a]:
                            ok = False
                            break
                        v += (tcoord - coord) * strides[a]
                    if not ok:
                        continue
                    if pos[v] == -2:
                        continue
                    # edge weight lives at the node the offset points away from
                    if s == 0:
                        wu = wp[k * nodes + u]
                    else:
                        wu = wp[k * nodes + v]
                    if not wu < INFINITY:
                        continue
                    cand = d[u] + wu
                    if cand < d[v]:
                        d[v] = cand
                        if pos[v] == -1:
                            heap[size] = v
                            pos[v] = size
                            size += 1
                            _sift_up(heap, pos, d, size - 1)
                        else:
                            _sift_up(heap, pos, d, pos[v])
    return dist


def cc_distance(
    hshape,
    zshape,
    hspacing,
    horigin,
    zspacing,
    zorigin,
    hoff,
    cost,
    twist,
    vcost,
    source,
    max_sweeps=100000,
):
    """Horizontal-path distance field by Gauss-Seidel sweeps (see _slow)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] hs = np.ascontiguousarray(hshape, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hsp = np.ascontiguousarray(hspacing, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] hor = np.ascontiguousarray(horigin, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] off = np.ascontiguousarray(hoff, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cst = np.ascontiguousarray(cost, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] tw = np.ascontiguousarray(twist, dtype=np.float64)

    cdef long dh = hs.shape[0]
    cdef long K = off.shape[0]
    cdef bint has_z = int(zshape) > 0
    cdef long nz = int(zshape) if has_z else 1
    cdef double dz = float(zspacing) if has_z else 1.0
    cdef double vc = float(vcost)
    cdef long nh = 1
    cdef long a
    for a in range(dh):
        nh *= hs[a]
    cdef long nodes = nh * nz

    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.full(nodes, np.inf)
    cdef double* d = <double*> dist.data
    cdef long* hsp_i = <long*> hs.data
    cdef double* spc = <double*> hsp.data
    cdef double* org = <double*> hor.data
    cdef long* op = <long*> off.data
    cdef double* cp = <double*> cst.data
    cdef double* tp = <double*> tw.data

    cdef long hstrides[8]
    hstrides[dh - 1] = 1
    for a in range(dh - 2, -1, -1):
        hstrides[a] = hstrides[a + 1] * hsp_i[a + 1]

    d[<long> source] = 0.0

    cdef long sweeps = 0, changed = 1
    cdef long sweep_cap = int(max_sweeps)
    cdef long hi, h, k, rem, coord, tcoord, tflat, z, zi, lo, base, idx
    cdef long zstart, zend, zstep, hstart, hend, hstep
    cdef bint ok, fwd
    cdef double tshift, frac, cand, vlo, vhi, ck, x

    with nogil:
        while changed and sweeps < sweep_cap:
            changed = 0
            sweeps += 1
            fwd = (sweeps % 2) == 1
            if fwd:
                hstart = 0; hend = nh; hstep = 1
                zstart = 0; zend = nz; zstep = 1
            else:
                hstart = nh - 1; hend = -1; hstep = -1
                zstart = nz - 1; zend = -1; zstep = -1
            hi = hstart
            while hi != hend:
                for k in range(K):
                    # target horizontal node and twist shift of this move
                    ok = True
                    tflat = hi
                    rem = hi
                    tshift = 0.0
                    for a in range(dh):
                        coord = rem / hstrides[a]
                        rem = rem % hstrides[a]
                        tcoord = coord + op[k * dh + a]
                        if tcoord < 0 or tcoord >= hsp_i[a]:
                            ok = False
                            break
                        tflat += (tcoord - coord) * hstrides[a]
                        if has_z:
                            x = org[a] + spc[a] * coord
                            tshift += tp[k * dh + a] * x
                    if not ok:
                        continue
                    ck = cp[k]
                    if not has_z:
                        cand = ck + d[tflat]
                        if cand < d[hi]:
                            d[hi] = cand
                            changed = 1
                        continue
                    tshift = tshift / dz
                    base = <long> floor(tshift)
                    frac = tshift - base
                    z = zstart
                    while z != zend:
                        lo = z + base
                        vlo = INFINITY
                        vhi = INFINITY
                        if 0 <= lo < nz:
                            vlo = d[tflat * nz + lo]
                        if 0 <= lo + 1 < nz:
                            vhi = d[tflat * nz + lo + 1]
                        if vlo < INFINITY and vhi < INFINITY:
                            cand = ck + (1.0 - frac) * vlo + frac * vhi
                        elif vlo < INFINITY:
                            cand = ck + vlo + vc * sqrt(frac * dz)
                        elif vhi < INFINITY:
                            cand = ck + vhi + vc * sqrt((1.0 - frac) * dz)
                        else:
                            z += zstep
                            continue
                        idx = hi * nz + z
                        if cand < d[idx]:
                            d[idx] = cand
                            changed = 1
                        z += zstep
                hi += hstep
    return dist
