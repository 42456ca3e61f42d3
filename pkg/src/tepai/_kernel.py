"""Hot-path tensor kernels for the MPS engine.

States live in a preallocated buffer ``buf[site, left, phys, right]`` with the
active block of site ``s`` given by ``dims[s] x 2 x dims[s+1]``.  The jitted
driver executes a whole lowered gate stream (rotations plus the swap sweeps
for non-adjacent supports) without returning to Python.  Every function here
is valid plain Python: calling the ``.py_func`` attribute runs the identical
arithmetic un-jitted, which serves as the reference engine in tests.

Counter slots: 0 = applied unitaries, 1 = sum of kept-bond cubes over
two-site updates, 2 = max bond dimension seen, 3 = cumulative discarded
squared Schmidt weight.
"""

from __future__ import annotations

import numpy as np
from numba import njit

C_GATES = 0
C_CHI3 = 1
C_CHIMAX = 2
C_DISCARDED = 3


@njit(cache=True)
def _pauli2(code):
    m = np.zeros((2, 2), np.complex128)
    if code == 1:
        m[0, 1] = 1.0
        m[1, 0] = 1.0
    elif code == 2:
        m[0, 1] = -1j
        m[1, 0] = 1j
    else:
        m[0, 0] = 1.0
        m[1, 1] = -1.0
    return m


@njit(cache=True)
def _rot2(code, angle):
    p = _pauli2(code)
    g = np.zeros((2, 2), np.complex128)
    c = np.cos(0.5 * angle)
    g[0, 0] = c
    g[1, 1] = c
    return g - 1j * np.sin(0.5 * angle) * p


@njit(cache=True)
def _rot4(code_a, code_b, angle):
    pa = _pauli2(code_a)
    pb = _pauli2(code_b)
    kron = np.zeros((4, 4), np.complex128)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    kron[2 * i + k, 2 * j + l] = pa[i, j] * pb[k, l]
    g = np.zeros((4, 4), np.complex128)
    c = np.cos(0.5 * angle)
    for i in range(4):
        g[i, i] = c
    return g - 1j * np.sin(0.5 * angle) * kron


@njit(cache=True)
def _move_right(buf, dims, c):
    """QR-shift the canonical center one site right; bond dims are unchanged."""
    cl = dims[c]
    cr = dims[c + 1]
    m = np.ascontiguousarray(buf[c, :cl, :, :cr]).reshape(cl * 2, cr)
    q, r = np.linalg.qr(m)
    buf[c, :cl, :, :cr] = q.reshape(cl, 2, cr)
    cr2 = dims[c + 2]
    t = np.ascontiguousarray(buf[c + 1, :cr, :, :cr2]).reshape(cr, 2 * cr2)
    buf[c + 1, :cr, :, :cr2] = (r @ t).reshape(cr, 2, cr2)


@njit(cache=True)
def _move_left(buf, dims, c):
    cl = dims[c]
    cr = dims[c + 1]
    m = np.ascontiguousarray(buf[c, :cl, :, :cr]).reshape(cl, 2 * cr)
    q, r = np.linalg.qr(np.ascontiguousarray(m.conj().T))
    buf[c, :cl, :, :cr] = np.ascontiguousarray(q.conj().T).reshape(cl, 2, cr)
    clm = dims[c - 1]
    t = np.ascontiguousarray(buf[c - 1, :clm, :, :cl]).reshape(clm * 2, cl)
    buf[c - 1, :clm, :, :cl] = (t @ np.ascontiguousarray(r.conj().T)).reshape(clm, 2, cl)


@njit(cache=True)
def _ensure_center(buf, dims, center, s):
    """Move the center into the bond {s, s+1}."""
    while center < s:
        _move_right(buf, dims, center)
        center += 1
    while center > s + 1:
        _move_left(buf, dims, center)
        center -= 1
    return center


@njit(cache=True)
def _apply_one_site(buf, dims, s, gate):
    cl = dims[s]
    cr = dims[s + 1]
    t = np.ascontiguousarray(buf[s, :cl, :, :cr])
    for l in range(cl):
        buf[s, l, :, :cr] = gate @ t[l]


@njit(cache=True)
def _split_theta(buf, dims, s, mat, cl, cr, chi_cut, floor, merge_right, counters):
    """SVD-split a (cl*2, 2*cr) two-site matrix back into sites s, s+1."""
    u, sv, vh = np.linalg.svd(mat, False)
    smax = sv[0]
    kmax = min(chi_cut, sv.shape[0])
    k = 0
    for i in range(kmax):
        if sv[i] > smax * floor:
            k += 1
    if k == 0:
        k = 1
    total = 0.0
    for i in range(sv.shape[0]):
        total += sv[i] * sv[i]
    kept = 0.0
    for i in range(k):
        kept += sv[i] * sv[i]
    counters[C_DISCARDED] += (total - kept) / total
    scale = 1.0 / np.sqrt(kept)
    if merge_right:
        buf[s, :cl, :, :k] = np.ascontiguousarray(u[:, :k]).reshape(cl, 2, k)
        b = np.ascontiguousarray(vh[:k])
        for i in range(k):
            f = sv[i] * scale
            for j in range(2 * cr):
                b[i, j] *= f
        buf[s + 1, :k, :, :cr] = b.reshape(k, 2, cr)
    else:
        a = np.ascontiguousarray(u[:, :k])
        for i in range(k):
            f = sv[i] * scale
            for j in range(cl * 2):
                a[j, i] *= f
        buf[s, :cl, :, :k] = a.reshape(cl, 2, k)
        buf[s + 1, :k, :, :cr] = np.ascontiguousarray(vh[:k]).reshape(k, 2, cr)
    dims[s + 1] = k
    counters[C_GATES] += 1.0
    counters[C_CHI3] += float(k) ** 3
    if k > counters[C_CHIMAX]:
        counters[C_CHIMAX] = k


@njit(cache=True)
def _apply_two_site(buf, dims, s, gate, chi_cut, floor, merge_right, counters):
    cl = dims[s]
    cm = dims[s + 1]
    cr = dims[s + 2]
    a = np.ascontiguousarray(buf[s, :cl, :, :cm]).reshape(cl * 2, cm)
    b = np.ascontiguousarray(buf[s + 1, :cm, :, :cr]).reshape(cm, 2 * cr)
    theta = (a @ b).reshape(cl, 2, 2, cr)
    tmp = np.ascontiguousarray(theta.transpose(1, 2, 0, 3)).reshape(4, cl * cr)
    tmp = gate @ tmp
    mat = np.ascontiguousarray(tmp.reshape(2, 2, cl, cr).transpose(2, 0, 1, 3)).reshape(cl * 2, 2 * cr)
    _split_theta(buf, dims, s, mat, cl, cr, chi_cut, floor, merge_right, counters)


@njit(cache=True)
def _apply_swap(buf, dims, s, chi_cut, floor, merge_right, counters):
    """SWAP of neighbouring physical legs: a pure transpose, then split."""
    cl = dims[s]
    cm = dims[s + 1]
    cr = dims[s + 2]
    a = np.ascontiguousarray(buf[s, :cl, :, :cm]).reshape(cl * 2, cm)
    b = np.ascontiguousarray(buf[s + 1, :cm, :, :cr]).reshape(cm, 2 * cr)
    theta = (a @ b).reshape(cl, 2, 2, cr)
    mat = np.ascontiguousarray(theta.transpose(0, 2, 1, 3)).reshape(cl * 2, 2 * cr)
    _split_theta(buf, dims, s, mat, cl, cr, chi_cut, floor, merge_right, counters)


@njit(cache=True)
def run_stream(buf, dims, center, ga, gb, pa, pb, ang, anchors, chi_cut, floor, counters):
    """Execute a lowered gate stream; returns the new canonical center.

    ``gb[i] < 0`` marks a single-site rotation.  Non-adjacent two-site gates
    bring the right qubit next to the left one with swap sweeps and restore
    the layout afterwards; every swap counts as an applied unitary.
    ``anchors[i]`` is the bond the stream touches next after gate i, used to
    pick the cheaper split direction.
    """
    for i in range(ga.shape[0]):
        a = ga[i]
        b = gb[i]
        if b < 0:
            _apply_one_site(buf, dims, a, _rot2(pa[i], ang[i]))
            counters[C_GATES] += 1.0
        elif b == a + 1:
            center = _ensure_center(buf, dims, center, a)
            merge_right = anchors[i] > a
            _apply_two_site(buf, dims, a, _rot4(pa[i], pb[i], ang[i]), chi_cut, floor, merge_right, counters)
            center = a + 1 if merge_right else a
        else:
            for s in range(b - 1, a, -1):
                center = _ensure_center(buf, dims, center, s)
                _apply_swap(buf, dims, s, chi_cut, floor, False, counters)
                center = s
            _apply_two_site(buf, dims, a, _rot4(pa[i], pb[i], ang[i]), chi_cut, floor, True, counters)
            center = a + 1
            for s in range(a + 1, b):
                _apply_swap(buf, dims, s, chi_cut, floor, True, counters)
                center = s + 1
    return center
