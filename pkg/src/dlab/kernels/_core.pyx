# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""In-place gate application on flattened [2]*n_axes complex tensors.

Axis 0 is the most significant bit of the flat index; a gate's first qubit
maps to the most significant bit of its matrix index.
"""


def apply_1q(double complex[::1] psi, double complex[:, ::1] u,
             Py_ssize_t axis, Py_ssize_t n_axes):
    cdef Py_ssize_t size = 1 << n_axes
    cdef Py_ssize_t s = 1 << (n_axes - 1 - axis)
    cdef double complex u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    cdef Py_ssize_t blk, off, i0, i1
    cdef Py_ssize_t step = 2 * s
    cdef Py_ssize_t blocks = size / step
    cdef double complex a0, a1
    with nogil:
        for blk in range(blocks):
            for off in range(s):
                i0 = blk * step + off
                i1 = i0 + s
                a0 = psi[i0]
                a1 = psi[i1]
                psi[i0] = u00 * a0 + u01 * a1
                psi[i1] = u10 * a0 + u11 * a1


def apply_2q(double complex[::1] psi, double complex[:, ::1] u,
             Py_ssize_t axis_a, Py_ssize_t axis_b, Py_ssize_t n_axes):
    cdef Py_ssize_t size = 1 << n_axes
    cdef Py_ssize_t sa = 1 << (n_axes - 1 - axis_a)
    cdef Py_ssize_t sb = 1 << (n_axes - 1 - axis_b)
    cdef double complex m[4][4]
    cdef Py_ssize_t r, c
    for r in range(4):
        for c in range(4):
            m[r][c] = u[r, c]
    cdef Py_ssize_t i, i00, i01, i10, i11
    cdef double complex a00, a01, a10, a11
    with nogil:
        for i in range(size):
            # visit each 4-amplitude block once, from its (a=0, b=0) corner
            if (i & sa) or (i & sb):
                continue
            i00 = i
            i01 = i + sb
            i10 = i + sa
            i11 = i + sa + sb
            a00 = psi[i00]
            a01 = psi[i01]
            a10 = psi[i10]
            a11 = psi[i11]
            psi[i00] = m[0][0] * a00 + m[0][1] * a01 + m[0][2] * a10 + m[0][3] * a11
            psi[i01] = m[1][0] * a00 + m[1][1] * a01 + m[1][2] * a10 + m[1][3] * a11
            psi[i10] = m[2][0] * a00 + m[2][1] * a01 + m[2][2] * a10 + m[2][3] * a11
            psi[i11] = m[3][0] * a00 + m[3][1] * a01 + m[3][2] * a10 + m[3][3] * a11
