"""Numba-compiled secp256k1 field and point kernels.

Field elements are little-endian arrays of eight 32-bit limbs stored in
uint64 slots, so a 64-bit word can hold limb products plus carries without
overflow.  Points travel through the kernels in Jacobian coordinates as a
flat uint64[24] buffer (X | Y | Z); Z == 0 marks the point at infinity.

Importing this module compiles the kernels (cached on disk after the first
run).  `memsig.group` falls back to the pure-Python path when numba is
unavailable or MEMSIG_PURE_PYTHON is set.
"""

import numpy as np
from numba import njit, uint64

# field prime p = 2^256 - 2^32 - 977
FIELD_P = 2**256 - 2**32 - 977

_M32 = uint64(0xFFFFFFFF)
_S32 = uint64(32)

_P_LIMBS = np.array(
    [(FIELD_P >> (32 * i)) & 0xFFFFFFFF for i in range(8)], dtype=np.uint64
)


def to_limbs(x: int) -> np.ndarray:
    return np.array([(x >> (32 * i)) & 0xFFFFFFFF for i in range(8)], dtype=np.uint64)


def from_limbs(a) -> int:
    x = 0
    for i in range(7, -1, -1):
        x = (x << 32) | int(a[i])
    return x


@njit(cache=True)
def _ge_p(a, off):
    for j in range(7, -1, -1):
        if a[off + j] > _P_LIMBS[j]:
            return True
        if a[off + j] < _P_LIMBS[j]:
            return False
    return True


@njit(cache=True)
def _sub_p(a, off):
    borrow = uint64(0)
    for j in range(8):
        v = a[off + j] - _P_LIMBS[j] - borrow
        borrow = v >> uint64(63)
        a[off + j] = v & _M32


@njit(cache=True)
def _f_add(a, ao, b, bo, out, oo):
    carry = uint64(0)
    for j in range(8):
        v = a[ao + j] + b[bo + j] + carry
        out[oo + j] = v & _M32
        carry = v >> _S32
    if carry != uint64(0) or _ge_p(out, oo):
        _sub_p(out, oo)


@njit(cache=True)
def _f_sub(a, ao, b, bo, out, oo):
    borrow = uint64(0)
    for j in range(8):
        v = a[ao + j] - b[bo + j] - borrow
        borrow = v >> uint64(63)
        out[oo + j] = v & _M32
    if borrow != uint64(0):
        carry = uint64(0)
        for j in range(8):
            v = out[oo + j] + _P_LIMBS[j] + carry
            out[oo + j] = v & _M32
            carry = v >> _S32


@njit(cache=True)
def _f_mul(a, ao, b, bo, out, oo, t):
    # t: uint64[16] scratch for the 512-bit schoolbook product
    for i in range(16):
        t[i] = uint64(0)
    for i in range(8):
        ai = a[ao + i]
        carry = uint64(0)
        for j in range(8):
            v = t[i + j] + ai * b[bo + j] + carry
            t[i + j] = v & _M32
            carry = v >> _S32
        t[i + 8] = carry
    # fold the upper 256 bits H back in: x = L + H*977 + (H << 32)
    carry = uint64(0)
    prev = uint64(0)
    for j in range(8):
        h = t[8 + j]
        v = t[j] + h * uint64(977) + prev + carry
        t[j] = v & _M32
        carry = v >> _S32
        prev = h
    v = prev + carry
    h8 = v & _M32
    h9 = v >> _S32
    # second fold: the leftover H2 = h8 + h9*2^32 is at most ~2^34
    lo = h8 + (h9 << _S32)
    v = t[0] + lo * uint64(977)
    t[0] = v & _M32
    carry = v >> _S32
    v = t[1] + lo + carry
    t[1] = v & _M32
    carry = v >> _S32
    j = 2
    while carry != uint64(0) and j < 8:
        v = t[j] + carry
        t[j] = v & _M32
        carry = v >> _S32
        j += 1
    if carry != uint64(0):
        # third fold: carry * 2^256 == carry * (2^32 + 977)
        v = t[0] + carry * uint64(977)
        t[0] = v & _M32
        c2 = v >> _S32
        v = t[1] + carry + c2
        t[1] = v & _M32
        c2 = v >> _S32
        j = 2
        while c2 != uint64(0):
            v = t[j] + c2
            t[j] = v & _M32
            c2 = v >> _S32
            j += 1
    if _ge_p(t, 0):
        _sub_p(t, 0)
    for j in range(8):
        out[oo + j] = t[j]


@njit(cache=True)
def _is_zero(a, off):
    for j in range(8):
        if a[off + j] != uint64(0):
            return False
    return True


# Jacobian point buffers: uint64[24] = X(8) | Y(8) | Z(8)


@njit(cache=True)
def _jac_double(p, out, t, w):
    # w: uint64[48] scratch (six field temporaries)
    if _is_zero(p, 8) or _is_zero(p, 16):
        for j in range(24):
            out[j] = uint64(0)
        return
    A = 0
    B = 8
    C = 16
    D = 24
    E = 32
    F = 40
    _f_mul(p, 0, p, 0, w, A, t)          # A = X^2
    _f_mul(p, 8, p, 8, w, B, t)          # B = Y^2
    _f_mul(w, B, w, B, w, C, t)          # C = B^2
    _f_add(p, 0, w, B, w, D)          # D = X + B
    _f_mul(w, D, w, D, w, D, t)          # D = (X+B)^2
    _f_sub(w, D, w, A, w, D)
    _f_sub(w, D, w, C, w, D)
    _f_add(w, D, w, D, w, D)          # D = 2((X+B)^2 - A - C)
    _f_add(w, A, w, A, w, E)
    _f_add(w, E, w, A, w, E)          # E = 3A
    _f_mul(w, E, w, E, w, F, t)          # F = E^2
    _f_mul(p, 8, p, 16, out, 16, t)
    _f_add(out, 16, out, 16, out, 16)  # Z3 = 2*Y*Z
    _f_sub(w, F, w, D, out, 0)
    _f_sub(out, 0, w, D, out, 0)       # X3 = F - 2D
    _f_sub(w, D, out, 0, w, A)         # reuse A slot: D - X3
    _f_mul(w, E, w, A, w, A, t)           # E*(D - X3)
    _f_add(w, C, w, C, w, C)
    _f_add(w, C, w, C, w, C)
    _f_add(w, C, w, C, w, C)           # 8C
    _f_sub(w, A, w, C, out, 8)         # Y3


@njit(cache=True)
def _jac_add_affine(p, ax, axo, ay, ayo, out, t, w):
    # out = p (Jacobian) + (ax, ay) (affine, assumed not infinity)
    if _is_zero(p, 16):
        for j in range(8):
            out[j] = ax[axo + j]
            out[8 + j] = ay[ayo + j]
            out[16 + j] = uint64(0)
        out[16] = uint64(1)
        return
    Z1Z1 = 0
    U2 = 8
    S2 = 16
    H = 24
    R = 32
    V = 40
    _f_mul(p, 16, p, 16, w, Z1Z1, t)
    _f_mul(ax, axo, w, Z1Z1, w, U2, t)
    _f_mul(ay, ayo, p, 16, w, S2, t)
    _f_mul(w, S2, w, Z1Z1, w, S2, t)
    _f_sub(w, U2, p, 0, w, H)          # H = U2 - X1
    _f_sub(w, S2, p, 8, w, R)          # R = S2 - Y1
    if _is_zero(w, H):
        if _is_zero(w, R):
            _jac_double(p, out, t, w)
            return
        for j in range(24):
            out[j] = uint64(0)
        return
    _f_mul(w, H, w, H, w, Z1Z1, t)        # HH (reuse slot)
    _f_mul(w, H, w, Z1Z1, w, U2, t)       # HHH (reuse slot)
    _f_mul(p, 0, w, Z1Z1, w, V, t)        # V = X1*HH
    _f_mul(p, 16, w, H, out, 16, t)       # Z3 = Z1*H
    _f_mul(w, R, w, R, out, 0, t)
    _f_sub(out, 0, w, U2, out, 0)
    _f_sub(out, 0, w, V, out, 0)
    _f_sub(out, 0, w, V, out, 0)       # X3 = R^2 - HHH - 2V
    _f_sub(w, V, out, 0, w, V)
    _f_mul(w, R, w, V, w, V, t)           # R*(V - X3)
    _f_mul(p, 8, w, U2, w, U2, t)         # Y1*HHH
    _f_sub(w, V, w, U2, out, 8)        # Y3


@njit(cache=True)
def _jac_add_jac(p, q, out, t, w):
    if _is_zero(p, 16):
        for j in range(24):
            out[j] = q[j]
        return
    if _is_zero(q, 16):
        for j in range(24):
            out[j] = p[j]
        return
    Z1Z1 = 0
    Z2Z2 = 8
    U1 = 16
    U2 = 24
    S1 = 32
    S2 = 40
    _f_mul(p, 16, p, 16, w, Z1Z1, t)
    _f_mul(q, 16, q, 16, w, Z2Z2, t)
    _f_mul(p, 0, w, Z2Z2, w, U1, t)
    _f_mul(q, 0, w, Z1Z1, w, U2, t)
    _f_mul(p, 8, q, 16, w, S1, t)
    _f_mul(w, S1, w, Z2Z2, w, S1, t)
    _f_mul(q, 8, p, 16, w, S2, t)
    _f_mul(w, S2, w, Z1Z1, w, S2, t)
    _f_sub(w, U2, w, U1, w, U2)        # H
    _f_sub(w, S2, w, S1, w, S2)        # R
    if _is_zero(w, U2):
        if _is_zero(w, S2):
            _jac_double(p, out, t, w)
            return
        for j in range(24):
            out[j] = uint64(0)
        return
    H = U2
    R = S2
    _f_mul(w, H, w, H, w, Z2Z2, t)        # HH
    _f_mul(w, H, w, Z2Z2, w, Z1Z1, t)     # HHH
    _f_mul(w, U1, w, Z2Z2, w, U1, t)      # V = U1*HH
    _f_mul(p, 16, q, 16, out, 16, t)
    _f_mul(out, 16, w, H, out, 16, t)     # Z3 = Z1*Z2*H
    _f_mul(w, R, w, R, out, 0, t)
    _f_sub(out, 0, w, Z1Z1, out, 0)
    _f_sub(out, 0, w, U1, out, 0)
    _f_sub(out, 0, w, U1, out, 0)      # X3
    _f_sub(w, U1, out, 0, w, U1)
    _f_mul(w, R, w, U1, w, U1, t)
    _f_mul(w, S1, w, Z1Z1, w, S1, t)
    _f_sub(w, U1, w, S1, out, 8)       # Y3


@njit(cache=True)
def point_product(pts, out):
    """Accumulate the sum of n affine points.

    pts: uint64[n, 16] rows of X|Y limbs (no infinities); out: uint64[24]
    Jacobian result.
    """
    t = np.zeros(16, dtype=np.uint64)
    w = np.zeros(48, dtype=np.uint64)
    acc = np.zeros(24, dtype=np.uint64)
    nxt = np.zeros(24, dtype=np.uint64)
    for i in range(pts.shape[0]):
        _jac_add_affine(acc, pts[i], 0, pts[i], 8, nxt, t, w)
        acc, nxt = nxt, acc
    for j in range(24):
        out[j] = acc[j]


@njit(cache=True)
def scalar_mult(px, py, ebits, out):
    """out (Jacobian) = e * (px, py); ebits is a uint8 MSB-first bit array."""
    t = np.zeros(16, dtype=np.uint64)
    w = np.zeros(48, dtype=np.uint64)
    acc = np.zeros(24, dtype=np.uint64)
    nxt = np.zeros(24, dtype=np.uint64)
    for i in range(ebits.shape[0]):
        _jac_double(acc, nxt, t, w)
        acc, nxt = nxt, acc
        if ebits[i] != 0:
            _jac_add_affine(acc, px, 0, py, 0, nxt, t, w)
            acc, nxt = nxt, acc
    for j in range(24):
        out[j] = acc[j]


@njit(cache=True)
def point_add(ax, ay, bx, by, out):
    """out (Jacobian) = (ax, ay) + (bx, by), both affine non-infinite."""
    t = np.zeros(16, dtype=np.uint64)
    w = np.zeros(48, dtype=np.uint64)
    p = np.zeros(24, dtype=np.uint64)
    for j in range(8):
        p[j] = ax[j]
        p[8 + j] = ay[j]
        p[16 + j] = uint64(0)
    p[16] = uint64(1)
    _jac_add_affine(p, bx, 0, by, 0, out, t, w)
