"""Pure-Python secp256k1 point arithmetic (fallback path).

Same curve as the numba kernels, Jacobian coordinates over Python ints.
Selected when MEMSIG_PURE_PYTHON is set or numba is unavailable.
"""

FIELD_P = 2**256 - 2**32 - 977
CURVE_B = 7

# Jacobian points are (X, Y, Z) int tuples; Z == 0 is infinity.
INF = (0, 1, 0)


def jac_double(pt):
    X1, Y1, Z1 = pt
    if Z1 == 0 or Y1 == 0:
        return INF
    p = FIELD_P
    A = X1 * X1 % p
    B = Y1 * Y1 % p
    C = B * B % p
    D = 2 * ((X1 + B) * (X1 + B) - A - C) % p
    E = 3 * A % p
    F = E * E % p
    X3 = (F - 2 * D) % p
    Y3 = (E * (D - X3) - 8 * C) % p
    Z3 = 2 * Y1 * Z1 % p
    return (X3, Y3, Z3)


def jac_add_affine(pt, x2, y2):
    X1, Y1, Z1 = pt
    if Z1 == 0:
        return (x2, y2, 1)
    p = FIELD_P
    Z1Z1 = Z1 * Z1 % p
    U2 = x2 * Z1Z1 % p
    S2 = y2 * Z1 * Z1Z1 % p
    H = (U2 - X1) % p
    R = (S2 - Y1) % p
    if H == 0:
        if R == 0:
            return jac_double(pt)
        return INF
    HH = H * H % p
    HHH = H * HH % p
    V = X1 * HH % p
    X3 = (R * R - HHH - 2 * V) % p
    Y3 = (R * (V - X3) - Y1 * HHH) % p
    Z3 = Z1 * H % p
    return (X3, Y3, Z3)


def jac_to_affine(pt):
    X, Y, Z = pt
    if Z == 0:
        return None
    p = FIELD_P
    zi = pow(Z, p - 2, p)
    zi2 = zi * zi % p
    return (X * zi2 % p, Y * zi2 % p * zi % p)


def scalar_mult(x, y, e):
    """e * (x, y) -> affine pair or None for infinity."""
    acc = INF
    for bit in bin(e)[2:] if e else "":
        acc = jac_double(acc)
        if bit == "1":
            acc = jac_add_affine(acc, x, y)
    return jac_to_affine(acc)


def point_sum(points):
    """Sum of affine (x, y) pairs; None entries are the identity."""
    acc = INF
    for pt in points:
        if pt is None:
            continue
        acc = jac_add_affine(acc, pt[0], pt[1])
    return jac_to_affine(acc)
