"""Prime-order cyclic group abstraction with two interchangeable backends.

`Secp256k1Group` is the production backend (order ~2^256, cofactor 1, so no
cofactor handling leaks through the API).  `ToyGroup` is a configurable
Schnorr group (prime-order subgroup of Z_q^*) small enough for brute-force
oracles and attack experiments.

All operations are pure functions on immutable values except the
exponentiation counter, which instruments `exp` calls for the cost
benchmarks.  Constant-time discipline is deliberately not provided; this is
a research artifact, not a production signer.
"""

import os
import random
from abc import ABC, abstractmethod

import gmpy2

_PURE_PYTHON = bool(os.environ.get("MEMSIG_PURE_PYTHON"))

if not _PURE_PYTHON:
    try:
        import numpy as _np

        from . import _secp_kernels as _K
    except ImportError:  # pragma: no cover - exercised via env flag instead
        _PURE_PYTHON = True

from . import _secp_python as _PY

__all__ = [
    "Group",
    "ToyGroup",
    "Secp256k1Group",
    "SecpPoint",
    "toy_group_setup",
    "kernels_enabled",
]


def kernels_enabled() -> bool:
    """True when the numba-compiled point kernels are in use."""
    return not _PURE_PYTHON


class Group(ABC):
    """Shared scalar-field plumbing plus the abstract group operations."""

    backend_id: str
    p: int  # group order (prime)

    def __init__(self):
        self.exp_count = 0

    # -- instrumentation ---------------------------------------------------

    def reset_exp_count(self) -> int:
        old = self.exp_count
        self.exp_count = 0
        return old

    # -- scalar field (Z_p) ------------------------------------------------

    def scalar_add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def scalar_sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def scalar_mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def scalar_neg(self, a: int) -> int:
        return (-a) % self.p

    def scalar_inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("scalar 0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def random_scalar(self, rng) -> int:
        # rejection sampling over full-width draws keeps the result uniform
        bits = self.scalar_len * 8
        while True:
            v = rng.getrandbits(bits)
            if v < self.p:
                return v

    @property
    def scalar_len(self) -> int:
        return (self.p.bit_length() + 7) // 8

    def encode_scalar(self, s: int) -> bytes:
        if not 0 <= s < self.p:
            raise ValueError("scalar out of range")
        return s.to_bytes(self.scalar_len, "big")

    def decode_scalar(self, b: bytes) -> int:
        if len(b) != self.scalar_len:
            raise ValueError("bad scalar encoding length")
        s = int.from_bytes(b, "big")
        if s >= self.p:
            raise ValueError("scalar not canonical")
        return s

    # -- group operations --------------------------------------------------

    @property
    @abstractmethod
    def g(self):
        """Generator of the order-p subgroup."""

    @property
    @abstractmethod
    def identity(self):
        """Neutral element."""

    @property
    @abstractmethod
    def element_len(self) -> int:
        """Length of a canonical element encoding in bytes."""

    @abstractmethod
    def exp(self, base, e: int):
        """base^e; increments the instrumented exponentiation counter."""

    @abstractmethod
    def small_pow(self, base, n: int):
        """base^n for protocol-internal small powers; never counted."""

    @abstractmethod
    def element_mul(self, a, b):
        pass

    @abstractmethod
    def element_inv(self, a):
        pass

    @abstractmethod
    def element_product(self, elems):
        """Product of many elements (uncounted; used for joint commitments)."""

    @abstractmethod
    def encode(self, el) -> bytes:
        pass

    @abstractmethod
    def decode(self, b: bytes):
        """Inverse of encode; rejects non-members of the order-p subgroup."""

    @abstractmethod
    def random_element(self, rng):
        """Uniform group element sampled directly (no counted exp)."""

    def is_identity(self, el) -> bool:
        return el == self.identity

    def encode_hex(self, el) -> str:
        return self.encode(el).hex()

    def decode_hex(self, s: str):
        return self.decode(bytes.fromhex(s))


class ToyGroup(Group):
    """Order-p subgroup of Z_q^* with small, configurable parameters."""

    backend_id = "toy"

    def __init__(self, q: int, p: int, generator: int):
        super().__init__()
        if not gmpy2.is_prime(q) or not gmpy2.is_prime(p):
            raise ValueError("q and p must be prime")
        if (q - 1) % p != 0:
            raise ValueError("p must divide q-1")
        if generator == 1 or pow(generator, p, q) != 1:
            raise ValueError("generator must have order exactly p")
        self.q = q
        self.p = p
        self._g = generator

    @property
    def g(self) -> int:
        return self._g

    @property
    def identity(self) -> int:
        return 1

    @property
    def element_len(self) -> int:
        return (self.q.bit_length() + 7) // 8

    def exp(self, base: int, e: int) -> int:
        self.exp_count += 1
        return pow(base, e % self.p, self.q)

    def small_pow(self, base: int, n: int) -> int:
        return pow(base, n % self.p, self.q)

    def element_mul(self, a: int, b: int) -> int:
        return a * b % self.q

    def element_inv(self, a: int) -> int:
        return pow(a, self.q - 2, self.q)

    def element_product(self, elems) -> int:
        acc = 1
        for el in elems:
            acc = acc * el % self.q
        return acc

    def encode(self, el: int) -> bytes:
        return el.to_bytes(self.element_len, "big")

    def decode(self, b: bytes) -> int:
        if len(b) != self.element_len:
            raise ValueError("bad element encoding length")
        x = int.from_bytes(b, "big")
        if not 1 <= x < self.q:
            raise ValueError("element out of range")
        if pow(x, self.p, self.q) != 1:
            raise ValueError("element not in the order-p subgroup")
        return x

    def random_element(self, rng) -> int:
        return pow(self._g, self.random_scalar(rng), self.q)

    @classmethod
    def default(cls) -> "ToyGroup":
        """Fixed desk-scale parameters used by the CLI's --group toy."""
        return toy_group_setup(24, random.Random(0x7071))


def toy_group_setup(p_bits: int, rng, max_attempts: int = 10_000) -> ToyGroup:
    """Generate a fresh toy Schnorr group with a subgroup order of p_bits."""
    if not 8 <= p_bits <= 64:
        raise ValueError("p_bits must be in [8, 64]")
    for _ in range(max_attempts):
        p = int(gmpy2.next_prime(rng.getrandbits(p_bits) | (1 << (p_bits - 1))))
        if p.bit_length() != p_bits:
            continue
        for _ in range(200):
            k = 2 * rng.randrange(1, 1 << 12)
            q = k * p + 1
            if not gmpy2.is_prime(q):
                continue
            for _ in range(50):
                x = rng.randrange(2, q - 1)
                h = pow(x, (q - 1) // p, q)
                if h != 1:
                    return ToyGroup(q, p, h)
    raise RuntimeError("toy group search exhausted its attempt budget")


class SecpPoint:
    """Immutable secp256k1 point; `inf` marks the identity."""

    __slots__ = ("x", "y", "inf", "_limbs")

    def __init__(self, x=None, y=None, inf=False):
        self.x = x
        self.y = y
        self.inf = inf
        self._limbs = None

    @property
    def limbs(self):
        if self._limbs is None:
            arr = _np.empty(16, dtype=_np.uint64)
            arr[:8] = _K.to_limbs(self.x)
            arr[8:] = _K.to_limbs(self.y)
            self._limbs = arr
        return self._limbs

    def __eq__(self, other):
        if not isinstance(other, SecpPoint):
            return NotImplemented
        if self.inf or other.inf:
            return self.inf and other.inf
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y, self.inf))

    def __repr__(self):
        if self.inf:
            return "SecpPoint(infinity)"
        return f"SecpPoint(x={self.x:#x})"


_SECP_INF = SecpPoint(inf=True)


class Secp256k1Group(Group):
    """secp256k1: prime order, cofactor 1, ~128-bit security."""

    backend_id = "production"

    FIELD_P = _PY.FIELD_P
    ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
    GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
    GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

    def __init__(self):
        super().__init__()
        self.p = self.ORDER
        self._g = SecpPoint(self.GX, self.GY)

    @property
    def g(self) -> SecpPoint:
        return self._g

    @property
    def identity(self) -> SecpPoint:
        return _SECP_INF

    @property
    def element_len(self) -> int:
        return 33

    def _mult(self, base: SecpPoint, e: int) -> SecpPoint:
        e %= self.p
        if e == 0 or base.inf:
            return _SECP_INF
        if _PURE_PYTHON:
            aff = _PY.scalar_mult(base.x, base.y, e)
        else:
            bits = _np.frombuffer(
                bin(e)[2:].encode(), dtype=_np.uint8
            ) - _np.uint8(ord("0"))
            out = _np.empty(24, dtype=_np.uint64)
            _K.scalar_mult(base.limbs[:8].copy(), base.limbs[8:].copy(), bits, out)
            aff = self._jac_out_to_affine(out)
        return self._from_affine(aff)

    @staticmethod
    def _jac_out_to_affine(out):
        X = _K.from_limbs(out[0:8])
        Y = _K.from_limbs(out[8:16])
        Z = _K.from_limbs(out[16:24])
        return _PY.jac_to_affine((X, Y, Z))

    @staticmethod
    def _from_affine(aff) -> SecpPoint:
        if aff is None:
            return _SECP_INF
        return SecpPoint(aff[0], aff[1])

    def exp(self, base: SecpPoint, e: int) -> SecpPoint:
        self.exp_count += 1
        return self._mult(base, e)

    def small_pow(self, base: SecpPoint, n: int) -> SecpPoint:
        return self._mult(base, n)

    def element_mul(self, a: SecpPoint, b: SecpPoint) -> SecpPoint:
        if a.inf:
            return b
        if b.inf:
            return a
        if _PURE_PYTHON:
            aff = _PY.jac_to_affine(_PY.jac_add_affine((a.x, a.y, 1), b.x, b.y))
        else:
            out = _np.empty(24, dtype=_np.uint64)
            _K.point_add(
                a.limbs[:8].copy(), a.limbs[8:].copy(),
                b.limbs[:8].copy(), b.limbs[8:].copy(), out,
            )
            aff = self._jac_out_to_affine(out)
        return self._from_affine(aff)

    def element_inv(self, a: SecpPoint) -> SecpPoint:
        if a.inf:
            return a
        return SecpPoint(a.x, self.FIELD_P - a.y if a.y else 0)

    def element_product(self, elems) -> SecpPoint:
        pts = [el for el in elems if not el.inf]
        if not pts:
            return _SECP_INF
        if _PURE_PYTHON:
            aff = _PY.point_sum((pt.x, pt.y) for pt in pts)
        else:
            # bulk limb conversion: one to_bytes per coordinate plus a
            # single frombuffer beats building each point's limb cache
            raw = b"".join(
                pt.x.to_bytes(32, "little") + pt.y.to_bytes(32, "little")
                for pt in pts
            )
            arr = _np.ascontiguousarray(
                _np.frombuffer(raw, dtype=_np.uint32)
                .astype(_np.uint64)
                .reshape(len(pts), 16)
            )
            out = _np.empty(24, dtype=_np.uint64)
            _K.point_product(arr, out)
            aff = self._jac_out_to_affine(out)
        return self._from_affine(aff)

    def encode(self, el: SecpPoint) -> bytes:
        if el.inf:
            return bytes(33)
        return bytes([2 + (el.y & 1)]) + el.x.to_bytes(32, "big")

    def decode(self, b: bytes) -> SecpPoint:
        if len(b) != 33:
            raise ValueError("bad element encoding length")
        if b == bytes(33):
            return _SECP_INF
        prefix = b[0]
        if prefix not in (2, 3):
            raise ValueError("bad point prefix")
        x = int.from_bytes(b[1:], "big")
        fp = self.FIELD_P
        if x >= fp:
            raise ValueError("x out of field range")
        y2 = (pow(x, 3, fp) + _PY.CURVE_B) % fp
        y = pow(y2, (fp + 1) // 4, fp)
        if y * y % fp != y2:
            raise ValueError("x is not on the curve")
        if (y & 1) != (prefix & 1):
            y = fp - y
        return SecpPoint(x, y)

    def random_element(self, rng):
        fp = self.FIELD_P
        while True:
            x = rng.getrandbits(256)
            if x >= fp:
                continue
            y2 = (pow(x, 3, fp) + _PY.CURVE_B) % fp
            y = pow(y2, (fp + 1) // 4, fp)
            if y * y % fp != y2:
                continue
            if rng.getrandbits(1):
                y = fp - y
            return SecpPoint(x, y)


def get_group(name: str) -> Group:
    if name == "production":
        return Secp256k1Group()
    if name == "toy":
        return ToyGroup.default()
    raise ValueError(f"unknown group backend: {name}")
