"""Vectorised polynomial hashing modulo the Mersenne prime 2**61 - 1.

Many polynomials are evaluated at a handful of keys at once as a matrix
product ``coeffs @ vandermonde``.  Both operands are split into 21-bit limbs
held in float64; every limb product is < 2**42 and a plane sums at most
``3 * MAX_DEGREE`` of them, so BLAS computes each partial sum exactly.  The five
partial-sum planes (limb weight 2**0, 2**21, ..., 2**84) are then folded back
modulo p with integer arithmetic in numba.
"""
from __future__ import annotations

import numba
import numpy as np

MERSENNE61 = (1 << 61) - 1
LIMB_BITS = 21
N_LIMBS = 3
#: 3 * 512 * (2**21)**2 < 2**53 keeps every float partial sum exact
MAX_DEGREE = 512

_P = np.uint64(MERSENNE61)
_LIMB_MASK = np.uint64((1 << LIMB_BITS) - 1)
_U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)


@numba.njit(cache=True, inline="always")
def _fold(x):
    x = (x & _P) + (x >> np.uint64(61))
    x = (x & _P) + (x >> np.uint64(61))
    if x >= _P:
        x -= _P
    return x


@numba.njit(cache=True, inline="always")
def _plane_value(s0, s1, s2, s3, s4):
    # s_k < 2**53; weights 2**21, 2**42, 2**63 = 4, 2**84 = 2**23 (mod p)
    acc = s0
    acc += ((s1 & np.uint64((1 << 40) - 1)) << np.uint64(21)) + (s1 >> np.uint64(40))
    acc = (acc & _P) + (acc >> np.uint64(61))
    acc += ((s2 & np.uint64((1 << 19) - 1)) << np.uint64(42)) + (s2 >> np.uint64(19))
    acc = (acc & _P) + (acc >> np.uint64(61))
    acc += s3 << np.uint64(2)
    acc = (acc & _P) + (acc >> np.uint64(61))
    acc += ((s4 & np.uint64((1 << 38) - 1)) << np.uint64(23)) + (s4 >> np.uint64(38))
    return _fold(acc)


@numba.njit(cache=True)
def _planes_to_values(planes, out):
    n, _, w = planes.shape
    for j in range(n):
        for c in range(w):
            out[j, c] = _plane_value(
                np.uint64(planes[j, 0, c]), np.uint64(planes[j, 1, c]), np.uint64(planes[j, 2, c]),
                np.uint64(planes[j, 3, c]), np.uint64(planes[j, 4, c]),
            )


@numba.njit(cache=True)
def _argmin_update(planes, keys, best_h, best_key):
    # strict "<": the incumbent, then the earliest key, wins ties
    n, _, w = planes.shape
    for j in range(n):
        bh = best_h[j]
        bk = best_key[j]
        for c in range(w):
            v = _plane_value(
                np.uint64(planes[j, 0, c]), np.uint64(planes[j, 1, c]), np.uint64(planes[j, 2, c]),
                np.uint64(planes[j, 3, c]), np.uint64(planes[j, 4, c]),
            )
            if v < bh:
                bh = v
                bk = keys[c]
        best_h[j] = bh
        best_key[j] = bk


@numba.njit(cache=True)
def _mulmod(a, b):
    a_hi = a >> np.uint64(32)
    a_lo = a & np.uint64(0xFFFFFFFF)
    b_hi = b >> np.uint64(32)
    b_lo = b & np.uint64(0xFFFFFFFF)
    hh = a_hi * b_hi
    mid = a_hi * b_lo + a_lo * b_hi
    ll = a_lo * b_lo
    acc = (hh << np.uint64(3)) + (mid >> np.uint64(29)) + ((mid & np.uint64((1 << 29) - 1)) << np.uint64(32))
    acc = _fold(acc)
    acc += (ll & _P) + (ll >> np.uint64(61))
    return _fold(acc)


@numba.njit(cache=True)
def _vandermonde(keys, degree, out):
    for c in range(keys.shape[0]):
        x = keys[c]
        v = np.uint64(1)
        for i in range(degree):
            out[i, c] = v
            v = _mulmod(v, x)


def split_limbs(values: np.ndarray) -> list[np.ndarray]:
    return [((values >> np.uint64(LIMB_BITS * i)) & _LIMB_MASK).astype(np.float64) for i in range(N_LIMBS)]


def coefficient_limbs(coeffs: np.ndarray) -> np.ndarray:
    """``(n, degree)`` coefficients -> ``(n, 3*degree)`` float limb matrix."""
    return np.concatenate(split_limbs(coeffs), axis=1)


def key_operand(keys: np.ndarray, degree: int) -> np.ndarray:
    """Limb-expanded Vandermonde operand of shape ``(3*degree, 5*len(keys))``."""
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    vand = np.empty((degree, keys.shape[0]), dtype=np.uint64)
    _vandermonde(keys, degree, vand)
    vl = split_limbs(vand)
    k = keys.shape[0]
    big = np.zeros((N_LIMBS * degree, 5, k))
    for i in range(N_LIMBS):
        for m in range(N_LIMBS):
            big[i * degree:(i + 1) * degree, i + m, :] = vl[m]
    return big.reshape(N_LIMBS * degree, 5 * k)


def planes(coef_limbs: np.ndarray, operand: np.ndarray) -> np.ndarray:
    return (coef_limbs @ operand).reshape(coef_limbs.shape[0], 5, -1)


def values_from_planes(pl: np.ndarray) -> np.ndarray:
    out = np.empty((pl.shape[0], pl.shape[2]), dtype=np.uint64)
    _planes_to_values(pl, out)
    return out


def argmin_update(pl: np.ndarray, keys: np.ndarray, best_h: np.ndarray, best_key: np.ndarray) -> None:
    _argmin_update(pl, np.ascontiguousarray(keys, dtype=np.uint64), best_h, best_key)


INFINITY = _U64_MAX
