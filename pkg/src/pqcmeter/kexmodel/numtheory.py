"""Primality, quadratic residuosity and polynomial irreducibility over GF(q)."""

from __future__ import annotations

import math
import random

import numpy as np

SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)
MR_ROUNDS = 64
MR_SEED = 0x5EED


def miller_rabin(n: int, rounds: int = MR_ROUNDS, seed: int = MR_SEED) -> bool:
    """Probabilistic Miller-Rabin with ``rounds`` witnesses drawn from a seeded PRNG."""
    if n < 2:
        return False
    for p in SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(seed ^ n.bit_length())
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError("Jacobi symbol needs a positive odd modulus")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def strong_lucas(n: int) -> bool:
    """Strong Lucas probable-prime test with Selfridge parameter selection."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if _is_square(n):
        return False
    D = 5
    while True:
        j = jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = (n + 1) // 2
    # binary Lucas chain for U_d, V_d, Q^d
    U, V, Qk = 0, 2, 1
    for bit in bin(d)[2:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin (64 seeded witnesses) combined with a strong Lucas test."""
    if n < 2:
        return False
    if n in SMALL_PRIMES:
        return True
    return miller_rabin(n) and strong_lucas(n)


def euler_criterion(a: int, p: int) -> int:
    """a^((p-1)/2) mod p: 1 for a nonzero square, p-1 for a non-square, 0 when p | a."""
    return pow(a % p, (p - 1) // 2, p)


# --- GF(q)[x] / (x^p - x - 1) -------------------------------------------------------

def _mulmod_trinomial(a: np.ndarray, b: np.ndarray, p: int, q: int) -> np.ndarray:
    c = np.convolve(a, b)
    hi = c[p:]
    lo = c[:p].copy()
    # x^p = x + 1
    lo[:len(hi)] += hi
    lo[1:len(hi) + 1] += hi
    return lo % q


def _pow_q(g: np.ndarray, p: int, q: int) -> np.ndarray:
    r = g
    for bit in bin(q)[3:]:
        r = _mulmod_trinomial(r, r, p, q)
        if bit == "1":
            r = _mulmod_trinomial(r, g, p, q)
    return r


def trinomial_irreducible(p: int, q: int) -> bool:
    """Irreducibility of x^p - x - 1 over GF(q), for prime p and prime q.

    x^(q^p) = x modulo f means f is squarefree with factors of degree 1 or p.
    A reducible f of prime degree p would then split into distinct linear
    factors, giving x^q = x; so the second power check rules that out.
    """
    if not is_probable_prime(p):
        raise ValueError("the shortcut test needs a prime degree")
    if not is_probable_prime(q):
        raise ValueError("coefficients must live in a prime field")
    # convolution terms plus the two folds of x^p = x + 1
    if 3 * p * (q - 1) ** 2 >= 2 ** 63:
        raise OverflowError("coefficients would overflow int64 convolution")
    x = np.zeros(p, dtype=np.int64)
    x[1] = 1
    g = _pow_q(x, p, q)
    if np.array_equal(g, x):
        return False
    for _ in range(p - 1):
        g = _pow_q(g, p, q)
    return bool(np.array_equal(g, x))
