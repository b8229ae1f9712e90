"""Exact integer kernel: factorization, Kronecker symbol, CRT, prime search.

Everything here is pure and deterministic; all other modules build on it.
Integers are unbounded throughout (progression moduli reach 10^40).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CapacityError, DomainError

# Deterministic Miller-Rabin base set, valid for all n < 3.317e24
# (covers the full 64-bit range), see Sorenson-Webster.
_MR_BASES_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981
_MR_ROUNDS_LARGE = 64

_TRIAL_LIMIT = 10**6


def _miller_rabin_witness(a: int, d: int, r: int, n: int) -> bool:
    # True iff a proves n composite.
    a %= n
    if a <= 1:
        return False
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    """Primality test: deterministic below 3.3e24, else 64 fixed-seed MR rounds."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        bases = _MR_BASES_SMALL
    else:
        # Deterministic pseudo-random bases keyed to n for reproducibility.
        seed = n
        bases = []
        for _ in range(_MR_ROUNDS_LARGE):
            seed = (seed * 6364136223846793005 + 1442695040888963407) % 2**64
            bases.append(2 + seed % (n - 3))
    return not any(_miller_rabin_witness(a, d, r, n) for a in bases)


def _pollard_brent(n: int) -> int:
    """Nontrivial factor of composite odd n via Brent's cycle variant.

    Deterministic: the polynomial increment c walks 1, 2, 3, ... until a
    factor splits off (c = 1 already succeeds for almost all inputs).
    """
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, m = 2, 128
        g = q = r = 1
        x = ys = 0
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"pollard rho failed to split {n}")


def _factor_into(n: int, out: dict) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


@dataclass(frozen=True)
class Factorization:
    """Prime factorization sign * prod(p^e) with primes strictly increasing."""

    value: int
    factors: tuple[tuple[int, int], ...]
    sign: int

    def reconstruct(self) -> int:
        n = self.sign
        for p, e in self.factors:
            n *= p**e
        return n

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


def factorize(n: int) -> Factorization:
    """Factor a nonzero integer.

    Trial division up to 10^6, then Brent-Pollard rho with deterministic
    Miller-Rabin certification of the prime pieces.
    """
    if n == 0:
        raise DomainError("cannot factorize 0")
    sign = 1 if n > 0 else -1
    m = abs(n)
    acc: dict[int, int] = {}
    for p in (2, 3, 5):
        while m % p == 0:
            m //= p
            acc[p] = acc.get(p, 0) + 1
    # 2,3,5-wheel trial division.
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    w = 0
    while d <= _TRIAL_LIMIT and d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            acc[d] = e
        d += wheel[w]
        w = (w + 1) % 8
    if m > 1:
        if d * d > m:
            acc[m] = acc.get(m, 0) + 1
        else:
            _factor_into(m, acc)
    return Factorization(value=n, factors=tuple(sorted(acc.items())), sign=sign)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for all integers.

    Agrees with the Legendre symbol for odd prime n and is multiplicative
    in both arguments; (a/0) = 1 iff a = +-1, else 0.
    """
    if n == 0:
        return 1 if a in (1, -1) else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    # Strip 2s from n: (a/2) = 0, 1, -1 for a even, a = +-1 (8), a = +-3 (8).
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 == 1 and a % 8 in (3, 5):
        result = -result
    a %= n
    # Jacobi loop with reciprocity.
    while a != 0:
        v = 0
        while a % 2 == 0:
            a //= 2
            v += 1
        if v % 2 == 1 and n % 8 in (3, 5):
            result = -result
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a, n = n % a, a
    return result if n == 1 else 0


def crt(pairs: list[tuple[int, int]]) -> tuple[int, int]:
    """Solve x = r_i (mod m_i) for pairwise coprime moduli.

    Returns (a, m) with 0 <= a < m = prod(m_i).
    """
    if not pairs:
        raise DomainError("crt requires at least one congruence")
    for r, m in pairs:
        if m <= 1:
            raise DomainError(f"modulus {m} must exceed 1")
    mods = [m for _, m in pairs]
    for i in range(len(mods)):
        for j in range(i + 1, len(mods)):
            g = math.gcd(mods[i], mods[j])
            if g != 1:
                raise DomainError(
                    f"moduli {mods[i]} and {mods[j]} share factor {g}"
                )
    a, m = pairs[0][0] % pairs[0][1], pairs[0][1]
    for r, mod in pairs[1:]:
        inv = pow(m, -1, mod)
        t = (r - a) * inv % mod
        a += m * t
        m *= mod
    return a % m, m


def merge_congruences(pairs: list[tuple[int, int]]) -> tuple[int, int]:
    """Solve a general congruence system, moduli not necessarily coprime.

    Returns (a, m) with m = lcm of moduli; raises DomainError if unsolvable.
    """
    if not pairs:
        raise DomainError("empty congruence system")
    a, m = pairs[0][0] % pairs[0][1], pairs[0][1]
    for r, mod in pairs[1:]:
        g = math.gcd(m, mod)
        if (r - a) % g != 0:
            raise DomainError(
                f"congruences x={a} (mod {m}) and x={r} (mod {mod}) conflict"
            )
        lcm = m // g * mod
        t = (r - a) // g * pow(m // g, -1, mod // g) % (mod // g)
        a = (a + m * t) % lcm
        m = lcm
    return a, m


def find_prime(
    minimum: int,
    congruences: list[tuple[int, int]] | None = None,
    excluded: set[int] | frozenset[int] = frozenset(),
    step_cap: int = 10**7,
) -> int:
    """Smallest prime >= minimum satisfying all congruences, not excluded.

    The congruence system must be solvable with combined residue coprime to
    the combined modulus (Dirichlet guarantees termination); a step cap
    turns runaway searches into a hard error.
    """
    if congruences:
        r, m = merge_congruences(congruences)
        if math.gcd(r, m) != 1:
            # The class contains at most one prime: gcd(r, m) itself.
            g = math.gcd(r, m)
            if is_prime(g) and g % m == r % m and g >= minimum and g not in excluded:
                return g
            raise DomainError(
                f"residue {r} not coprime to modulus {m}: no prime search possible"
            )
    else:
        r, m = 0, 1
    lo = max(minimum, 2)
    if m == 1:
        candidate = lo
    else:
        candidate = lo + (r - lo) % m
    steps = 0
    while steps < step_cap:
        if candidate >= lo and candidate not in excluded and is_prime(candidate):
            return candidate
        candidate += m if m > 1 else 1
        steps += 1
    raise CapacityError(
        f"prime search from {minimum} with congruences {congruences} "
        f"exceeded {step_cap} steps"
    )


def squarefree_kernel(n: int) -> int:
    """Product of primes dividing n to odd order, with sign of n."""
    f = factorize(n)
    k = f.sign
    for p, e in f.factors:
        if e % 2 == 1:
            k *= p
    return k


def is_fundamental_discriminant(d: int) -> bool:
    """True iff d = 1, d = 1 (mod 4) squarefree, or d = 4m, m = 2,3 (mod 4) squarefree."""
    if d == 1:
        return True
    if d == 0:
        return False
    if d % 4 == 1:
        return squarefree_kernel(d) == d
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and squarefree_kernel(m) == m
    return False


def isqrt_exact(n: int) -> int | None:
    """Integer square root if n is a perfect square, else None."""
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None
