"""Classification of integers as possible cubic field discriminants.

A cubic discriminant factors as d * f^2 * 9^w where d is a fundamental
discriminant (or 1), f is a squarefree positive integer coprime to 3,
w lies in {0, 1, 2}, and every prime p | f satisfies the residue
condition (d/p) = p (mod 3).  These conditions are necessary; the
classifier never asserts that a field exists.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import factorize, is_fundamental_discriminant, kronecker
from .errors import DomainError

CUBE_DIVISOR = "cube-divisor"
NON_SQUARE_SHAPE = "non-square-residue-shape"
SATZ6 = "satz6-condition"
THREE_ADIC = "three-adic"


@dataclass(frozen=True)
class DiscShape:
    delta: int
    d: int | None
    f: int | None
    w: int | None
    admissible: bool
    failure_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "d": self.d,
            "f": self.f,
            "w": self.w,
            "admissible": self.admissible,
            "failure_reason": self.failure_reason,
        }


def _inadmissible(delta: int, reason: str, d=None, f=None, w=None) -> DiscShape:
    return DiscShape(delta, d, f, w, False, reason)


def decompose(delta: int) -> DiscShape:
    """Decompose delta as d * f^2 * 9^w and check all shape conditions.

    Inadmissible inputs are classified, not rejected; the failure_reason
    names the first violated condition (cube divisor for p > 3, 2- or
    3-adic shape, or the per-prime residue condition on f).
    """
    if delta == 0:
        raise DomainError("0 is not a discriminant")
    fact = factorize(delta)
    for p, e in fact.factors:
        if p > 3 and e >= 3:
            return _inadmissible(delta, CUBE_DIVISOR)
    v3 = fact.exponent(3)
    if v3 >= 6:
        return _inadmissible(delta, THREE_ADIC)
    if delta % 4 in (2, 3):
        return _inadmissible(delta, NON_SQUARE_SHAPE)
    w, v3d = v3 // 2, v3 % 2

    d_odd = 3 if v3d else 1
    f_val = 1
    for p, e in fact.factors:
        if p <= 3:
            continue
        if e == 1:
            d_odd *= p
        else:  # e == 2
            f_val *= p
    v2 = fact.exponent(2)
    m_signed = fact.sign * d_odd
    if v2 == 0:
        d_val = m_signed
    elif v2 == 2:
        # Either d = 4m with f odd, or d odd with 2 | f; exactly one is
        # a fundamental-discriminant shape for odd m.
        if m_signed % 4 == 1:
            d_val = m_signed
            f_val *= 2
        else:
            d_val = 4 * m_signed
    elif v2 == 3:
        d_val = 8 * m_signed
    elif v2 == 4:
        d_val = 4 * m_signed
        f_val *= 2
    elif v2 == 5:
        d_val = 8 * m_signed
        f_val *= 2
    else:  # v2 == 1 or v2 > 5: no d * f^2 * 9^w splitting exists
        return _inadmissible(delta, NON_SQUARE_SHAPE)

    if not is_fundamental_discriminant(d_val):
        return _inadmissible(delta, NON_SQUARE_SHAPE, d=d_val, f=f_val, w=w)
    for p, _ in factorize(f_val).factors if f_val > 1 else ():
        if (kronecker(d_val, p) - p) % 3 != 0:
            return _inadmissible(delta, SATZ6, d=d_val, f=f_val, w=w)
    return DiscShape(delta, d_val, f_val, w, True)


def is_galois_disc(delta: int) -> bool:
    """True iff the (admissible) discriminant belongs to a Galois cubic: d = 1."""
    shape = decompose(delta)
    if not shape.admissible:
        raise DomainError(
            f"{delta} is not an admissible cubic discriminant ({shape.failure_reason})"
        )
    return shape.d == 1


def totally_ramified_primes(shape: DiscShape) -> set[int]:
    """Primes totally ramified in any cubic field of this discriminant.

    p != 3 is totally ramified iff p | f; p = 3 iff the 9^w part is present.
    """
    if not shape.admissible:
        raise DomainError(
            f"{shape.delta} is not admissible ({shape.failure_reason})"
        )
    out = {p for p, _ in factorize(shape.f).factors} if shape.f > 1 else set()
    if shape.w in (1, 2):
        out.add(3)
    return out
