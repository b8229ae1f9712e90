"""Genus numbers and certified class number lower bounds.

The genus number of a cubic field is 3^(e-1) in the Galois case and 3^e
otherwise, where e counts distinct odd totally ramified primes p with
(d/p) = 1, and it divides the class number.  Everything here is a pure
function of the discriminant shape; no field data is needed: for odd
p | f, p != 3, the residue test p = 1 (mod 3) and the symbol test
(d/p) = 1 are equivalent on admissible shapes, and both are evaluated as
a consistency guard.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import kronecker
from .discshape import DiscShape, decompose, totally_ramified_primes
from .errors import DomainError, InternalInconsistencyError


@dataclass(frozen=True)
class GenusData:
    delta: int
    e: int
    galois: bool
    genus_number: int
    class_number_lower_bound: int

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "e": self.e,
            "galois": self.galois,
            "genus_number": self.genus_number,
            "class_number_lower_bound": self.class_number_lower_bound,
        }


def ramified_qr_count(shape: DiscShape) -> int:
    """e = number of distinct odd totally ramified primes with (d/p) = 1.

    p = 2 never contributes; p = 3 contributes iff (d/3) = 1.  For other p
    the symbol and the residue p = 1 (mod 3) are evaluated independently
    and must agree (a disagreement would violate the shape conditions).
    """
    if not shape.admissible:
        raise DomainError(
            f"{shape.delta} is not admissible ({shape.failure_reason})"
        )
    e = 0
    for p in sorted(totally_ramified_primes(shape)):
        if p == 2:
            continue
        if p == 3:
            if kronecker(shape.d, 3) == 1:
                e += 1
            continue
        symbol_test = kronecker(shape.d, p) == 1
        residue_test = p % 3 == 1
        if symbol_test != residue_test:
            raise InternalInconsistencyError(
                f"delta={shape.delta}, p={p}: (d/p)=1 is {symbol_test} but "
                f"p=1 (mod 3) is {residue_test}"
            )
        if symbol_test:
            e += 1
    return e


def genus_number(shape: DiscShape) -> GenusData:
    """Genus number 3^(e-1) (Galois) or 3^e (non-Galois) from the shape."""
    e = ramified_qr_count(shape)
    galois = shape.d == 1
    if galois:
        if e == 0:
            raise DomainError(
                f"delta={shape.delta}: Galois shape with e = 0 has no "
                "defined genus number"
            )
        g = 3 ** (e - 1)
    else:
        g = 3**e
    return GenusData(shape.delta, e, galois, g, g)


def class_number_lower_bound(delta: int) -> int:
    """Certified divisor of h(K) for every cubic field K of discriminant delta.

    The genus number divides the class number, so any such field satisfies
    h(K) >= this value, with the 3-part of h(K) divisible by it.  The
    bound never claims h(K) itself.
    """
    shape = decompose(delta)
    if not shape.admissible:
        raise DomainError(
            f"{delta} is not an admissible cubic discriminant "
            f"({shape.failure_reason})"
        )
    return genus_number(shape).genus_number
