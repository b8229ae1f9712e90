"""Integral binary cubic forms and their GL2(Z) class theory.

A form (a, b, c, d) stands for a*x^3 + b*x^2*y + c*x*y^2 + d*y^3.  The
group GL2(Z) acts by coordinate substitution followed by division by the
determinant; classes of irreducible primitive maximal forms correspond to
cubic fields up to isomorphism, with matching discriminants.

Canonical representatives:

* disc > 0: the Hessian (P, Q, R) = (b^2-3ac, bc-9ad, c^2-3bd) is positive
  definite.  A form is weakly reduced when |Q| <= P <= R.  Boundary ties
  (|Q| = P or P = R) leave a finite ambiguity set, closed under explicit
  moves below; the canonical form is the lexicographic minimum of the
  elements with a > 0 and (b < 0 or (b = 0 and d < 0)).

* disc < 0: F(t, 1) has a unique real root theta and a positive definite
  quadratic cofactor proportional to (a, a*theta+b, a*theta^2+b*theta+c).
  Reducedness of that cofactor amounts to three strict integer
  inequalities (theta is a cubic irrational, so no boundary cases):

      N1 = (a-b)^2 + c*(a-b) + a*d > 0
      N2 = (a+b)^2 + c*(a+b) - a*d > 0
      N3 = d^2 - b*d + a*c - a^2   > 0

  with a > 0.  The only remaining ambiguity is the mirror
  (a, b, c, d) <-> (a, -b, c, -d); the canonical form is the mirror with
  b < 0, or b = 0 and d < 0.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .arith import factorize
from .errors import CubitabError, DomainError


class CubicForm(NamedTuple):
    a: int
    b: int
    c: int
    d: int

    def __call__(self, x: int, y: int) -> int:
        return ((self.a * x + self.b * y) * x + self.c * y * y) * x + self.d * y**3

    def content(self) -> int:
        return math.gcd(math.gcd(self.a, self.b), math.gcd(self.c, self.d))


class UnimodularMap(NamedTuple):
    """Integer matrix [[p, q], [r, s]] with determinant +-1."""

    p: int
    q: int
    r: int
    s: int

    @property
    def det(self) -> int:
        return self.p * self.s - self.q * self.r


IDENTITY = UnimodularMap(1, 0, 0, 1)
SWAP = UnimodularMap(0, 1, 1, 0)
SHIFT = UnimodularMap(1, 1, 0, 1)  # x -> x + y
SHIFT_INV = UnimodularMap(1, -1, 0, 1)
INVERT = UnimodularMap(0, -1, 1, 0)


def disc(form: CubicForm) -> int:
    """Discriminant 18abcd + b^2c^2 - 4ac^3 - 4b^3d - 27a^2d^2."""
    a, b, c, d = form
    return (
        18 * a * b * c * d
        + b * b * c * c
        - 4 * a * c**3
        - 4 * b**3 * d
        - 27 * a * a * d * d
    )


def hessian(form: CubicForm) -> tuple[int, int, int]:
    """Hessian covariant (P, Q, R); satisfies Q^2 - 4PR = -3*disc."""
    a, b, c, d = form
    return b * b - 3 * a * c, b * c - 9 * a * d, c * c - 3 * b * d


def act(g: UnimodularMap, form: CubicForm) -> CubicForm:
    """Substitute (x, y) -> (px+qy, rx+sy), then divide by det(g)."""
    det = g.det
    if det not in (1, -1):
        raise DomainError(f"matrix {g} is not unimodular (det={det})")
    a, b, c, d = form
    p, q, r, s = g
    a2 = form(p, r)
    d2 = form(q, s)
    b2 = (
        3 * a * p * p * q
        + b * (p * p * s + 2 * p * q * r)
        + c * (2 * p * r * s + q * r * r)
        + 3 * d * r * r * s
    )
    c2 = (
        3 * a * p * q * q
        + b * (2 * p * q * s + q * q * r)
        + c * (p * s * s + 2 * q * r * s)
        + 3 * d * r * s * s
    )
    return CubicForm(a2 * det, b2 * det, c2 * det, d2 * det)


def _translate(form: CubicForm, k: int) -> CubicForm:
    # act([[1, k], [0, 1]], form), inlined: x -> x + k*y.
    a, b, c, d = form
    return CubicForm(
        a,
        3 * a * k + b,
        (3 * a * k + 2 * b) * k + c,
        ((a * k + b) * k + c) * k + d,
    )


def _swap(form: CubicForm) -> CubicForm:
    # Twisted image under [[0, 1], [1, 0]] (det -1).
    a, b, c, d = form
    return CubicForm(-d, -c, -b, -a)


def _invert(form: CubicForm) -> CubicForm:
    # Image under [[0, -1], [1, 0]] (det 1); sends the root theta to -1/theta.
    a, b, c, d = form
    return CubicForm(d, -c, b, -a)


def _mirror(form: CubicForm) -> CubicForm:
    # Sign-normalized twisted image of diag(1, -1).
    a, b, c, d = form
    return CubicForm(a, -b, c, -d)


def _neg(form: CubicForm) -> CubicForm:
    return CubicForm(-form.a, -form.b, -form.c, -form.d)


def _sign_normalize(form: CubicForm) -> CubicForm:
    return form if form.a > 0 else _neg(form)


def _divisors(n: int) -> list[int]:
    f = factorize(n)
    divs = [1]
    for p, e in f.factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return divs


def is_irreducible(form: CubicForm) -> bool:
    """True iff the form has no rational projective zero."""
    a, b, c, d = form
    if a == 0 or d == 0:
        return False
    # Rational root p/q of F(t, 1) needs q | a and p | d.
    for q in _divisors(abs(a)):
        for p in _divisors(abs(d)):
            if math.gcd(p, q) == 1:
                if form(p, q) == 0 or form(-p, q) == 0:
                    return False
    return True


# ---------------------------------------------------------------------------
# Maximality (ring of the form maximal at p)
# ---------------------------------------------------------------------------


def _poly_mod(u: list[int], v: list[int], p: int) -> list[int]:
    # Remainder of u by v in F_p[t]; coefficients lowest degree first.
    u = u[:]
    inv = pow(v[-1], -1, p)
    while len(u) >= len(v) and any(u):
        while u and u[-1] % p == 0:
            u.pop()
        if len(u) < len(v):
            break
        q = u[-1] * inv % p
        shift = len(u) - len(v)
        for i, coef in enumerate(v):
            u[shift + i] = (u[shift + i] - q * coef) % p
        u.pop()
    while u and u[-1] % p == 0:
        u.pop()
    return u


def _poly_gcd_mod(u: list[int], v: list[int], p: int) -> list[int]:
    u = [x % p for x in u]
    v = [x % p for x in v]
    while u and u[-1] == 0:
        u.pop()
    while v and v[-1] == 0:
        v.pop()
    while v:
        u, v = v, _poly_mod(u, v, p)
    return u


def _multiple_root_mod_p(form: CubicForm, p: int) -> tuple[int, int] | None:
    """Projective point where F mod p vanishes to order >= 2, or None.

    A binary cubic has at most one multiple point and it is always rational
    over the p-element field.  Small p: scan all p+1 points.  Large p: the
    finite multiple points are the roots of gcd(f, f') for f(t) = F(t, 1).
    """
    a, b, c, d = form
    if p <= 50:
        if a % p == 0 and b % p == 0:
            return (1, 0)
        for t in range(p):
            if form(t, 1) % p == 0 and ((3 * a * t + 2 * b) * t + c) % p == 0:
                return (t, 1)
        return None
    if a % p == 0 and b % p == 0:
        return (1, 0)
    g = _poly_gcd_mod([d, c, b, a], [c, 2 * b, 3 * a], p)
    if len(g) == 2:
        t = -g[0] * pow(g[1], -1, p) % p
    elif len(g) == 3:
        # Triple root: gcd is the square of the linear factor (p > 2).
        t = -g[1] * pow(2 * g[2], -1, p) % p
    else:
        return None
    if form(t, 1) % p == 0 and ((3 * a * t + 2 * b) * t + c) % p == 0:
        return (t, 1)
    return None


def is_p_maximal(form: CubicForm, p: int) -> bool:
    """Maximality of the form's cubic ring at the prime p.

    Automatic if p^2 does not divide the discriminant.  Otherwise the ring
    is non-maximal exactly when F mod p has a root (gamma : delta) of
    multiplicity at least two with p^2 | F(gamma, delta); at a multiple
    root the value mod p^2 does not depend on the chosen lift.  (Equivalent
    to Dedekind's criterion; cross-validated against it in the tests.)
    """
    if form.content() != 1:
        raise DomainError(f"form {tuple(form)} is not primitive")
    if disc(form) % (p * p) != 0:
        return True
    point = _multiple_root_mod_p(form, p)
    if point is None:
        return True
    gamma, delta = point
    return form(gamma, delta) % (p * p) != 0


# ---------------------------------------------------------------------------
# Reduction: positive discriminant
# ---------------------------------------------------------------------------


def _hessian_weakly_reduced(form: CubicForm) -> bool:
    P, Q, R = hessian(form)
    return abs(Q) <= P <= R


def _reduce_hessian(form: CubicForm) -> CubicForm:
    """Drive the positive definite Hessian into |Q| <= P <= R."""
    for _ in range(10000):
        P, Q, R = hessian(form)
        if P <= 0:
            raise CubitabError(f"Hessian of {tuple(form)} not positive definite")
        # Unique k with Q + 2kP in (-P, P].
        k = (P - Q) // (2 * P)
        if k:
            form = _translate(form, k)
            P, Q, R = hessian(form)
        if R < P:
            form = _swap(form)
            continue
        return form
    raise CubitabError("Hessian reduction failed to terminate")


def _closure_pos(form: CubicForm) -> set[CubicForm]:
    """All weakly reduced forms in the orbit, from one weakly reduced seed.

    The conditional moves (mirror always; swap when P = R; unit translation
    when |Q| = P) generate every transform between weakly reduced Hessians.
    """
    start = _sign_normalize(form)
    seen = {start, _mirror(start)}
    frontier = deque(seen)
    while frontier:
        g = frontier.popleft()
        P, Q, R = hessian(g)
        moves = []
        if P == R:
            moves.append(_swap(g))
        if Q == P:
            moves.append(_translate(g, -1))
        if Q == -P:
            moves.append(_translate(g, 1))
        for h in moves:
            h = _sign_normalize(h)
            for cand in (h, _mirror(h)):
                if cand not in seen:
                    seen.add(cand)
                    frontier.append(cand)
    return seen


def _canonical_from_set(candidates: Iterable[CubicForm]) -> CubicForm:
    picks = [
        g for g in candidates if g.b < 0 or (g.b == 0 and g.d < 0)
    ]
    return min(picks)


# ---------------------------------------------------------------------------
# Reduction: negative discriminant
# ---------------------------------------------------------------------------


def neg_reduced_conditions(a: int, b: int, c: int, d: int) -> bool:
    """Strict reduction inequalities for a > 0, disc < 0 (see module doc)."""
    if (a - b) ** 2 + c * (a - b) + a * d <= 0:
        return False
    if (a + b) ** 2 + c * (a + b) - a * d <= 0:
        return False
    return d * d - b * d + a * c - a * a > 0


def _root_interval(form: CubicForm) -> tuple[int, int, int]:
    """Isolating interval (lo, hi, den) for the unique real root, lo/den < theta < hi/den."""
    a, b, c, d = form
    bound = 1 + max(abs(b), abs(c), abs(d)) // a + 1
    lo, hi, den = -bound, bound, 1
    # Sign of F(t) is sign(t - theta) for a > 0 with one real root.
    for _ in range(6):
        lo, hi, den = 2 * lo, 2 * hi, 2 * den
        mid = (lo + hi) // 2
        v = a * mid**3 + b * mid * mid * den + c * mid * den * den + d * den**3
        if v == 0:
            raise DomainError("rational root: form is reducible")
        if v < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi, den


def _refine(form: CubicForm, lo: int, hi: int, den: int) -> tuple[int, int, int]:
    a, b, c, d = form
    lo, hi, den = 2 * lo, 2 * hi, 2 * den
    mid = (lo + hi) // 2
    v = a * mid**3 + b * mid * mid * den + c * mid * den * den + d * den**3
    if v == 0:
        raise DomainError("rational root: form is reducible")
    return (mid, hi, den) if v < 0 else (lo, mid, den)


def _translation_count(form: CubicForm) -> int:
    """Unique k with a*(theta - ... ) i.e. B + 2ka in (-a, a), B = a*theta + b."""
    a, b, _, _ = form
    lo, hi, den = _root_interval(form)
    for _ in range(20000):
        # U = (a - b - a*theta) / (2a); k = floor(U).  theta in (lo/den, hi/den).
        u_hi_num, u_lo_num = (a - b) * den - a * lo, (a - b) * den - a * hi
        f_lo = u_lo_num // (2 * a * den)
        f_hi = u_hi_num // (2 * a * den)
        if f_lo == f_hi:
            return f_lo
        lo, hi, den = _refine(form, lo, hi, den)
    raise CubitabError("failed to isolate translation count")


def _reduce_neg(form: CubicForm) -> CubicForm:
    form = _sign_normalize(form)
    for _ in range(10000):
        a, b, c, d = form
        n1 = (a - b) ** 2 + c * (a - b) + a * d
        n2 = (a + b) ** 2 + c * (a + b) - a * d
        if n1 <= 0 or n2 <= 0:
            k = _translation_count(form)
            if k == 0:
                raise CubitabError("translation stalled in reduction")
            form = _translate(form, k)
            continue
        if d * d - b * d + a * c - a * a > 0:
            return _canonical_from_set((form, _mirror(form)))
        form = _sign_normalize(_invert(form))
    raise CubitabError("negative-discriminant reduction failed to terminate")


def reduce_form(form: CubicForm) -> CubicForm:
    """Canonical representative of the GL2(Z) class of an irreducible form.

    Two irreducible forms are equivalent iff their canonical forms are
    equal; reduce_form is idempotent.
    """
    form = CubicForm(*form)
    if not is_irreducible(form):
        raise DomainError(f"form {tuple(form)} is reducible")
    if disc(form) > 0:
        seed = _reduce_hessian(_sign_normalize(form))
        return _canonical_from_set(_closure_pos(seed))
    return _reduce_neg(form)


def pos_canonical_check(form: CubicForm) -> bool:
    """For a weakly reduced disc > 0 form on the canonical side: is it THE canonical one?

    Only boundary ties (|Q| = P or P = R) can introduce competitors beyond
    the mirror, which the canonical side already excludes.
    """
    P, Q, R = hessian(form)
    if abs(Q) != P and P != R:
        return True
    return form == _canonical_from_set(_closure_pos(form))


# ---------------------------------------------------------------------------
# Orbit-closure oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitSearch:
    equivalent: bool
    saturated: bool
    visited: int


def orbit_search(
    form: CubicForm, target: CubicForm, box: int
) -> OrbitSearch:
    """Breadth-first closure of the orbit within a coefficient box.

    Moves: unit translations both ways and the determinant -1 swap, which
    together generate GL2(Z).  `equivalent=True` is a proof; False is proof
    only when the box never clipped a neighbor (saturated=False).
    """
    form, target = CubicForm(*form), CubicForm(*target)
    limit = max(abs(x) for x in form + target)
    if box < limit:
        raise DomainError(f"box {box} below maximum input coefficient {limit}")
    seen = {form}
    frontier = deque([form])
    saturated = False
    while frontier:
        g = frontier.popleft()
        if g == target:
            return OrbitSearch(True, saturated, len(seen))
        for h in (_translate(g, 1), _translate(g, -1), _swap(g)):
            if max(abs(x) for x in h) > box:
                saturated = True
                continue
            if h not in seen:
                seen.add(h)
                frontier.append(h)
    return OrbitSearch(target in seen, saturated, len(seen))


def orbit_equivalent(form: CubicForm, target: CubicForm, box: int) -> bool:
    """One-sided equivalence test; see orbit_search for the saturation caveat."""
    if disc(CubicForm(*form)) != disc(CubicForm(*target)):
        return False
    return orbit_search(form, target, box).equivalent
