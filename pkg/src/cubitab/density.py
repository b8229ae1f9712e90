"""Densities of cubic discriminants in arithmetic progressions.

C(m, a) is the natural density of cubic field discriminants in the class
a (mod m), multiplicative over the prime powers in m.  Local data is
available for primes p > 3 up to exponent 3 (no cubic discriminant is
divisible by p^3 for p > 3, so that is all of it):

    C(p,   a) = 1/(p (1 - p^-3))                     gcd(a, p) = 1
    C(p^2, a) = 1/(p^2 (1 - p^-3))                   v_p(a) <= 1
    C(p^3, a) = 1/(p^3 (1 - p^-3))                   v_p(a) = 0
    C(p^3, u p^2) = (1 + (-3u/p)) / (p^3 (1 - p^-3))
    C(p^3, 0) = 0
    C(p,   0) >= (p-1)/(p^2 (1 - p^-3))              (summing C(p^2, jp))

Everything is exact rational arithmetic; floats appear only at the
prediction boundary, where the main-term count is C(m, a) * S * X with
S = 1/(12 zeta(3)) for positive and 3/(12 zeta(3)) for negative
discriminants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .arith import factorize, kronecker
from .errors import DomainError, UnsupportedModulusError, ZeroDensityError
from .progression import ProgressionCertificate

COPRIME_641 = "coprime-6.41"
P2_LOCAL = "p2-local"
P3_LOCAL = "p3-local"
ZERO_CUBE = "zero-cube"
CLASS0_BOUND = "class0-bound"

EXACT = "exact"
LOWER_BOUND = "lower-bound"
ZERO = "zero"

mp.mp.dps = 40
ZETA3 = mp.zeta(3)
GAMMA_TWO_THIRDS = mp.gamma(mp.mpf(2) / 3)
C_PLUS = 1
C_MINUS = 3
K_PLUS = mp.mpf(1)
K_MINUS = mp.sqrt(3)
KAPPA_DEFAULT = 0.3193


@dataclass(frozen=True)
class DensityValue:
    value: Fraction
    kind: str
    provenance: tuple[tuple[int, int, str], ...]

    def __post_init__(self):
        if not 0 <= self.value <= 1:
            raise DomainError(f"density {self.value} outside [0, 1]")
        if self.kind == ZERO and self.value != 0:
            raise DomainError("zero kind with nonzero value")

    def to_dict(self) -> dict:
        return {
            "value": f"{self.value.numerator}/{self.value.denominator}"
            if self.value.denominator != 1
            else str(self.value.numerator),
            "decimal": mp.nstr(mp.mpf(self.value.numerator) / self.value.denominator, 10),
            "kind": self.kind,
            "provenance": [list(t) for t in self.provenance],
        }


def _euler_factor(p: int) -> Fraction:
    # 1/(1 - p^-3)
    return Fraction(p**3, p**3 - 1)


def local_density(p: int, r: int, a_class: int) -> DensityValue:
    """Local density of cubic discriminants in the class a (mod p^r), p > 3."""
    if p <= 3:
        raise UnsupportedModulusError(
            f"no local density data at p = {p} (only p > 3 is available)"
        )
    if r not in (1, 2, 3):
        raise UnsupportedModulusError(f"exponent {r} outside 1..3")
    a_class %= p**r
    euler = _euler_factor(p)
    if r == 1:
        if a_class % p != 0:
            return DensityValue(Fraction(1, p) * euler, EXACT, ((p, 1, COPRIME_641),))
        return DensityValue(
            Fraction(p - 1, p * p) * euler, LOWER_BOUND, ((p, 1, CLASS0_BOUND),)
        )
    if r == 2:
        if a_class % p != 0:
            return DensityValue(
                Fraction(1, p * p) * euler, EXACT, ((p, 2, COPRIME_641),)
            )
        if a_class % (p * p) != 0:
            return DensityValue(
                Fraction(1, p * p) * euler, EXACT, ((p, 2, P2_LOCAL),)
            )
        # v_p(a) >= 2: sum of the classes u p^2 (mod p^3) over u, plus the
        # zero class which contributes nothing.
        return DensityValue(
            Fraction(p - 1, p**3) * euler, LOWER_BOUND, ((p, 2, CLASS0_BOUND),)
        )
    # r == 3
    if a_class % p != 0:
        return DensityValue(Fraction(1, p**3) * euler, EXACT, ((p, 3, COPRIME_641),))
    if a_class % (p * p) != 0:
        raise UnsupportedModulusError(
            f"no local density data for v_p(a) = 1 at modulus p^3 (p = {p})"
        )
    if a_class % p**3 == 0:
        return DensityValue(Fraction(0), ZERO, ((p, 3, ZERO_CUBE),))
    u = a_class // (p * p)
    symbol = kronecker(-3 * u, p)
    value = Fraction(1 + symbol, p**3) * euler
    kind = ZERO if symbol == -1 else EXACT
    return DensityValue(value, kind, ((p, 3, P3_LOCAL),))


def density(m: int, a: int) -> DensityValue:
    """C(m, a) as a product of local densities; m must have all prime
    factors > 3 with exponents at most 3."""
    if m < 1:
        raise DomainError(f"modulus must be positive, got {m}")
    if m == 1:
        return DensityValue(Fraction(1), EXACT, ())
    value = Fraction(1)
    kind = EXACT
    provenance: list[tuple[int, int, str]] = []
    for p, r in factorize(m).factors:
        if p <= 3:
            raise UnsupportedModulusError(
                f"modulus {m} has prime factor {p} <= 3"
            )
        if r > 3:
            raise UnsupportedModulusError(
                f"modulus {m} has exponent {r} > 3 at p = {p}"
            )
        local = local_density(p, r, a % p**r)
        value *= local.value
        provenance.extend(local.provenance)
        if local.kind == ZERO:
            kind = ZERO
        elif local.kind == LOWER_BOUND and kind != ZERO:
            kind = LOWER_BOUND
    if kind == ZERO:
        value = Fraction(0)
    return DensityValue(value, kind, tuple(provenance))


def implied_class0_density(p: int) -> Fraction:
    """Complement mass of the zero class mod a prime p > 3:
    1 - (p-1) C(p, 1) = (p^2 - 1)/(p^3 - 1).

    Exposed as the implied complement only; the direct formulas give just
    the lower bound (p^2 - p)/(p^3 - 1)."""
    if p <= 3 or not factorize(p).factors == ((p, 1),):
        raise UnsupportedModulusError(f"{p} is not a prime > 3")
    return Fraction(p * p - 1, p**3 - 1)


def density_lower_bound(m: int, a: int, epsilon: Fraction) -> DensityValue:
    """Certified bound C(m, a) > (1/m) (1 - epsilon)^t, t = #{exponent-1 primes}.

    Requires prime factors > 3 with exponents at most 3 and every local
    density positive.  The size condition p > floor(1/eps) + 1 enters the
    bound only through the zero classes of exponent-1 primes (where the
    local mass is (p-1)/p of the coprime one), so it is enforced exactly
    there; elsewhere the per-prime mass already covers (1 - eps).
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    eps_floor = epsilon.denominator // epsilon.numerator
    bound = max(3, eps_floor + 1)
    t = 0
    provenance: list[tuple[int, int, str]] = []
    for p, r in factorize(m).factors:
        if r > 3:
            raise UnsupportedModulusError(f"exponent {r} > 3 at p = {p}")
        local = local_density(p, r, a % p**r)
        if local.kind == ZERO:
            raise ZeroDensityError(
                p, f"local density at {p}^{r} vanishes for a = {a}"
            )
        if r == 1:
            t += 1
            if a % p == 0 and p <= bound:
                raise DomainError(
                    f"zero class at prime {p} <= max(3, floor(1/eps)+1) = "
                    f"{bound}: the (p-1)/p mass cannot cover 1 - eps"
                )
        provenance.extend(local.provenance)
    value = Fraction(1, m) * (1 - epsilon) ** t
    return DensityValue(value, LOWER_BOUND, tuple(provenance))


@dataclass
class SettingDensityReport:
    entries: list[dict]

    @property
    def passed(self) -> bool:
        primes_ok = all(e.get("positive", False) for e in self.entries if "prime" in e)
        bounded = {e["i"] for e in self.entries if "bound" in e}
        columns = {e["i"] for e in self.entries if "i" in e}
        return primes_ok and bounded == columns

    @property
    def failures(self) -> list[dict]:
        return [e for e in self.entries if e.get("positive") is False]

    def bounds(self) -> dict[int, Fraction]:
        return {e["i"]: e["bound"] for e in self.entries if "bound" in e}

    def to_dict(self) -> dict:
        out = []
        for e in self.entries:
            e2 = dict(e)
            if isinstance(e2.get("bound"), Fraction):
                b = e2["bound"]
                e2["bound"] = f"{b.numerator}/{b.denominator}"
            out.append(e2)
        return {"passed": self.passed, "entries": out}


def setting_density_check(cert: ProgressionCertificate) -> SettingDensityReport:
    """Certify C(m, a+i) > (1-eps)/m for each column of a certificate.

    Follows the positivity argument: classes a+i are coprime to every
    q_h, p_hj with h != i (q_h | h-i is impossible since q_h > k); the
    column primes p_ij appear to valuation exactly 2, where positivity
    needs (-3 * cofactor / p_ij) = 1, guaranteed by the strengthened
    construction and violated by literal ones whenever (q_i / p_ij) = -1.
    The bound is then the exponent-1 estimate with t = 1 (only q_i
    divides a+i).
    """
    entries: list[dict] = []
    eps = cert.params.epsilon
    for i in range(1, cert.k + 1):
        target = cert.a + i
        ok = True
        for h in range(1, cert.k + 1):
            qh = cert.q[h - 1]
            if h != i:
                coprime = target % qh != 0
                entry = {
                    "i": i,
                    "prime": qh,
                    "role": f"q_{h}",
                    "check": "coprime",
                    "positive": coprime,
                }
                if coprime:
                    entry["reason"] = f"q_{h} | {h - i} impossible since q_{h} > k"
                entries.append(entry)
                ok &= coprime
            else:
                divides = target % qh == 0
                entries.append(
                    {
                        "i": i,
                        "prime": qh,
                        "role": f"q_{i}",
                        "check": "class-zero lower bound",
                        "positive": divides,
                    }
                )
                ok &= divides
            for j, phj in enumerate(cert.p[h - 1], start=1):
                if h != i:
                    coprime = target % phj != 0
                    entries.append(
                        {
                            "i": i,
                            "prime": phj,
                            "role": f"p_{h}{j}",
                            "check": "coprime",
                            "positive": coprime,
                        }
                    )
                    ok &= coprime
                else:
                    cof = cert.q[i - 1]
                    for jj, pij2 in enumerate(cert.p[i - 1], start=1):
                        if jj != j:
                            cof *= pij2 * pij2
                    symbol = kronecker(-3 * cof, phj)
                    q_symbol = kronecker(cert.q[i - 1], phj)
                    entries.append(
                        {
                            "i": i,
                            "prime": phj,
                            "role": f"p_{i}{j}",
                            "check": "valuation-2 local factor",
                            "legendre": symbol,
                            "kronecker_q_p": q_symbol,
                            "positive": symbol == 1,
                        }
                    )
                    ok &= symbol == 1
        if ok:
            entries.append({"i": i, "bound": (1 - eps) * Fraction(1, cert.m), "t": 1})
        else:
            entries.append({"i": i, "vanishing": True})
    return SettingDensityReport(entries)


# ---------------------------------------------------------------------------
# Predictions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PredictionInterval:
    lower: mp.mpf
    upper: mp.mpf | None


def _scale(sign: str, bound: int) -> mp.mpf:
    if sign == "+":
        return mp.mpf(bound) * C_PLUS / (12 * ZETA3)
    if sign == "-":
        return mp.mpf(bound) * C_MINUS / (12 * ZETA3)
    raise DomainError(f"sign must be '+' or '-', got {sign!r}")


def predict_count(sign: str, bound: int, m: int, a: int, *, class0: str = "refuse"):
    """Main-term prediction C(m, a) * C_sign * X / (12 zeta(3)).

    Main term only; the omitted secondary term is of order X^(5/6).  For
    classes with only a lower-bound density this refuses to give a point
    value and returns a PredictionInterval instead; `class0="implied"`
    substitutes the implied complement mass (p^2-1)/(p^3-1) for the zero
    class of a prime modulus.
    """
    d = density(m, a)
    scale = _scale(sign, bound)
    if d.kind == EXACT or d.kind == ZERO:
        return scale * d.value.numerator / d.value.denominator
    if class0 == "implied" and a % m == 0 and factorize(m).factors == ((m, 1),):
        mass = implied_class0_density(m)
        return scale * mass.numerator / mass.denominator
    upper = None
    if a % m == 0 and factorize(m).factors == ((m, 1),):
        mass = implied_class0_density(m)
        upper = scale * mass.numerator / mass.denominator
    return PredictionInterval(
        lower=scale * d.value.numerator / d.value.denominator, upper=upper
    )
