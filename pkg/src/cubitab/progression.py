"""Construction and verification of class-number-forcing progressions.

Given a sign, a margin 0 < epsilon < 1, and positive integers k and H,
the construction picks primes q_1 < ... < q_k (q_i = 1 mod 4, larger
than max(k, floor(1/epsilon) + 1)) and a k x n matrix of further primes
p_ij (p_ij = 1 mod 12, p_ij >= k, all pairwise distinct) with
n = ceil(log H / log 3) + 2, and solves

    a = q_i * (prod_j p_ij)^2 - i   (mod  q_i * prod_j p_ij^3)

for all i by CRT, with m the product of all q_i and p_ij^3.  Any cubic
field whose discriminant falls in the class a + i (mod m) then has all
p_ij totally ramified, forcing genus number (hence class number) > H.

The optional strengthening additionally requires (q_i / p_ij) = 1 during
the p-scan, which keeps the local density of class a + i at every p_ij
positive; the literal construction is kept for fidelity experiments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .arith import crt, is_prime, kronecker
from .discshape import decompose
from .errors import CapacityError, DomainError, InternalInconsistencyError
from .genus import genus_number, ramified_qr_count

_SCAN_CAP = 10**7


@dataclass(frozen=True)
class SettingParams:
    sign: str
    epsilon: Fraction
    k: int
    H: int

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise DomainError(f"sign must be '+' or '-', got {self.sign!r}")
        eps = Fraction(self.epsilon)
        if not 0 < eps < 1:
            raise DomainError(f"epsilon must lie in (0, 1), got {eps}")
        object.__setattr__(self, "epsilon", eps)
        if self.k < 1 or self.H < 1:
            raise DomainError("k and H must be positive")


@dataclass(frozen=True)
class ProgressionCertificate:
    params: SettingParams
    n: int
    q: tuple[int, ...]
    p: tuple[tuple[int, ...], ...]
    m: int
    a: int
    strengthened_qr: bool

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def H(self) -> int:
        return self.params.H

    def row_modulus(self, i: int) -> int:
        prod = 1
        for pj in self.p[i - 1]:
            prod *= pj**3
        return self.q[i - 1] * prod

    def row_residue(self, i: int) -> int:
        prod = 1
        for pj in self.p[i - 1]:
            prod *= pj
        return self.q[i - 1] * prod * prod - i

    def to_json(self) -> str:
        """Canonical serialization; round-trips byte-identically."""
        payload = {
            "sign": self.params.sign,
            "epsilon": f"{self.params.epsilon.numerator}/{self.params.epsilon.denominator}",
            "k": self.params.k,
            "H": self.params.H,
            "n": self.n,
            "q": list(self.q),
            "p": [list(row) for row in self.p],
            "m": self.m,
            "a": self.a,
            "strengthened_qr": self.strengthened_qr,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ProgressionCertificate":
        obj = json.loads(text)
        params = SettingParams(
            sign=obj["sign"],
            epsilon=Fraction(obj["epsilon"]),
            k=int(obj["k"]),
            H=int(obj["H"]),
        )
        return cls(
            params=params,
            n=int(obj["n"]),
            q=tuple(int(x) for x in obj["q"]),
            p=tuple(tuple(int(x) for x in row) for row in obj["p"]),
            m=int(obj["m"]),
            a=int(obj["a"]),
            strengthened_qr=bool(obj["strengthened_qr"]),
        )


def ceil_log3(h: int) -> int:
    """Smallest t with 3^t >= h, in exact arithmetic (= ceil(log h / log 3))."""
    if h < 1:
        raise DomainError("argument must be positive")
    t, power = 0, 1
    while power < h:
        power *= 3
        t += 1
    return t


def _scan_prime(minimum, residue, modulus, excluded, condition=None):
    candidate = max(minimum, 2)
    candidate += (residue - candidate) % modulus
    for _ in range(_SCAN_CAP):
        if (
            candidate not in excluded
            and is_prime(candidate)
            and (condition is None or condition(candidate))
        ):
            return candidate
        candidate += modulus
    raise CapacityError(f"prime scan from {minimum} mod {modulus} exhausted")


def construct_setting(
    params: SettingParams, strengthen_qr: bool = True
) -> ProgressionCertificate:
    """Build the certificate with the smallest qualifying primes.

    Deterministic: q_1 < ... < q_k chosen first, then p_ij row-major, each
    the smallest prime satisfying its congruence, distinctness, and (when
    strengthening) the symbol condition (q_i / p_ij) = 1.
    """
    n = ceil_log3(params.H) + 2
    eps_floor = params.epsilon.denominator // params.epsilon.numerator
    q_min = max(params.k, eps_floor + 1) + 1
    used: set[int] = set()
    q = []
    for _ in range(params.k):
        qi = _scan_prime(q_min, 1, 4, used)
        q.append(qi)
        used.add(qi)
    p_rows = []
    for i in range(params.k):
        row = []
        for _ in range(n):
            cond = None
            if strengthen_qr:
                qi = q[i]
                cond = lambda cand, qi=qi: kronecker(qi, cand) == 1
            pij = _scan_prime(max(params.k, 2), 1, 12, used, cond)
            row.append(pij)
            used.add(pij)
        p_rows.append(tuple(row))
    m = 1
    for qi in q:
        m *= qi
    for row in p_rows:
        for pij in row:
            m *= pij**3
    pairs = []
    for i in range(1, params.k + 1):
        prod = 1
        for pij in p_rows[i - 1]:
            prod *= pij
        mod_i = q[i - 1] * prod**3
        res_i = (q[i - 1] * prod * prod - i) % mod_i
        pairs.append((res_i, mod_i))
    a, m_crt = crt(pairs)
    if m_crt != m:
        raise InternalInconsistencyError("CRT modulus disagrees with product")
    return ProgressionCertificate(
        params=params,
        n=n,
        q=tuple(q),
        p=tuple(p_rows),
        m=m,
        a=a,
        strengthened_qr=strengthen_qr,
    )


@dataclass
class CheckReport:
    checks: list[tuple[str, bool, str]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list[tuple[str, str]]:
        return [(name, detail) for name, ok, detail in self.checks if not ok]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": name, "passed": ok, "detail": detail}
                for name, ok, detail in self.checks
            ],
        }


def verify_certificate(cert: ProgressionCertificate) -> CheckReport:
    """Independently recheck every certificate invariant; failures are entries."""
    params = cert.params
    checks: list[tuple[str, bool, str]] = []

    def add(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    add("n-formula", cert.n == ceil_log3(params.H) + 2, f"n={cert.n}")
    eps_floor = params.epsilon.denominator // params.epsilon.numerator
    q_bound = max(params.k, eps_floor + 1)
    for i, qi in enumerate(cert.q, start=1):
        add(f"q{i}-prime", is_prime(qi), str(qi))
        add(f"q{i}-mod4", qi % 4 == 1, f"{qi} % 4 = {qi % 4}")
        add(f"q{i}-size", qi > q_bound, f"{qi} > max(k, floor(1/eps)+1) = {q_bound}")
        add(
            f"q{i}-eps-margin",
            Fraction(qi - 1, qi) > 1 - params.epsilon,
            f"(q-1)/q = {Fraction(qi - 1, qi)}",
        )
    for i, row in enumerate(cert.p, start=1):
        for j, pij in enumerate(row, start=1):
            add(f"p{i}{j}-prime", is_prime(pij), str(pij))
            add(f"p{i}{j}-mod12", pij % 12 == 1, f"{pij} % 12 = {pij % 12}")
            add(f"p{i}{j}-size", pij >= params.k, f"{pij} >= k = {params.k}")
            if cert.strengthened_qr:
                sym = kronecker(cert.q[i - 1], pij)
                add(f"p{i}{j}-qr-strengthened", sym == 1, f"({cert.q[i-1]}/{pij}) = {sym}")
    all_primes = list(cert.q) + [pij for row in cert.p for pij in row]
    add(
        "pairwise-distinct",
        len(set(all_primes)) == len(all_primes),
        f"{len(all_primes)} primes",
    )
    add("row-count", len(cert.q) == params.k and len(cert.p) == params.k, "")
    add("column-count", all(len(row) == cert.n for row in cert.p), "")
    m = 1
    for qi in cert.q:
        m *= qi
    for row in cert.p:
        for pij in row:
            m *= pij**3
    add("m-product", m == cert.m, f"m = {cert.m}")
    add("a-range", 0 <= cert.a < cert.m, f"a = {cert.a}")
    for i in range(1, params.k + 1):
        mod_i = cert.row_modulus(i)
        res_i = cert.row_residue(i) % mod_i
        add(
            f"crt-residue-{i}",
            cert.a % mod_i == res_i,
            f"a mod {mod_i} = {cert.a % mod_i}, expected {res_i}",
        )
        for j, pij in enumerate(cert.p[i - 1], start=1):
            add(
                f"cube-nondivisibility-{i}{j}",
                (cert.a + i) % pij**3 != 0,
                f"p = {pij}",
            )
    return CheckReport(checks)


@dataclass(frozen=True)
class GuaranteeProof:
    delta: int
    i: int
    vacuous: bool
    valuations: tuple[tuple[int, int], ...]
    e: int | None
    genus: int | None
    certified_bound: int
    H: int

    @property
    def holds(self) -> bool:
        return self.vacuous or (
            self.genus is not None
            and self.genus >= self.certified_bound > self.H
        )

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "i": self.i,
            "vacuous": self.vacuous,
            "valuations": [list(v) for v in self.valuations],
            "e": self.e,
            "genus_number": self.genus,
            "certified_bound": self.certified_bound,
            "H": self.H,
            "holds": self.holds,
        }


def guarantee_check(
    cert: ProgressionCertificate, delta: int, i: int
) -> GuaranteeProof:
    """Realize the class-number guarantee on one discriminant in class a + i.

    Records the valuation v_p(delta) = 2 at every p_ij (totally ramified),
    the residue p_ij = 1 (mod 3) forcing (d/p_ij) = 1, e >= n, and the
    certified bound 3^(n-1) > H.  Inadmissible delta is vacuous (no field
    exists), not an error.
    """
    if not 1 <= i <= cert.k:
        raise DomainError(f"column index {i} outside 1..{cert.k}")
    if delta % cert.m != (cert.a + i) % cert.m:
        raise DomainError(
            f"delta = {delta} is not in the class a+{i} (mod m)"
        )
    bound = 3 ** (cert.n - 1)
    shape = decompose(delta)
    if not shape.admissible:
        return GuaranteeProof(
            delta, i, True, (), None, None, bound, cert.H
        )
    vals = []
    for pij in cert.p[i - 1]:
        v = 0
        x = delta
        while x % pij == 0:
            x //= pij
            v += 1
        vals.append((pij, v))
        if v != 2:
            raise InternalInconsistencyError(
                f"v_{pij}({delta}) = {v}, expected exactly 2 from the congruence"
            )
        if pij % 3 != 1:
            raise InternalInconsistencyError(f"p = {pij} not 1 mod 3")
        if kronecker(shape.d, pij) != 1:
            raise InternalInconsistencyError(
                f"(d/{pij}) != 1 for d = {shape.d}, contradicting total "
                "ramification with p = 1 (mod 3)"
            )
    e = ramified_qr_count(shape)
    if e < cert.n:
        raise InternalInconsistencyError(
            f"e = {e} < n = {cert.n} despite {cert.n} forced ramified primes"
        )
    g = genus_number(shape).genus_number
    if not g >= bound > cert.H:
        raise InternalInconsistencyError(
            f"genus {g} fails the certified bound {bound} > H = {cert.H}"
        )
    return GuaranteeProof(delta, i, False, tuple(vals), e, g, bound, cert.H)
