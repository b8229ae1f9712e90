"""Tabulation of cubic fields ordered by discriminant.

Enumerates exactly one canonically reduced form per GL2(Z) class of
irreducible primitive maximal binary cubic forms with 0 < +-disc <= X,
which is one row per cubic field up to isomorphism.  Provides the counting
functions N3(sign, X) and N3(sign, X; m, a), per-discriminant
multiplicities, an on-disk cache with incremental extension, and import /
cross-check against external field tables.

Coefficient ranges (X = bound on |disc|, canonical side b <= 0, a >= 1):

* disc < 0:  a <= (16X/27)^(1/4);  |b| <= 2a + (X/3)^(1/4);
  |c| <= 0.63*X^(1/3)/a^(1/3) + 1.25a + (X/3)^(1/4);  d confined by the
  reduction inequalities N1/N2 and by the disc window, a quadratic in d.
* disc > 0:  a <= 2*X^(1/4)/sqrt(27);  |b| <= 1.5a + X^(1/4);  the Hessian
  entry P = b^2 - 3ac lies in [1, sqrt(X)] which windows c, and
  |Q| = |bc - 9ad| <= P with P <= R = c^2 - 3bd windows d.

All bounds carry +2 slack; every candidate is re-checked exactly, so the
windows only need to cover.
"""

from __future__ import annotations

import csv
import json
import math
import os
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from . import forms
from .errors import CapacityError, DomainError, TableParseError
from .forms import CubicForm

SCHEMA_VERSION = 1
DEFAULT_CAPACITY = 10**8

_SCREEN_PRIMES = (7, 11, 13, 17, 19)
_root_tables: dict[int, np.ndarray] = {}


class FieldRecord(NamedTuple):
    disc: int
    form: CubicForm
    galois: bool


@dataclass(frozen=True)
class FieldTable:
    sign: str
    bound: int
    records: tuple[FieldRecord, ...]

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise DomainError(f"sign must be '+' or '-', got {self.sign!r}")

    @property
    def abs_discs(self) -> list[int]:
        return [abs(r.disc) for r in self.records]


def _check_sign(sign: str) -> str:
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    return sign


def _primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _root_table(p: int) -> np.ndarray:
    """Boolean table over forms mod p: has a projective zero mod p."""
    tab = _root_tables.get(p)
    if tab is not None:
        return tab
    a, b, c, d = np.indices((p, p, p, p), dtype=np.int64)
    has = a == 0  # the point (1 : 0)
    for t in range(p):
        has |= (((a * t + b) * t + c) * t + d) % p == 0
    tab = has.reshape(-1)
    _root_tables[p] = tab
    return tab


# ---------------------------------------------------------------------------
# Candidate generation
# ---------------------------------------------------------------------------


def _neg_a_max(x: int) -> int:
    return int((16 * x / 27) ** 0.25) + 1


def _pos_a_max(x: int) -> int:
    return int(2 * x**0.25 / 27**0.5) + 1


def _neg_candidates(lo: int, hi: int, a_values: Iterable[int]):
    """Raw reduced-candidate arrays for lo <= disc <= hi < 0.

    Yields (a, b, c, d_array) groups: canonical side (b < 0, or b = 0 and
    d < 0), reduction inequalities N1/N2/N3 enforced, disc in range.
    """
    x = -lo
    quarter = (x / 3) ** 0.25
    for a in a_values:
        b_max = int(2 * a + quarter) + 2
        c_max = int(0.63 * x ** (1 / 3) / a ** (1 / 3) + 1.25 * a + quarter) + 2
        a27 = 27 * a * a
        for b in range(-b_max, 1):
            s1, s2 = a - b, a + b
            t1_base, t2_base = s1 * s1, s2 * s2
            ab18 = 18 * a * b
            b3_4 = 4 * b**3
            bb = b * b
            for c in range(-c_max, c_max + 1):
                # d window from N1 (lower) and N2 (upper), both strict.
                t1 = t1_base + c * s1
                t2 = t2_base + c * s2
                d_lo = (-t1) // a + 1
                d_hi = -((-t2) // a) - 1
                if b == 0 and d_hi > -1:
                    d_hi = -1
                if d_lo > d_hi:
                    continue
                # disc(d) = -27a^2 d^2 + beta d + gamma.
                beta = ab18 * c - b3_4
                gamma = c * c * (bb - 4 * a * c)
                s1q = beta * beta + 4 * a27 * (gamma - lo)
                if s1q < 0:
                    continue
                rt = math.isqrt(s1q)
                d_lo = max(d_lo, (beta - rt) // (2 * a27) - 1)
                d_hi = min(d_hi, (beta + rt) // (2 * a27) + 2)
                if d_lo > d_hi:
                    continue
                s2q = beta * beta + 4 * a27 * (gamma - hi)
                segments = []
                if s2q >= 0:
                    # Conservative open middle where disc > hi; exact mask below.
                    rt2 = math.isqrt(s2q)
                    ex_lo = (beta - rt2) // (2 * a27) + 1
                    ex_hi = (beta + rt2) // (2 * a27) - 1
                    if ex_lo > ex_hi:
                        segments.append((d_lo, d_hi))
                    else:
                        if d_lo <= ex_lo - 1:
                            segments.append((d_lo, min(ex_lo - 1, d_hi)))
                        if ex_hi + 1 <= d_hi:
                            segments.append((max(ex_hi + 1, d_lo), d_hi))
                else:
                    segments.append((d_lo, d_hi))
                parts = [
                    np.arange(p_lo, p_hi + 1, dtype=np.int64)
                    for p_lo, p_hi in segments
                    if p_lo <= p_hi
                ]
                if not parts:
                    continue
                d = np.concatenate(parts) if len(parts) > 1 else parts[0]
                dd = (-a27 * d + beta) * d + gamma
                keep = (dd >= lo) & (dd <= hi)
                # N3 strict.
                keep &= (d - b) * d + (a * c - a * a) > 0
                if b == 0:
                    keep &= d < 0
                d = d[keep]
                if d.size:
                    yield a, b, c, d, dd[keep]


def _pos_candidates(lo: int, hi: int, a_values: Iterable[int]):
    """Raw weakly reduced candidate arrays for 0 < lo <= disc <= hi."""
    p_cap = math.isqrt(hi)
    quarter = hi**0.25
    for a in a_values:
        b_max = int(1.5 * a + quarter) + 2
        a9 = 9 * a
        for b in range(-b_max, 1):
            bb = b * b
            # P = b^2 - 3ac in [1, p_cap].
            c_lo = -((p_cap - bb) // (3 * a))
            c_hi = (bb - 1) // (3 * a)
            for c in range(c_lo, c_hi + 1):
                big_p = bb - 3 * a * c
                if big_p < 1 or big_p > p_cap:
                    continue
                bc = b * c
                d_lo = -((big_p - bc) // a9)
                d_hi = (bc + big_p) // a9
                r_max = (3 * hi + big_p * big_p) // (4 * big_p)
                cc = c * c
                if b == 0:
                    if cc < big_p or cc > r_max:
                        continue
                    d_hi = min(d_hi, -1)
                else:
                    # b < 0: R = c^2 - 3bd increasing in d.
                    d_lo = max(d_lo, -((cc - big_p) // (-3 * b)))
                    d_hi = min(d_hi, (r_max - cc) // (-3 * b))
                if d_lo > d_hi:
                    continue
                d = np.arange(d_lo, d_hi + 1, dtype=np.int64)
                q = bc - a9 * d
                r = cc - 3 * b * d
                dd = (4 * big_p * r - q * q) // 3
                keep = (
                    (dd >= lo)
                    & (dd <= hi)
                    & (np.abs(q) <= big_p)
                    & (r >= big_p)
                )
                if b == 0:
                    keep &= d < 0
                d = d[keep]
                if d.size:
                    yield a, b, c, d, dd[keep]


# ---------------------------------------------------------------------------
# Filtering pipeline
# ---------------------------------------------------------------------------


def _collect(groups) -> tuple[np.ndarray, ...]:
    a_parts, b_parts, c_parts, d_parts, disc_parts = [], [], [], [], []
    for a, b, c, d, dd in groups:
        n = d.size
        a_parts.append(np.full(n, a, dtype=np.int64))
        b_parts.append(np.full(n, b, dtype=np.int64))
        c_parts.append(np.full(n, c, dtype=np.int64))
        d_parts.append(d)
        disc_parts.append(dd)
    if not d_parts:
        z = np.empty(0, dtype=np.int64)
        return z, z, z, z, z
    return tuple(
        np.concatenate(parts)
        for parts in (a_parts, b_parts, c_parts, d_parts, disc_parts)
    )


def _screen_irreducible(A, B, C, D) -> np.ndarray:
    """False where the form provably has no rational zero (hence irreducible).

    True marks forms that still need the exact test.
    """
    undecided = np.ones(A.size, dtype=bool)
    for p in _SCREEN_PRIMES:
        tab = _root_table(p)
        idx = ((A % p * p + B % p) * p + C % p) * p + D % p
        undecided &= tab[idx]
        if not undecided.any():
            break
    return undecided


def _exact_irreducible(form: CubicForm) -> bool:
    return forms.is_irreducible(form)


def _postprocess(A, B, C, D, DISC, positive: bool) -> list[tuple[int, CubicForm]]:
    if A.size == 0:
        return []
    # Primitivity.
    g = np.gcd(np.gcd(A, B), np.gcd(C, D))
    keep = g == 1
    A, B, C, D, DISC = A[keep], B[keep], C[keep], D[keep], DISC[keep]
    if A.size == 0:
        return []
    # Irreducibility: mod-p screens, then the exact divisor test.
    needs_exact = _screen_irreducible(A, B, C, D)
    keep = np.ones(A.size, dtype=bool)
    for i in np.nonzero(needs_exact)[0]:
        if not _exact_irreducible(CubicForm(int(A[i]), int(B[i]), int(C[i]), int(D[i]))):
            keep[i] = False
    A, B, C, D, DISC = A[keep], B[keep], C[keep], D[keep], DISC[keep]
    if A.size == 0:
        return []
    # Boundary ties of the Hessian reduction (positive side only).
    if positive:
        P = B * B - 3 * A * C
        Q = B * C - 9 * A * D
        R = C * C - 3 * B * D
        tie = (np.abs(Q) == P) | (P == R)
        keep = np.ones(A.size, dtype=bool)
        for i in np.nonzero(tie)[0]:
            f = CubicForm(int(A[i]), int(B[i]), int(C[i]), int(D[i]))
            if not forms.pos_canonical_check(f):
                keep[i] = False
        A, B, C, D, DISC = A[keep], B[keep], C[keep], D[keep], DISC[keep]
        if A.size == 0:
            return []
    # Maximality at every prime whose square divides the discriminant.
    keep = np.ones(A.size, dtype=bool)
    absdisc = np.abs(DISC)
    for p in _primes_upto(math.isqrt(int(absdisc.max()))):
        p = int(p)
        hits = np.nonzero(absdisc % (p * p) == 0)[0]
        for i in hits:
            if not keep[i]:
                continue
            f = CubicForm(int(A[i]), int(B[i]), int(C[i]), int(D[i]))
            if not forms.is_p_maximal(f, p):
                keep[i] = False
    out = []
    for i in np.nonzero(keep)[0]:
        out.append(
            (
                int(DISC[i]),
                CubicForm(int(A[i]), int(B[i]), int(C[i]), int(D[i])),
            )
        )
    return out


def _enumerate_chunk(args) -> list[tuple[int, CubicForm]]:
    sign, lo_abs, hi_abs, a_values = args
    if sign == "-":
        groups = _neg_candidates(-hi_abs, -lo_abs, a_values)
        return _postprocess(*_collect(groups), positive=False)
    groups = _pos_candidates(max(lo_abs, 1), hi_abs, a_values)
    return _postprocess(*_collect(groups), positive=True)


def _enumerate_range(
    sign: str, lo_abs: int, hi_abs: int, workers: int = 1
) -> list[tuple[int, CubicForm]]:
    """All (disc, canonical form) with lo_abs <= |disc| <= hi_abs and the given sign."""
    _check_sign(sign)
    if hi_abs < 1 or lo_abs > hi_abs:
        return []
    a_max = _neg_a_max(hi_abs) if sign == "-" else _pos_a_max(hi_abs)
    a_all = list(range(1, a_max + 1))
    if workers <= 1 or len(a_all) < 2:
        pairs = _enumerate_chunk((sign, lo_abs, hi_abs, a_all))
    else:
        chunks = [
            (sign, lo_abs, hi_abs, a_all[w::workers]) for w in range(workers)
        ]
        chunks = [ch for ch in chunks if ch[3]]
        with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            pairs = []
            for part in pool.map(_enumerate_chunk, chunks):
                pairs.extend(part)
    pairs.sort(key=lambda t: (abs(t[0]), t[1]))
    return pairs


def _records_from_pairs(pairs: list[tuple[int, CubicForm]]) -> tuple[FieldRecord, ...]:
    out = []
    for d, f in pairs:
        galois = d > 0 and math.isqrt(d) ** 2 == d
        out.append(FieldRecord(d, f, galois))
    return tuple(out)


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def enumerate_fields(
    sign: str,
    bound: int,
    *,
    workers: int = 1,
    cache_dir: str | os.PathLike | None = None,
    capacity: int = DEFAULT_CAPACITY,
) -> FieldTable:
    """Field table for 0 < +-disc <= bound, one record per isomorphism class."""
    _check_sign(sign)
    if bound < 0:
        raise DomainError(f"bound must be nonnegative, got {bound}")
    if bound > capacity:
        raise CapacityError(
            f"bound {bound} exceeds capacity {capacity}; raise `capacity` "
            "explicitly if coefficient windows stay within 64-bit safety"
        )
    if cache_dir is not None:
        return _cached_enumerate(sign, bound, Path(cache_dir), workers)
    pairs = _enumerate_range(sign, 1, bound, workers=workers)
    return FieldTable(sign, bound, _records_from_pairs(pairs))


def count(sign: str, bound: int, *, table: FieldTable | None = None, **kw) -> int:
    """N3(sign, bound): number of cubic fields with 0 < +-disc <= bound."""
    table = _resolve_table(sign, bound, table, **kw)
    return bisect_right(table.abs_discs, bound)


def count_progression(
    sign: str,
    bound: int,
    modulus: int,
    residue: int,
    *,
    table: FieldTable | None = None,
    **kw,
) -> int:
    """N3(sign, bound; m, a): records with disc = residue (mod modulus).

    The signed discriminant enters the residue computation.
    """
    if modulus < 1:
        raise DomainError(f"modulus must be positive, got {modulus}")
    if not 0 <= residue < modulus:
        raise DomainError(f"residue {residue} out of range mod {modulus}")
    table = _resolve_table(sign, bound, table, **kw)
    n = bisect_right(table.abs_discs, bound)
    return sum(1 for r in table.records[:n] if r.disc % modulus == residue)


def multiplicity(delta: int, *, capacity: int = DEFAULT_CAPACITY, workers: int = 1) -> int:
    """Number of cubic-field isomorphism classes with discriminant exactly delta."""
    if delta == 0:
        raise DomainError("0 is not a discriminant")
    if abs(delta) > capacity:
        raise CapacityError(f"|{delta}| exceeds capacity {capacity}")
    sign = "+" if delta > 0 else "-"
    pairs = _enumerate_range(sign, abs(delta), abs(delta), workers=workers)
    return len(pairs)


def _resolve_table(sign, bound, table, **kw) -> FieldTable:
    if table is not None:
        if table.sign != sign or table.bound < bound:
            raise DomainError(
                f"table covers sign {table.sign} up to {table.bound}, "
                f"requested sign {sign} up to {bound}"
            )
        return table
    return enumerate_fields(sign, bound, **kw)


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get("CUBITAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "cubitab"


def _cache_path(cache_dir: Path, sign: str, bound: int) -> Path:
    tag = "pos" if sign == "+" else "neg"
    return cache_dir / f"fields_{tag}_{bound}_v{SCHEMA_VERSION}.jsonl"


def _cached_bounds(cache_dir: Path, sign: str) -> list[int]:
    tag = "pos" if sign == "+" else "neg"
    out = []
    if not cache_dir.is_dir():
        return out
    for p in cache_dir.glob(f"fields_{tag}_*_v{SCHEMA_VERSION}.jsonl"):
        try:
            out.append(int(p.stem.split("_")[2]))
        except (IndexError, ValueError):
            continue
    return sorted(out)


def write_table(table: FieldTable, path: str | os.PathLike, *, meta: bool = False) -> None:
    """JSON-lines table: {"disc": int, "form": [a,b,c,d]}, sorted, UTF-8.

    Cache files carry a schema header line (meta=True); the plain exchange
    format is one record object per line.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if meta:
            header = {
                "schema": SCHEMA_VERSION,
                "sign": table.sign,
                "bound": table.bound,
                "count": len(table.records),
            }
            fh.write(json.dumps(header, sort_keys=True) + "\n")
        for rec in table.records:
            fh.write(
                json.dumps(
                    {"disc": rec.disc, "form": list(rec.form)}, sort_keys=True
                )
                + "\n"
            )


def read_table(path: str | os.PathLike) -> FieldTable:
    path = Path(path)
    records = []
    sign, bound = None, None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TableParseError(f"{path}:{lineno}: {exc}", lineno) from exc
            if lineno == 1 and "schema" in obj:
                if obj["schema"] != SCHEMA_VERSION:
                    raise TableParseError(
                        f"{path}: schema {obj['schema']} != {SCHEMA_VERSION}", 1
                    )
                sign, bound = obj["sign"], int(obj["bound"])
                continue
            try:
                disc_v = int(obj["disc"])
                form = CubicForm(*(int(x) for x in obj["form"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise TableParseError(f"{path}:{lineno}: bad record {obj}", lineno) from exc
            galois = disc_v > 0 and math.isqrt(disc_v) ** 2 == disc_v
            records.append(FieldRecord(disc_v, form, galois))
    if sign is None:
        sign = "-" if records and records[0].disc < 0 else "+"
        bound = max((abs(r.disc) for r in records), default=0)
    return FieldTable(sign, bound, tuple(records))


def _cached_enumerate(sign: str, bound: int, cache_dir: Path, workers: int) -> FieldTable:
    exact = _cache_path(cache_dir, sign, bound)
    if exact.exists():
        table = read_table(exact)
        if table.sign == sign and table.bound == bound:
            return table
    smaller = [x for x in _cached_bounds(cache_dir, sign) if x <= bound]
    if smaller:
        base = read_table(_cache_path(cache_dir, sign, smaller[-1]))
        extension = _enumerate_range(sign, base.bound + 1, bound, workers=workers)
        pairs = [(r.disc, r.form) for r in base.records]
        pairs.extend(extension)
        pairs.sort(key=lambda t: (abs(t[0]), t[1]))
    else:
        pairs = _enumerate_range(sign, 1, bound, workers=workers)
    table = FieldTable(sign, bound, _records_from_pairs(pairs))
    write_table(table, exact, meta=True)
    return table


def cache_info(cache_dir: str | os.PathLike | None = None) -> list[dict]:
    cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
    out = []
    for sign in ("+", "-"):
        for bound in _cached_bounds(cache_dir, sign):
            p = _cache_path(cache_dir, sign, bound)
            out.append(
                {
                    "sign": sign,
                    "bound": bound,
                    "path": str(p),
                    "bytes": p.stat().st_size,
                }
            )
    return out


# ---------------------------------------------------------------------------
# Import and cross-check
# ---------------------------------------------------------------------------


def import_table(path: str | os.PathLike, fmt: str = "csv") -> FieldTable:
    """Read an external field table.

    CSV format: header "disc,a,b,c,d", one defining form (or homogenized
    defining polynomial) per row.  JSONL format: the native table format.
    """
    if fmt == "jsonl":
        return read_table(path)
    if fmt != "csv":
        raise DomainError(f"unknown import format {fmt!r}")
    path = Path(path)
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["disc", "a", "b", "c", "d"]:
            raise TableParseError(f"{path}:1: expected header disc,a,b,c,d", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                disc_v = int(row[0])
                form = CubicForm(*(int(x) for x in row[1:5]))
            except (IndexError, ValueError) as exc:
                raise TableParseError(f"{path}:{lineno}: bad row {row}", lineno) from exc
            galois = disc_v > 0 and math.isqrt(disc_v) ** 2 == disc_v
            records.append(FieldRecord(disc_v, form, galois))
    sign = "-" if records and records[0].disc < 0 else "+"
    bound = max((abs(r.disc) for r in records), default=0)
    return FieldTable(sign, bound, tuple(records))


@dataclass
class CrossCheckReport:
    missing: list[dict] = field(default_factory=list)
    extra: list[dict] = field(default_factory=list)
    multiplicity_mismatches: list[dict] = field(default_factory=list)
    invalid: list[dict] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not (
            self.missing or self.extra or self.multiplicity_mismatches or self.invalid
        )

    def to_dict(self) -> dict:
        return {
            "clean": self.clean,
            "missing": self.missing,
            "extra": self.extra,
            "multiplicity_mismatches": self.multiplicity_mismatches,
            "invalid": self.invalid,
        }


def cross_check(imported: FieldTable, computed: FieldTable) -> CrossCheckReport:
    """Compare an imported table against a computed one, class by class.

    Imported forms are canonicalized first, so any defining form per field
    is accepted; rows whose form discriminant disagrees with the stated
    discriminant are reported as invalid.
    """
    report = CrossCheckReport()

    def classes(table: FieldTable, canonicalize: bool) -> dict[int, set[CubicForm]]:
        by_disc: dict[int, set[CubicForm]] = {}
        for rec in table.records:
            f = rec.form
            if forms.disc(f) != rec.disc:
                report.invalid.append(
                    {"disc": rec.disc, "form": list(f), "reason": "form discriminant mismatch"}
                )
                continue
            if canonicalize:
                f = forms.reduce_form(f)
            by_disc.setdefault(rec.disc, set()).add(f)
        return by_disc

    imp = classes(imported, canonicalize=True)
    comp = classes(computed, canonicalize=False)
    for d in sorted(set(imp) | set(comp), key=abs):
        i_set, c_set = imp.get(d, set()), comp.get(d, set())
        if i_set == c_set:
            continue
        if len(i_set) != len(c_set):
            report.multiplicity_mismatches.append(
                {"disc": d, "imported": len(i_set), "computed": len(c_set)}
            )
        for f in sorted(c_set - i_set):
            report.missing.append({"disc": d, "form": list(f)})
        for f in sorted(i_set - c_set):
            report.extra.append({"disc": d, "form": list(f)})
    return report
