"""Maier matrix experiments over arithmetic progressions of discriminants.

The matrix has rows t = 0..X and columns i = 1..k holding the integers
a + t*m + i; a cell is a good entry when sign * (a + t*m + i) is a cubic
discriminant, and a row is good when it contains more than delta*k*m
cubic fields (counted with multiplicity, strict inequality).

Full progression certificates have m around 10^12 or larger, far beyond
enumeration capacity; the pipeline is meant for toy-scale parameters,
where the genus guarantee is checked on every field actually found,
which is exactly what the certificate promises per class.
"""

from __future__ import annotations

import csv
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import CapacityError, InternalInconsistencyError
from .genus import class_number_lower_bound
from .progression import ProgressionCertificate
from .tabulate import DEFAULT_CAPACITY, FieldTable, enumerate_fields
from .density import KAPPA_DEFAULT


@dataclass
class MaierReport:
    sign: str
    a: int
    m: int
    k: int
    rows: int
    delta: Fraction
    multiplicities: list[list[int]]
    good_entries: list[list[bool]]
    per_row_field_count: list[int]
    good_rows: list[int]
    column_sums: list[int]
    exponent_reference: float | None = None
    kappa: float = KAPPA_DEFAULT
    epsilon: float | None = None
    c: float = 1.0

    @property
    def G(self) -> int:
        return len(self.good_rows)

    @property
    def total_fields(self) -> int:
        return sum(self.per_row_field_count)

    def entry(self, t: int, i: int) -> int:
        return self.a + t * self.m + i

    def to_dict(self) -> dict:
        return {
            "sign": self.sign,
            "a": self.a,
            "m": self.m,
            "k": self.k,
            "rows": self.rows,
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
            "good_row_threshold": f"{self.delta * self.k * self.m}",
            "per_row_field_count": self.per_row_field_count,
            "good_rows": self.good_rows,
            "G": self.G,
            "column_sums": self.column_sums,
            "total_fields": self.total_fields,
            "exponent_reference": self.exponent_reference,
            "kappa": self.kappa,
            "multiplicities": self.multiplicities,
        }

    def write_csv(self, path: str | os.PathLike) -> None:
        """Matrix dump: rows t, columns i, values = multiplicities."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"i{i}" for i in range(1, self.k + 1)])
            for t, row in enumerate(self.multiplicities):
                writer.writerow([t] + row)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def build_matrix(
    sign: str,
    a: int,
    m: int,
    k: int,
    rows: int,
    delta: Fraction = Fraction(0),
    *,
    table: FieldTable | None = None,
    capacity: int = DEFAULT_CAPACITY,
    workers: int = 1,
    kappa: float = KAPPA_DEFAULT,
    epsilon: float | None = None,
    c: float = 1.0,
) -> MaierReport:
    """Fill the matrix of per-cell field multiplicities for a progression."""
    delta = Fraction(delta)
    top = a + rows * m + k
    if top > capacity:
        raise CapacityError(
            f"largest entry {top} exceeds capacity {capacity}; use toy "
            "parameters (smaller a, m, or rows)"
        )
    if table is None:
        table = enumerate_fields(sign, top, workers=workers)
    elif table.sign != sign or table.bound < top:
        raise CapacityError(
            f"supplied table (sign {table.sign}, bound {table.bound}) does "
            f"not cover sign {sign} up to {top}"
        )
    counts = Counter(abs(r.disc) for r in table.records)
    mult = []
    good = []
    row_totals = []
    for t in range(rows + 1):
        row = [counts.get(a + t * m + i, 0) for i in range(1, k + 1)]
        mult.append(row)
        good.append([x >= 1 for x in row])
        row_totals.append(sum(row))
    threshold = delta * k * m
    good_rows = [t for t, total in enumerate(row_totals) if total > threshold]
    col_sums = [sum(mult[t][i] for t in range(rows + 1)) for i in range(k)]
    exponent_reference = None
    if epsilon is not None and rows > 0:
        exponent_reference = float(c) * float(delta) * rows ** (1 - kappa - epsilon)
    return MaierReport(
        sign=sign,
        a=a,
        m=m,
        k=k,
        rows=rows,
        delta=delta,
        multiplicities=mult,
        good_entries=good,
        per_row_field_count=row_totals,
        good_rows=good_rows,
        column_sums=col_sums,
        exponent_reference=exponent_reference,
        kappa=kappa,
        epsilon=epsilon,
        c=c,
    )


@dataclass
class PipelineReport:
    matrix: MaierReport
    guarantee_checked: int
    guarantee_violations: list[dict]
    half_k_rows: list[int]
    vacuous_columns: list[int]
    fields_found: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.guarantee_violations

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "guarantee_checked": self.guarantee_checked,
            "guarantee_violations": self.guarantee_violations,
            "half_k_rows": self.half_k_rows,
            "vacuous_columns": self.vacuous_columns,
            "fields_found": self.fields_found,
            "matrix": self.matrix.to_dict(),
        }


def pipeline_check(
    cert: ProgressionCertificate,
    rows: int,
    *,
    delta: Fraction | None = None,
    table: FieldTable | None = None,
    capacity: int = DEFAULT_CAPACITY,
    workers: int = 1,
    kappa: float = KAPPA_DEFAULT,
    c: float = 1.0,
) -> PipelineReport:
    """Run the full certified-progression experiment at toy scale.

    Every field discovered in any cell must satisfy the genus-certified
    class number bound > H; a violation is a hard failure (it would
    falsify the certificate logic or the tabulation).  Rows holding at
    least k/2 fields are reported, and the count of good rows is compared
    informationally against c * delta * rows^(1 - kappa - eps) (the
    constants are non-explicit, so no pass/fail is attached).
    """
    if delta is None:
        # Half the certified per-class density (1 - eps)/m, the choice that
        # makes good rows carry more than (1 - eps) k / 2 fields.
        delta = (1 - cert.params.epsilon) / (2 * cert.m)
    report = build_matrix(
        cert.params.sign,
        cert.a,
        cert.m,
        cert.k,
        rows,
        delta,
        table=table,
        capacity=capacity,
        workers=workers,
        kappa=kappa,
        epsilon=float(cert.params.epsilon),
        c=c,
    )
    checked = 0
    violations = []
    found = []
    for t in range(rows + 1):
        for i in range(1, cert.k + 1):
            if report.multiplicities[t][i - 1] == 0:
                continue
            entry = cert.a + t * cert.m + i
            disc = entry if cert.params.sign == "+" else -entry
            bound = class_number_lower_bound(disc)
            checked += 1
            found.append({"t": t, "i": i, "disc": disc, "bound": bound})
            if not bound > cert.H:
                violations.append(
                    {"t": t, "i": i, "disc": disc, "bound": bound, "H": cert.H}
                )
    if violations:
        raise InternalInconsistencyError(
            f"{len(violations)} fields violate the certified bound: "
            f"{violations[:3]}"
        )
    half_k_rows = [
        t
        for t, total in enumerate(report.per_row_field_count)
        if 2 * total >= cert.k
    ]
    vacuous = [
        i
        for i in range(1, cert.k + 1)
        if report.column_sums[i - 1] == 0
    ]
    return PipelineReport(
        matrix=report,
        guarantee_checked=checked,
        guarantee_violations=violations,
        half_k_rows=half_k_rows,
        vacuous_columns=vacuous,
    )


def multiplicity_profile(table: FieldTable, kappa: float = KAPPA_DEFAULT) -> dict:
    """Running maximum of per-discriminant multiplicity against |disc|^kappa.

    Informational companion to the multiplicity bound: reports, for each
    new record multiplicity, the smallest |disc| attaining it and the
    reference curve value there.
    """
    counts = Counter(r.disc for r in table.records)
    best = 0
    steps = []
    for rec in table.records:
        mult = counts[rec.disc]
        if mult > best:
            best = mult
            steps.append(
                {
                    "abs_disc": abs(rec.disc),
                    "multiplicity": mult,
                    "reference": abs(rec.disc) ** kappa,
                }
            )
    return {
        "kappa": kappa,
        "max_multiplicity": best,
        "records": len(table.records),
        "steps": steps,
    }
