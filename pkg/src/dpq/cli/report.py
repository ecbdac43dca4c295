"""Reports: a status plus ordered key/value facts, in text or tab-separated form."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction

from ..graded import GradedPoly, TruncationBounds
from ..hbar import HbarOp, HbarSymbol
from ..operators import HalfDensityOp
from ..polyvector import SIGN_CONVENTION
from ..serialize import format_rational

CONVENTIONS = ";".join([
    SIGN_CONVENTION,
    "op:coeff-left,word-in-declaration-order",
    "adj:d+=-d",
    "ce:D=rho*eta*d_x-C*eta*d_eta",
    "dual:eta->p_xi,d_eta->xi",
    "fourier:exp(xi*eta/h),top-eta-right",
])
FINGERPRINT = hashlib.sha256(CONVENTIONS.encode()).hexdigest()[:12]

EXIT_OK = ("PASS", "QUANTIZED", "SOLVED", "OK")


def render(value) -> str:
    if isinstance(value, HalfDensityOp):
        return value.to_str()
    if isinstance(value, GradedPoly):
        return value.to_str()
    if isinstance(value, HbarOp):
        if not value.coeffs:
            return "0"
        return " + ".join(f"h^{n} * ({op.to_str()})" for n, op in value.coeffs.items())
    if isinstance(value, HbarSymbol):
        if not value.series:
            return "0"
        return " + ".join(f"h^{n} * ({p.to_str()})" for n, p in value.series.items())
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)


@dataclass
class Report:
    command: str
    status: str
    facts: list = field(default_factory=list)      # (key, value)
    bounds: TruncationBounds | None = None
    problem: str = ""

    def add(self, key, value):
        self.facts.append((key, value))
        return self

    @property
    def exit_code(self) -> int:
        return 0 if self.status in EXIT_OK else 1

    def lines(self):
        yield "command", self.command
        if self.problem:
            yield "problem", self.problem
        yield "status", self.status
        for k, v in self.facts:
            yield k, render(v)
        if self.bounds is not None:
            b = self.bounds
            yield "weight_max", str(b.weight_max)
            yield "base_degree_max", str(b.base_degree_max)
            yield "hbar_max", str(b.hbar_max)
        yield "convention", FINGERPRINT

    def machine(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in self.lines())

    def text(self) -> str:
        rows = list(self.lines())
        width = max(len(k) for k, _ in rows)
        return "".join(f"{k.ljust(width)} : {v}\n" for k, v in rows)
