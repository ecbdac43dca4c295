"""Canonical text form for polynomials (shared by reprs and the CLI)."""

from fractions import Fraction


def format_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def sort_key(ring, mono):
    return (sum(mono[ring.n:]), sum(mono), tuple(-e for e in mono))


def format_monomial(ring, mono, momentum_style="p[{}]") -> str:
    parts = []
    for i, e in enumerate(mono):
        if not e:
            continue
        s = ring.symbol_name(i, momentum_style)
        parts.append(s if e == 1 else f"{s}^{e}")
    return " * ".join(parts)


def format_poly(p, momentum_style="p[{}]") -> str:
    ring = p.ring
    if not p.terms:
        return "0"
    out = []
    for mono in sorted(p.terms, key=lambda m: sort_key(ring, m)):
        c = p.terms[mono]
        sign = "-" if c < 0 else "+"
        a = abs(c)
        body = format_monomial(ring, mono, momentum_style)
        if not body:
            text = format_rational(a)
        elif a == 1:
            text = body
        else:
            text = f"{format_rational(a)} * {body}"
        out.append((sign, text))
    first_sign, first = out[0]
    s = ("-" if first_sign == "-" else "") + first
    for sign, text in out[1:]:
        s += f" {sign} {text}"
    return s
