"""Problem files: line-based sections of `key = value` entries."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from ..graded import Coordinate, GradedError, GradedPoly, Ring, TruncationBounds
from ..linfty import AlgebroidFrameData, StructureConstants
from ..polyvector import PoissonStructure
from .expr import ParseError, parse_expr

SECTIONS = ("manifold", "poisson", "linfty", "options")
OPTION_KEYS = ("weight_max", "base_degree_max", "hbar_max", "k_max")


class ProblemError(GradedError):
    pass


@dataclass
class ProblemFile:
    path: str
    coords: list = field(default_factory=list)          # Coordinate
    macros: dict = field(default_factory=dict)          # name -> expression text
    Q: str | None = None
    Pi: dict = field(default_factory=dict)              # n -> expression text
    base: list = field(default_factory=list)
    fiber: list = field(default_factory=list)
    rho: list = field(default_factory=list)             # (target, I, text)
    C: list = field(default_factory=list)
    s: dict = field(default_factory=dict)               # generator -> text
    theta_A: dict = field(default_factory=dict)
    theta_M: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    sections: set = field(default_factory=set)

    # --- derived objects
    def bounds(self, **override) -> TruncationBounds:
        opts = {k: self.options[k] for k in ("weight_max", "base_degree_max", "hbar_max")
                if k in self.options}
        b = TruncationBounds(**opts)
        return replace(b, **{k: v for k, v in override.items() if v is not None})

    @property
    def k_max(self) -> int:
        return self.options.get("k_max", 4)

    def require(self, *names):
        for n in names:
            if n not in self.sections:
                raise ProblemError(f"{self.path}: missing [{n}] section")

    def ring(self, bounds=None) -> Ring:
        self.require("manifold")
        return Ring(tuple(self.coords), bounds or self.bounds())

    def parse(self, text, ring, mode):
        return parse_expr(text, ring, mode, self.macros)

    def poisson(self, bounds=None) -> PoissonStructure:
        self.require("manifold", "poisson")
        ring = self.ring(bounds)
        Q = self.parse(self.Q, ring, "polyvector") if self.Q else ring.zero()
        Pi = {n: self.parse(t, ring, "polyvector") for n, t in self.Pi.items()}
        return PoissonStructure(ring, Q, Pi)

    def structure_constants(self, bounds=None) -> StructureConstants:
        self.require("linfty")
        bounds = bounds or self.bounds()
        base_ring = Ring(tuple(self.base), bounds)
        names = [e.name for e in self.fiber]
        bnames = [c.name for c in self.base]

        def fidx(n):
            if n not in names:
                raise ProblemError(f"unknown fibre generator {n!r}")
            return names.index(n)

        rho: dict = {}
        for target, I, text in self.rho:
            if target not in bnames:
                raise ProblemError(f"unknown base coordinate {target!r}")
            key = tuple(fidx(i) for i in I)
            f = parse_expr(text, base_ring, "function")
            d = rho.setdefault(key, {})
            a = bnames.index(target)
            if a in d:
                raise ProblemError(f"duplicate entry rho[{target}; {', '.join(I)}]")
            d[a] = f
        C: dict = {}
        for target, I, text in self.C:
            key = tuple(fidx(i) for i in I)
            f = parse_expr(text, base_ring, "function")
            d = C.setdefault(key, {})
            j = fidx(target)
            if j in d:
                raise ProblemError(f"duplicate entry C[{target}; {', '.join(I)}]")
            d[j] = f
        return StructureConstants(tuple(self.base), tuple(self.fiber), rho, C, bounds)

    def cocycle(self, sc: StructureConstants) -> list:
        names = [e.name for e in self.fiber]
        out = [sc.base_ring.zero() for _ in names]
        for n, text in self.s.items():
            if n not in names:
                raise ProblemError(f"unknown fibre generator {n!r} in s[...]")
            out[names.index(n)] = parse_expr(text, sc.base_ring, "function")
        return out

    def frames(self, sc: StructureConstants):
        if not self.theta_A and not self.theta_M:
            return None
        names = [e.name for e in self.fiber]
        tA = [sc.base_ring.zero() for _ in names]
        tM = [sc.base_ring.zero() for _ in names]
        for table, out in ((self.theta_A, tA), (self.theta_M, tM)):
            for n, text in table.items():
                if n not in names:
                    raise ProblemError(f"unknown fibre generator {n!r}")
                out[names.index(n)] = parse_expr(text, sc.base_ring, "function")
        return AlgebroidFrameData(tuple(tA), tuple(tM))


_DECL = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*:\s*([-+]?\d+)$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_INDEXED = re.compile(r"^([A-Za-z_]+)\[(.*)\]$")


def _decl(value, where):
    m = _DECL.match(value.strip())
    if not m:
        raise ProblemError(f"{where}: expected 'name : degree', got {value!r}")
    return Coordinate(m.group(1), int(m.group(2)))


def _idents(text, where):
    out = [t.strip() for t in text.split(",")] if text.strip() else []
    for t in out:
        if not _IDENT.match(t):
            raise ProblemError(f"{where}: bad identifier {t!r}")
    return out


def parse_problem_text(text: str, path: str = "<string>") -> ProblemFile:
    pf = ProblemFile(path)
    section = None
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{path}:{lineno}"
        if line.startswith("[") and line.endswith("]") and "=" not in line:
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ProblemError(f"{where}: unknown section [{section}]")
            if section in pf.sections:
                raise ProblemError(f"{where}: repeated section [{section}]")
            pf.sections.add(section)
            continue
        if section is None:
            raise ProblemError(f"{where}: entry outside of any section")
        if line.startswith("define "):
            key, sep, value = line[len("define "):].partition("=")
            name = key.strip()
            if not sep or not _IDENT.match(name):
                raise ProblemError(f"{where}: expected 'define NAME = expr'")
            if name in pf.macros:
                raise ProblemError(f"{where}: {name!r} defined twice")
            pf.macros[name] = value.strip()
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ProblemError(f"{where}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        if not value:
            raise ProblemError(f"{where}: empty value for {key!r}")
        _entry(pf, section, key, value, where)
    if not pf.sections:
        raise ProblemError(f"{path}: no sections found (expected [manifold] or [linfty])")
    _validate(pf)
    return pf


def _entry(pf: ProblemFile, section, key, value, where):
    if section == "manifold":
        if key != "coord":
            raise ProblemError(f"{where}: unknown key {key!r} in [manifold]")
        pf.coords.append(_decl(value, where))
    elif section == "poisson":
        m = _INDEXED.match(key)
        if key == "Q":
            if pf.Q is not None:
                raise ProblemError(f"{where}: Q given twice")
            pf.Q = value
        elif m and m.group(1) == "Pi" and m.group(2).strip().isdigit():
            n = int(m.group(2))
            if n in pf.Pi:
                raise ProblemError(f"{where}: Pi[{n}] given twice")
            pf.Pi[n] = value
        else:
            raise ProblemError(f"{where}: unknown key {key!r} in [poisson]")
    elif section == "linfty":
        m = _INDEXED.match(key)
        if key == "base":
            pf.base.append(_decl(value, where))
        elif key == "fiber":
            pf.fiber.append(_decl(value, where))
        elif m and m.group(1) in ("rho", "C"):
            target, sep, rest = m.group(2).partition(";")
            if not sep:
                raise ProblemError(f"{where}: expected {m.group(1)}[target; indices]")
            entry = (target.strip(), _idents(rest, where), value)
            (pf.rho if m.group(1) == "rho" else pf.C).append(entry)
        elif m and m.group(1) in ("s", "theta_A", "theta_M"):
            table = getattr(pf, m.group(1))
            g = m.group(2).strip()
            if g in table:
                raise ProblemError(f"{where}: {key} given twice")
            table[g] = value
        else:
            raise ProblemError(f"{where}: unknown key {key!r} in [linfty]")
    elif section == "options":
        if key not in OPTION_KEYS:
            raise ProblemError(f"{where}: unknown option {key!r}")
        if not value.isdigit():
            raise ProblemError(f"{where}: option {key} must be a natural number")
        pf.options[key] = int(value)


def _validate(pf: ProblemFile):
    if "manifold" in pf.sections:
        names = [c.name for c in pf.coords]
        if not names:
            raise ProblemError(f"{pf.path}: [manifold] declares no coordinates")
        if len(set(names)) != len(names):
            raise ProblemError(f"{pf.path}: duplicate coordinate names")
    if "poisson" in pf.sections:
        pf.require("manifold")
        try:
            pf.poisson()
        except ParseError as e:
            raise ProblemError(f"{pf.path}: {e}") from None
    if "linfty" in pf.sections:
        if not pf.fiber:
            raise ProblemError(f"{pf.path}: [linfty] declares no fibre generators")
        try:
            pf.structure_constants()
        except ParseError as e:
            raise ProblemError(f"{pf.path}: {e}") from None


def parse_problem(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_problem_text(text, str(path))
