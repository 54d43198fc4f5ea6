"""Line-oriented instance files.

A file holds ``key = value`` lines, optionally grouped into ``[name]``
blocks; the last block is the instance the file describes and earlier
blocks (or ``import = other.inst as alias`` lines) can be referenced as
``base``. Values are exact rationals (``3``, ``-1/2``), ``inf``, bare names,
lists ``[...]``, tuples ``(...)`` and the named forms below; ``#`` starts a
comment.

    kind = curve | monomial | generated | rescale
    name, truncation, flag = point(q) | coordinate((order...), (center...))
    curve:     points = [...]; coeffs = [...] | geometric(s, r) | power(c, k)
               | harmonic-squares(c) | harmonic(c); tail = <rule>
    monomial:  slice = parity | polytope; vertices = [(..), ...]; variables = [x, y]
    generated: base = <name>; generators = [basis(d), one(d), pole(d, q, k), monomial(d, (e..))]
    rescale:   base = <name>; k = <int>

With ``coeffs = [...]`` the points carry those coefficients and an optional
``tail`` runs over the next unused positive integers. With a rule in
``coeffs`` the listed points are the first tail points.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .algebra import (
    DEFAULT_TRUNCATION,
    CurveSectionRing,
    GeometricTail,
    InfiniteDivisorSpec,
    LaurentMonomial,
    ParitySlice,
    PolytopeSlice,
    PowerTail,
    generated,
    subalgebra_rescale,
    validate_model,
)
from .errors import ApproxAlgError, InstanceError, ValidationError
from .kernel import INFINITY, Poly, RationalFunctionElement, monomial_element
from .valuation import CoordinateFlag, CurvePoint

COMMON_KEYS = {"kind", "name", "truncation", "flag"}
KIND_KEYS = {
    "curve": {"points", "coeffs", "tail"},
    "monomial": {"slice", "vertices", "variables"},
    "generated": {"base", "generators"},
    "rescale": {"base", "k"},
}


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class Name:
    text: str


_TOKEN = re.compile(r"\s*(?:(-?\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_\-]*)|(.))")


class _Parser:
    def __init__(self, text: str, line: int):
        self.tokens = []
        for num, word, sym in _TOKEN.findall(text):
            if num:
                self.tokens.append(("num", num))
            elif word:
                self.tokens.append(("word", word))
            elif sym.strip():
                self.tokens.append(("sym", sym))
        self.i = 0
        self.line = line

    def fail(self, msg):
        raise InstanceError(msg, self.line)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, sym=None):
        tok = self.peek()
        if tok[0] is None:
            self.fail("unexpected end of value")
        if sym is not None and tok != ("sym", sym):
            self.fail(f"expected {sym!r}, found {tok[1]!r}")
        self.i += 1
        return tok

    def items(self, close):
        out = []
        if self.peek() == ("sym", close):
            self.take()
            return tuple(out)
        while True:
            out.append(self.value())
            tok = self.take()
            if tok == ("sym", close):
                return tuple(out)
            if tok != ("sym", ","):
                self.fail(f"expected ',' or {close!r}, found {tok[1]!r}")

    def value(self):
        kind, text = self.take()
        if kind == "num":
            return Fraction(text)
        if kind == "word":
            if text.lower() in ("inf", "infinity"):
                return INFINITY
            if self.peek() == ("sym", "("):
                self.take()
                return Call(text, self.items(")"))
            return Name(text)
        if text == "[":
            return list(self.items("]"))
        if text == "(":
            return self.items(")")
        self.fail(f"unexpected {text!r}")

    def parse(self):
        v = self.value()
        if self.i != len(self.tokens):
            self.fail(f"trailing text after value: {self.tokens[self.i][1]!r}")
        return v


def parse_value(text: str, line: int | None = None):
    return _Parser(text, line).parse()


@dataclass
class _Block:
    name: str | None
    line: int
    entries: dict  # key -> (value, line)


def _split(text: str):
    """(imports, blocks) from raw text; syntax errors carry line numbers."""
    imports, blocks = [], []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[\s*([A-Za-z_][A-Za-z0-9_\-]*)\s*\]", line)
        if m:
            current = _Block(m.group(1), lineno, {})
            blocks.append(current)
            continue
        if "=" not in line:
            raise InstanceError(f"expected 'key = value', got {line!r}", lineno)
        key, _, val = (s.strip() for s in line.partition("="))
        if not key or not val:
            raise InstanceError(f"empty key or value in {line!r}", lineno)
        if key == "import":
            m = re.fullmatch(r"(\S+)\s+as\s+([A-Za-z_][A-Za-z0-9_\-]*)", val)
            if not m:
                raise InstanceError("import needs the form 'import = path as name'", lineno)
            imports.append((m.group(1), m.group(2), lineno))
            continue
        if current is None:
            current = _Block(None, lineno, {})
            blocks.append(current)
        if key in current.entries:
            raise InstanceError(f"duplicate key {key!r}", lineno)
        current.entries[key] = (parse_value(val, lineno), lineno)
    if not blocks:
        raise InstanceError("no instance declared", None)
    return imports, blocks


def _scalar(v, line, what):
    if not isinstance(v, Fraction):
        raise InstanceError(f"{what} must be an exact rational, got {v!r}", line)
    return v


def _int(v, line, what):
    v = _scalar(v, line, what)
    if v.denominator != 1 or v < 1:
        raise InstanceError(f"{what} must be a positive integer", line)
    return int(v)


def _point(v, line):
    if v is INFINITY:
        return v
    return _scalar(v, line, "point")


def _tail_rule(v, line, points=()):
    if not isinstance(v, Call):
        raise InstanceError(f"expected a tail rule such as geometric(1/2, 1/2), got {v!r}", line)
    args = [_scalar(a, line, f"{v.name} parameter") for a in v.args]
    try:
        if v.name == "geometric" and len(args) == 2:
            return GeometricTail(args[0], args[1], points)
        if v.name == "power" and len(args) == 2:
            return PowerTail(args[0], _int(args[1], line, "power exponent"), points)
        if v.name == "harmonic-squares" and len(args) <= 1:
            return PowerTail(args[0] if args else Fraction(607, 1000), 2, points)
        if v.name == "harmonic" and len(args) <= 1:
            return PowerTail(args[0] if args else Fraction(1), 1, points)
    except ApproxAlgError as exc:
        raise InstanceError(str(exc), line) from exc
    raise InstanceError(f"unknown tail rule {v.name}/{len(args)}", line)


def _flag(v, line):
    if not isinstance(v, Call):
        raise InstanceError("flag must be point(q) or coordinate((order), (center))", line)
    try:
        if v.name == "point" and len(v.args) == 1:
            return CurvePoint(_point(v.args[0], line))
        if v.name == "coordinate" and len(v.args) in (1, 2):
            order = tuple(int(_scalar(a, line, "order entry")) for a in _seq(v.args[0], line))
            center = tuple(_scalar(c, line, "center") for c in _seq(v.args[1], line)) if len(v.args) == 2 else None
            return CoordinateFlag(order, center)
    except ApproxAlgError as exc:
        raise InstanceError(str(exc), line) from exc
    raise InstanceError(f"unknown flag form {v.name}", line)


def _seq(v, line):
    if not isinstance(v, (list, tuple)):
        raise InstanceError(f"expected a list, got {v!r}", line)
    return v


def _generators(v, base, line):
    out = []
    for g in _seq(v, line):
        if not isinstance(g, Call) or not g.args:
            raise InstanceError(f"bad generator {g!r}", line)
        d = _int(g.args[0], line, "generator degree")
        if g.name == "basis" and len(g.args) == 1:
            out.extend((d, f) for f in base.graded_piece(d).elements)
        elif g.name == "one" and len(g.args) == 1:
            out.append((d, RationalFunctionElement.constant(base.variables)))
        elif g.name == "pole" and len(g.args) == 3:
            if base.geometry != "curve":
                raise InstanceError("pole(...) generators need a curve base", line)
            q, k = _point(g.args[1], line), _int(g.args[2], line, "pole order")
            one = Poly.constant(base.variables)
            if q is INFINITY:
                out.append((d, RationalFunctionElement(Poly.variable(base.variables, "x") ** k)))
            else:
                out.append((d, RationalFunctionElement(one, {Poly.linear(q): k})))
        elif g.name == "monomial" and len(g.args) == 2:
            exps = [int(_scalar(e, line, "exponent")) for e in _seq(g.args[1], line)]
            if len(exps) != len(base.variables):
                raise InstanceError("monomial exponent length does not match the variables", line)
            out.append((d, monomial_element(base.variables, exps)))
        else:
            raise InstanceError(f"unknown generator form {g.name}", line)
    return out


def _build(block: _Block, known: dict, default_name: str):
    e = block.entries
    if "kind" not in e:
        raise InstanceError("missing 'kind'", block.line)
    kind_v, kline = e["kind"]
    kind = kind_v.text if isinstance(kind_v, Name) else None
    if kind not in KIND_KEYS:
        raise InstanceError(f"unknown kind {kind_v!r}; expected one of {sorted(KIND_KEYS)}", kline)
    for key, (_, line) in e.items():
        if key not in COMMON_KEYS | KIND_KEYS[kind]:
            raise InstanceError(f"unknown key {key!r} for kind {kind}", line)
    name = e["name"][0].text if "name" in e and isinstance(e["name"][0], Name) else (block.name or default_name)
    trunc = _int(*e["truncation"], "truncation") if "truncation" in e else None

    def get(key, required=True):
        if key not in e:
            if required:
                raise InstanceError(f"kind {kind} needs {key!r}", block.line)
            return None, block.line
        return e[key]

    def base_model():
        v, line = get("base")
        ref = v.text if isinstance(v, Name) else None
        if ref not in known:
            raise InstanceError(f"base {ref or v!r} is not declared earlier or imported", line)
        return known[ref]

    try:
        if kind == "curve":
            pts_v, pline = get("points", required=False)
            points = tuple(_point(p, pline) for p in _seq(pts_v, pline)) if pts_v is not None else ()
            if len(set(points)) != len(points):
                raise InstanceError("duplicate support point", pline)
            coeffs, cline = get("coeffs", required=False)
            tail_v, tline = get("tail", required=False)
            support, tail = (), None
            if isinstance(coeffs, Call):
                if tail_v is not None:
                    raise InstanceError("give either a coefficient rule or 'tail', not both", tline)
                tail = _tail_rule(coeffs, cline, points)
            else:
                values = [_scalar(c, cline, "coefficient") for c in _seq(coeffs, cline)] if coeffs is not None else []
                if len(values) != len(points):
                    raise InstanceError(f"{len(points)} points but {len(values)} coefficients", cline)
                support = tuple(zip(points, values))
                if tail_v is not None:
                    tail = _tail_rule(tail_v, tline)
            try:
                div = InfiniteDivisorSpec(support, tail)
            except ApproxAlgError as exc:
                raise InstanceError(str(exc), pline) from exc
            if not div.convergent:
                raise InstanceError("divisor tail is not summable; its class does not converge",
                                    tline if tail_v is not None else cline)
            model = CurveSectionRing(div, name, trunc or DEFAULT_TRUNCATION,
                                     {"birational_model": "projective line"})
        elif kind == "monomial":
            sv, sline = get("slice")
            rule = sv.text if isinstance(sv, Name) else None
            variables = None
            if "variables" in e:
                vv, vline = e["variables"]
                variables = tuple(x.text if isinstance(x, Name) else str(x) for x in _seq(vv, vline))
            if rule == "parity":
                if "vertices" in e:
                    raise InstanceError("the parity slice takes no vertices", e["vertices"][1])
                slice_rule = ParitySlice()
            elif rule == "polytope":
                vv, vline = get("vertices")
                verts = [tuple(_scalar(c, vline, "vertex coordinate") for c in _seq(v, vline))
                         for v in _seq(vv, vline)]
                slice_rule = PolytopeSlice(verts)
            else:
                raise InstanceError(f"unknown slice {sv!r}; expected parity or polytope", sline)
            model = LaurentMonomial(slice_rule, variables, name, trunc or DEFAULT_TRUNCATION,
                                    {"birational_model": "torus"})
        elif kind == "generated":
            base = base_model()
            gv, gline = get("generators")
            model = generated(base, _generators(gv, base, gline), name, trunc)
        else:
            base = base_model()
            model = subalgebra_rescale(base, _int(*get("k"), "k"))
            model.name = name
    except InstanceError:
        raise
    except ApproxAlgError as exc:
        raise InstanceError(str(exc), block.line) from exc
    if "flag" in e:
        flag = _flag(*e["flag"])
        conflicts = model.flag_conflicts(flag)
        if conflicts:
            raise InstanceError("; ".join(conflicts), e["flag"][1])
        model.metadata = dict(model.metadata, flag=flag)
    return model


def parse_instance(text: str, base_dir=None, samples: int = 16, seed: int = 0, name: str = "instance",
                   _seen=None):
    """The model described by the last block of ``text``, after validation.

    Validation findings of severity "error" raise :class:`ValidationError`;
    the report is kept in ``model.metadata["validation"]`` either way.
    """
    imports, blocks = _split(text)
    base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
    seen = set(_seen or ())
    known = {}
    for path, alias, line in imports:
        target = (base_dir / path).resolve()
        if target in seen:
            raise InstanceError(f"circular import of {path}", line)
        try:
            sub_text = target.read_text(encoding="utf-8")
        except OSError as exc:
            raise InstanceError(f"cannot read import {path}: {exc.strerror}", line) from exc
        known[alias] = parse_instance(sub_text, target.parent, samples, seed, alias, seen | {target})
    model = None
    for block in blocks:
        model = _build(block, known, name)
        if block.name:
            known[block.name] = model
    report = validate_model(model, samples, seed)
    model.metadata = dict(model.metadata, validation=report)
    if report.fatal:
        raise ValidationError(f"instance {model.name} failed validation", report)
    return model


def load_instance(path, samples: int = 16, seed: int = 0):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_instance(text, path.parent, samples, seed, path.stem, {path.resolve()})


def parse_flag(text: str):
    """A flag from its instance-file spelling, e.g. ``point(-1)``."""
    return _flag(parse_value(text), None)


def instance_flag(model):
    return model.metadata.get("flag") or model.default_flag()


def shipped_instance_path(name: str) -> Path:
    return Path(__file__).with_name("instances") / f"{name}.inst"
