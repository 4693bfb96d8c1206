"""Sparse multivariate polynomials over the rationals.

Two groups of variables live in one term dictionary: ambient variables
(coordinates of the germ) and an optional block of module variables that
realize symmetric powers of a free module as a polynomial grading.  All
coefficients are `fractions.Fraction`, so every computation downstream is
exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Tuple

Frac = Fraction

_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_IDENT_CONT = _IDENT_START | set("0123456789_")


class PolyError(ValueError):
    pass


class ParseError(PolyError):
    """Raised on malformed polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Context:
    """Variable declaration shared by a family of polynomials.

    `ambient` are the coordinate names, `modvars` the module-direction names
    used to encode symmetric powers.  Either block may be empty, names must
    be unique across both blocks.
    """

    ambient: Tuple[str, ...]
    modvars: Tuple[str, ...] = ()

    def __post_init__(self):
        names = list(self.ambient) + list(self.modvars)
        if len(set(names)) != len(names):
            raise PolyError("duplicate variable names in context")
        for name in names:
            if not name or name[0] not in _IDENT_START or any(c not in _IDENT_CONT for c in name):
                raise PolyError(f"invalid variable name {name!r}")

    @property
    def nz(self) -> int:
        return len(self.ambient)

    @property
    def nx(self) -> int:
        return len(self.modvars)

    @property
    def names(self) -> Tuple[str, ...]:
        return self.ambient + self.modvars

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise PolyError(f"unknown variable {name!r}") from None

    def with_module(self, rank: int, prefix: str = "X") -> "Context":
        """Context with `rank` fresh module variables appended."""
        mv = tuple(f"{prefix}{i + 1}" for i in range(rank))
        for name in mv:
            if name in self.ambient:
                raise PolyError(f"module variable {name!r} collides with an ambient name")
        return Context(self.ambient, mv)

    def ambient_only(self) -> "Context":
        return Context(self.ambient, ())


class Monomial(NamedTuple):
    z: Tuple[int, ...]
    x: Tuple[int, ...]

    def degree(self) -> int:
        return sum(self.z) + sum(self.x)

    def z_degree(self) -> int:
        return sum(self.z)

    def x_degree(self) -> int:
        return sum(self.x)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return Monomial(tuple(i + j for i, j in zip(a.z, b.z)), tuple(i + j for i, j in zip(a.x, b.x)))


def _degrevlex_key(exps: Tuple[int, ...]) -> tuple:
    # Larger key means larger monomial: total degree first, ties broken so
    # that the last variable with differing exponent has the smaller one.
    return (sum(exps), tuple(-e for e in reversed(exps)))


class Poly:
    """Immutable sparse polynomial: mapping monomial -> nonzero Fraction."""

    __slots__ = ("ctx", "terms", "_key")

    def __init__(self, ctx: Context, terms: Mapping[Monomial, Frac]):
        self.ctx = ctx
        clean: Dict[Monomial, Frac] = {}
        for mono, coef in terms.items():
            if not isinstance(coef, Fraction):
                coef = Fraction(coef)
            if coef != 0:
                if len(mono.z) != ctx.nz or len(mono.x) != ctx.nx:
                    raise PolyError("monomial arity does not match context")
                clean[mono] = coef
        self.terms = clean
        self._key: Optional[tuple] = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(ctx: Context) -> "Poly":
        return Poly(ctx, {})

    @staticmethod
    def const(ctx: Context, value) -> "Poly":
        mono = Monomial((0,) * ctx.nz, (0,) * ctx.nx)
        return Poly(ctx, {mono: Fraction(value)})

    @staticmethod
    def var(ctx: Context, name: str) -> "Poly":
        idx = ctx.index(name)
        z = [0] * ctx.nz
        x = [0] * ctx.nx
        if idx < ctx.nz:
            z[idx] = 1
        else:
            x[idx - ctx.nz] = 1
        return Poly(ctx, {Monomial(tuple(z), tuple(x)): Fraction(1)})

    @staticmethod
    def monomial(ctx: Context, z: Sequence[int], x: Sequence[int] = (), coef=1) -> "Poly":
        xx = tuple(x) if x else (0,) * ctx.nx
        return Poly(ctx, {Monomial(tuple(z), xx): Fraction(coef)})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m.degree() == 0 for m in self.terms)

    def constant_value(self) -> Frac:
        mono = Monomial((0,) * self.ctx.nz, (0,) * self.ctx.nx)
        return self.terms.get(mono, Fraction(0))

    def total_degree(self) -> int:
        return max((m.degree() for m in self.terms), default=0)

    def x_degree(self) -> int:
        return max((m.x_degree() for m in self.terms), default=0)

    def is_x_homogeneous(self, degree: Optional[int] = None) -> bool:
        degs = {m.x_degree() for m in self.terms}
        if not degs:
            return True
        if len(degs) > 1:
            return False
        return degree is None or degs == {degree}

    def order_at_origin(self) -> int:
        """Smallest total degree of a term, 0 for units, -1 for the zero poly."""
        if not self.terms:
            return -1
        return min(m.degree() for m in self.terms)

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted((m, c) for m, c in self.terms.items()))
        return self._key

    def __hash__(self):
        return hash((self.ctx, self.key()))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    # -- arithmetic ---------------------------------------------------

    def _check(self, other: "Poly"):
        if self.ctx != other.ctx:
            raise PolyError("context mismatch in polynomial arithmetic")

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for mono, coef in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coef
        return Poly(self.ctx, out)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check(other)
        out = dict(self.terms)
        for mono, coef in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) - coef
        return Poly(self.ctx, out)

    def __neg__(self) -> "Poly":
        return Poly(self.ctx, {m: -c for m, c in self.terms.items()})

    def scale(self, value) -> "Poly":
        v = Fraction(value)
        if v == 0:
            return Poly.zero(self.ctx)
        return Poly(self.ctx, {m: c * v for m, c in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        out: Dict[Monomial, Frac] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = mono_mul(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return Poly(self.ctx, out)

    def mul_trunc(self, other: "Poly", degree_bound: int) -> "Poly":
        """Product with all terms of total degree > degree_bound dropped."""
        self._check(other)
        out: Dict[Monomial, Frac] = {}
        for m1, c1 in self.terms.items():
            d1 = m1.degree()
            if d1 > degree_bound:
                continue
            for m2, c2 in other.terms.items():
                if d1 + m2.degree() > degree_bound:
                    continue
                mono = mono_mul(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return Poly(self.ctx, out)

    def truncate(self, degree_bound: int) -> "Poly":
        return Poly(self.ctx, {m: c for m, c in self.terms.items() if m.degree() <= degree_bound})

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise PolyError("negative exponent")
        result = Poly.const(self.ctx, 1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    # -- calculus and substitution ------------------------------------

    def derivative(self, name: str) -> "Poly":
        idx = self.ctx.index(name)
        out: Dict[Monomial, Frac] = {}
        for mono, coef in self.terms.items():
            exps = list(mono.z) + list(mono.x)
            e = exps[idx]
            if e == 0:
                continue
            exps[idx] = e - 1
            new = Monomial(tuple(exps[: self.ctx.nz]), tuple(exps[self.ctx.nz:]))
            out[new] = out.get(new, Fraction(0)) + coef * e
        return Poly(self.ctx, out)

    def substitute(self, assignment: Mapping[str, "Poly"]) -> "Poly":
        """Simultaneous substitution of variables by polynomials (same context)."""
        images = {}
        for name, img in assignment.items():
            self.ctx.index(name)
            if img.ctx != self.ctx:
                raise PolyError("substitution image in wrong context")
            images[self.ctx.index(name)] = img
        result = Poly.zero(self.ctx)
        for mono, coef in self.terms.items():
            exps = list(mono.z) + list(mono.x)
            term = Poly.const(self.ctx, coef)
            fixed_z = list(mono.z)
            fixed_x = list(mono.x)
            for idx, img in images.items():
                if idx < self.ctx.nz:
                    fixed_z[idx] = 0
                else:
                    fixed_x[idx - self.ctx.nz] = 0
            term = term * Poly.monomial(self.ctx, fixed_z, fixed_x)
            for idx, img in images.items():
                e = exps[idx]
                if e:
                    term = term * img ** e
            result = result + term
        return result

    def evaluate(self, point: Mapping[str, Frac]) -> Frac:
        vals = []
        for name in self.ctx.names:
            if name not in point:
                raise PolyError(f"evaluation point missing variable {name!r}")
            vals.append(Fraction(point[name]))
        total = Fraction(0)
        for mono, coef in self.terms.items():
            v = coef
            for e, val in zip(mono.z + mono.x, vals):
                if e:
                    v *= val ** e
            total += v
        return total

    def shift_context(self, ctx: Context) -> "Poly":
        """Reinterpret in another context containing the same-named variables."""
        out: Dict[Monomial, Frac] = {}
        for mono, coef in self.terms.items():
            z = [0] * ctx.nz
            x = [0] * ctx.nx
            for name, e in zip(self.ctx.names, mono.z + mono.x):
                if e == 0:
                    continue
                idx = ctx.index(name)
                if idx < ctx.nz:
                    z[idx] += e
                else:
                    x[idx - ctx.nz] += e
            new = Monomial(tuple(z), tuple(x))
            out[new] = out.get(new, Fraction(0)) + coef
        return Poly(ctx, out)

    # -- module grading ----------------------------------------------

    def x_components(self) -> Dict[int, "Poly"]:
        """Split into module-degree homogeneous parts, degree -> part."""
        parts: Dict[int, Dict[Monomial, Frac]] = {}
        for mono, coef in self.terms.items():
            parts.setdefault(mono.x_degree(), {})[mono] = coef
        return {d: Poly(self.ctx, t) for d, t in sorted(parts.items())}

    def coefficient_of_x(self, x_exps: Tuple[int, ...]) -> "Poly":
        """Ambient-polynomial coefficient of the given module monomial."""
        zero_x = (0,) * self.ctx.nx
        out = {}
        for mono, coef in self.terms.items():
            if mono.x == x_exps:
                out[Monomial(mono.z, zero_x)] = coef
        return Poly(self.ctx, out)

    # -- printing -----------------------------------------------------

    def __str__(self) -> str:
        return poly_to_str(self)

    def __repr__(self) -> str:
        return f"Poly({poly_to_str(self)!r})"


@dataclass(frozen=True)
class SymElem:
    """An element of a symmetric power: module-degree homogeneous polynomial."""

    poly: Poly
    degree: int = field(default=-1)

    def __post_init__(self):
        deg = self.degree
        if deg < 0:
            deg = self.poly.x_degree()
            object.__setattr__(self, "degree", deg)
        if not self.poly.is_x_homogeneous(deg) and not self.poly.is_zero():
            raise PolyError("symmetric-power element is not module-homogeneous")


def sym_components(p: Poly) -> list[SymElem]:
    """Module-degree homogeneous components of `p`, ascending degree."""
    return [SymElem(part, d) for d, part in p.x_components().items()]


# -- parsing ----------------------------------------------------------


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.cursor = 0

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*^()":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.tokens.append(("int", text[i:j], i))
                i = j
                continue
            if ch == "/":
                self.tokens.append(("/", ch, i))
                i += 1
                continue
            if ch in _IDENT_START:
                j = i
                while j < len(text) and text[j] in _IDENT_CONT:
                    j += 1
                self.tokens.append(("ident", text[i:j], i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", "", len(text)))

    def peek(self):
        return self.tokens[self.cursor]

    def next(self):
        tok = self.tokens[self.cursor]
        if tok[0] != "end":
            self.cursor += 1
        return tok


def parse_poly(text: str, ctx: Context) -> Poly:
    """Parse polynomial text.

    Grammar: integer and rational (`a/b`) literals, declared identifiers,
    `+ - * ^`, parentheses.  `^` takes a nonnegative integer literal.  There
    is no implicit multiplication; whitespace is insignificant.
    """
    tz = _Tokenizer(text)

    def parse_expr() -> Poly:
        kind, _, _ = tz.peek()
        negate = False
        if kind in "+-":
            _, val, _ = tz.next()
            negate = val == "-"
        node = parse_term()
        if negate:
            node = -node
        while True:
            kind, val, _ = tz.peek()
            if kind == "+":
                tz.next()
                node = node + parse_term()
            elif kind == "-":
                tz.next()
                node = node - parse_term()
            else:
                return node

    def parse_term() -> Poly:
        node = parse_factor()
        while True:
            kind, _, _ = tz.peek()
            if kind == "*":
                tz.next()
                node = node * parse_factor()
            else:
                return node

    def parse_factor() -> Poly:
        base = parse_atom()
        kind, _, _ = tz.peek()
        if kind == "^":
            tz.next()
            kind, val, pos = tz.next()
            if kind != "int":
                raise ParseError("exponent must be a nonnegative integer literal", pos)
            return base ** int(val)
        return base

    def parse_atom() -> Poly:
        kind, val, pos = tz.next()
        if kind == "int":
            num = int(val)
            kind2, _, _ = tz.peek()
            if kind2 == "/":
                tz.next()
                kind3, val3, pos3 = tz.next()
                if kind3 != "int":
                    raise ParseError("expected integer denominator", pos3)
                den = int(val3)
                if den == 0:
                    raise ParseError("zero denominator", pos3)
                return Poly.const(ctx, Fraction(num, den))
            return Poly.const(ctx, num)
        if kind == "ident":
            if val not in ctx.names:
                raise ParseError(f"undeclared variable {val!r}", pos)
            return Poly.var(ctx, val)
        if kind == "(":
            node = parse_expr()
            kind2, _, pos2 = tz.next()
            if kind2 != ")":
                raise ParseError("expected ')'", pos2)
            return node
        if kind == "-":
            # unary minus directly before an atom, e.g. "(-x)"
            return -parse_atom()
        raise ParseError("expected a literal, variable, or '('", pos)

    result = parse_expr()
    kind, _, pos = tz.peek()
    if kind != "end":
        raise ParseError("trailing input", pos)
    return result


def _mono_to_str(ctx: Context, mono: Monomial) -> str:
    parts = []
    for name, e in zip(ctx.names, mono.z + mono.x):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def poly_to_str(p: Poly) -> str:
    """Canonical rendering: graded reverse lexicographic, descending."""
    if not p.terms:
        return "0"
    items = sorted(
        p.terms.items(),
        key=lambda mc: _degrevlex_key(mc[0].z + mc[0].x),
        reverse=True,
    )
    chunks = []
    for i, (mono, coef) in enumerate(items):
        mstr = _mono_to_str(p.ctx, mono)
        neg = coef < 0
        mag = -coef if neg else coef
        if mstr and mag == 1:
            body = mstr
        elif mstr:
            body = f"{mag}*{mstr}"
        else:
            body = str(mag)
        if i == 0:
            chunks.append(("-" if neg else "") + body)
        else:
            chunks.append((" - " if neg else " + ") + body)
    return "".join(chunks)
