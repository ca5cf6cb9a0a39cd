"""Domain-annotated first-order formulas.

Surface syntax is parenthesized prefix notation::

    file     := preamble? formula
    preamble := "(domains" (name kind descriptor?)* ")" "(predicates" (name arity strictness?)* ")"
    formula  := "(atom" pred term* ")" | "(not" f ")" | "(and" f f ")" | "(or" f f ")"
              | "(implies" f f ")" | "(forall" var domain f ")" | "(exists" var domain f ")"
    domain   := name | "(fun" domain domain ")" | "(Qc" a b ")"
    term     := symbol | "(" symbol term+ ")"

Symbols that are not bound by an enclosing quantifier are free parameters
(``f``, ``eps``, function symbols such as ``dist``).  Re-binding a name that
is already bound in the current scope is an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence, Union

from .rational import parse_rational, fmt, RationalFormatError


class DomainKind(Enum):
    COMPACT = "compact"
    COUNTABLE = "countable"
    OUTER = "outer"
    FUNCTION = "fun"


@dataclass(frozen=True)
class DomainTag:
    """A quantifier domain.  ``name`` is the surface token, ``descriptor`` the
    mathematical reading (``"Q+"``, ``"Q∩[0,1]"``, ...)."""

    kind: DomainKind
    name: str
    descriptor: str
    src: "DomainTag | None" = None
    dst: "DomainTag | None" = None

    @property
    def is_compact(self) -> bool:
        return self.kind is DomainKind.COMPACT

    @property
    def is_function(self) -> bool:
        return self.kind is DomainKind.FUNCTION

    @property
    def order(self) -> int:
        """Type order: 0 for base domains, 1 for maps between base domains, ..."""
        if not self.is_function:
            return 0
        return max(self.src.order + 1, self.dst.order)

    def arg_domains(self) -> tuple["DomainTag", ...]:
        """Argument domains after full uncurrying."""
        out = []
        d = self
        while d.is_function:
            out.append(d.src)
            d = d.dst
        return tuple(out)

    def result_domain(self) -> "DomainTag":
        d = self
        while d.is_function:
            d = d.dst
        return d


def fun_domain(src: DomainTag, dst: DomainTag) -> DomainTag:
    return DomainTag(
        DomainKind.FUNCTION,
        f"(fun {src.name} {dst.name})",
        f"({dst.descriptor})^({src.descriptor})",
        src,
        dst,
    )


def curried(args: Sequence[DomainTag], result: DomainTag) -> DomainTag:
    """``curried([A, B], C)`` is ``(fun A (fun B C))``; no arguments gives ``C``."""
    d = result
    for a in reversed(args):
        d = fun_domain(a, d)
    return d


def compact_interval(a, b) -> DomainTag:
    return DomainTag(DomainKind.COMPACT, f"(Qc {fmt(a)} {fmt(b)})", f"Q∩[{fmt(a)},{fmt(b)}]")


BUILTIN_DOMAINS: dict[str, DomainTag] = {
    "Q": DomainTag(DomainKind.COUNTABLE, "Q", "Q"),
    "Qplus": DomainTag(DomainKind.COUNTABLE, "Qplus", "Q+"),
    "N": DomainTag(DomainKind.COUNTABLE, "N", "N"),
}


@dataclass(frozen=True)
class PredicateSig:
    name: str
    arity: int
    strict: bool = True


BUILTIN_PREDICATES: dict[str, PredicateSig] = {
    "lt": PredicateSig("lt", 2, True),
    "gt": PredicateSig("gt", 2, True),
    "le": PredicateSig("le", 2, False),
    "ge": PredicateSig("ge", 2, False),
    "approxQ": PredicateSig("approxQ", 3, False),
    "ucont": PredicateSig("ucont", 2, True),
}


@dataclass(frozen=True)
class Signature:
    """Declared domains and predicates (builtins are always in scope)."""

    domains: tuple[tuple[str, DomainTag], ...] = ()
    predicates: tuple[tuple[str, PredicateSig], ...] = ()

    def domain(self, name: str) -> DomainTag | None:
        for n, d in self.domains:
            if n == name:
                return d
        return BUILTIN_DOMAINS.get(name)

    def predicate(self, name: str) -> PredicateSig | None:
        for n, p in self.predicates:
            if n == name:
                return p
        return BUILTIN_PREDICATES.get(name)


DEFAULT_SIGNATURE = Signature()


# ---------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    """Application of a named function (a free symbol or a bound function
    variable) to one or more argument terms; curried heads are flattened."""

    head: str
    args: tuple["Term", ...]

    def __str__(self) -> str:
        return "(" + " ".join([self.head, *map(str, self.args)]) + ")"


Term = Union[Var, App]


class Formula:
    """Base class of the formula AST; all nodes are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple[Term, ...] = ()
    strict: bool = True


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    domain: DomainTag
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    domain: DomainTag
    body: Formula


Binary = (And, Or, Implies)
Quantified = (ForAll, Exists)


class Quantifier(NamedTuple):
    kind: str  # "forall" | "exists"
    var: str
    domain: DomainTag

    def flipped(self) -> "Quantifier":
        return self._replace(kind="exists" if self.kind == "forall" else "forall")

    def __str__(self) -> str:
        sym = "∀" if self.kind == "forall" else "∃"
        return f"{sym}{self.var}:{self.domain.descriptor}"


@dataclass(frozen=True)
class FormulaFile:
    signature: Signature
    formula: Formula


# ---------------------------------------------------------------------------
# Errors


class FormulaError(ValueError):
    """Base class for parse and scoping errors; carries a 1-based position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line else ""
        super().__init__(message + where)
        self.message = message


class FormulaSyntaxError(FormulaError):
    pass


class UnknownPredicateError(FormulaError):
    pass


class UnknownDomainError(FormulaError):
    pass


class ReboundVariableError(FormulaError):
    pass


class OuterQuantifierError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Tokenizer and parser


class _Tok(NamedTuple):
    kind: str  # "(", ")", "sym", "str"
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r'\s+|;[^\n]*|\(|\)|"[^"\n]*"|[^\s()";]+')


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        s = m.group(0)
        col = pos - line_start + 1
        if s in ("(", ")"):
            toks.append(_Tok(s, s, line, col))
        elif s.startswith('"'):
            toks.append(_Tok("str", s[1:-1], line, col))
        elif not s.isspace() and not s.startswith(";"):
            toks.append(_Tok("sym", s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, signature: Signature | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature or DEFAULT_SIGNATURE

    # token helpers
    def peek(self, k: int = 0) -> _Tok | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 1)
            raise FormulaSyntaxError("unexpected end of input", last.line, last.col)
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise FormulaSyntaxError(f"expected {want!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def symbol(self) -> _Tok:
        return self.expect("sym")

    # preamble
    def preamble(self) -> Signature:
        domains: list[tuple[str, DomainTag]] = []
        preds: list[tuple[str, PredicateSig]] = []
        sig = self.sig
        if self._at_head("domains"):
            self.next(), self.next()
            while self.peek() is not None and self.peek().kind == "(":
                open_tok = self.next()
                name = self.symbol().text
                kind_tok = self.peek()
                sig_so_far = Signature(sig.domains + tuple(domains), sig.predicates)
                if kind_tok is not None and kind_tok.kind == "(":
                    self.sig = sig_so_far
                    fun = self.domain()
                    if not fun.is_function:
                        raise FormulaSyntaxError("composite domain kind must be (fun from to)",
                                                 kind_tok.line, kind_tok.col)
                    dom = fun
                else:
                    kt = self.symbol()
                    try:
                        kind = {"compact": DomainKind.COMPACT, "countable": DomainKind.COUNTABLE,
                                "outer": DomainKind.OUTER}[kt.text]
                    except KeyError:
                        raise FormulaSyntaxError(f"unknown domain kind {kt.text!r}", kt.line, kt.col) from None
                    descriptor = name
                    if self.peek() is not None and self.peek().kind == "str":
                        descriptor = self.next().text
                    dom = DomainTag(kind, name, descriptor)
                if any(n == name for n, _ in domains) or name in BUILTIN_DOMAINS:
                    raise FormulaSyntaxError(f"domain {name!r} declared twice", open_tok.line, open_tok.col)
                domains.append((name, dom))
                self.expect(")")
            self.expect(")")
        if self._at_head("predicates"):
            self.next(), self.next()
            while self.peek() is not None and self.peek().kind == "(":
                open_tok = self.next()
                name = self.symbol().text
                at = self.symbol()
                if not at.text.isdigit():
                    raise FormulaSyntaxError(f"arity must be a natural number, found {at.text!r}",
                                             at.line, at.col)
                strict = True
                if self.peek() is not None and self.peek().kind == "sym":
                    st = self.next()
                    if st.text not in ("strict", "nonstrict"):
                        raise FormulaSyntaxError(f"expected strict|nonstrict, found {st.text!r}",
                                                 st.line, st.col)
                    strict = st.text == "strict"
                if any(n == name for n, _ in preds):
                    raise FormulaSyntaxError(f"predicate {name!r} declared twice", open_tok.line, open_tok.col)
                preds.append((name, PredicateSig(name, int(at.text), strict)))
                self.expect(")")
            self.expect(")")
        self.sig = Signature(sig.domains + tuple(domains), sig.predicates + tuple(preds))
        return Signature(tuple(domains), tuple(preds))

    def _at_head(self, word: str) -> bool:
        a, b = self.peek(), self.peek(1)
        return a is not None and a.kind == "(" and b is not None and b.kind == "sym" and b.text == word

    # domains
    def domain(self) -> DomainTag:
        tok = self.next()
        if tok.kind == "sym":
            d = self.sig.domain(tok.text)
            if d is None:
                raise UnknownDomainError(f"unknown domain {tok.text!r}", tok.line, tok.col)
            return d
        if tok.kind != "(":
            raise FormulaSyntaxError(f"expected a domain, found {tok.text!r}", tok.line, tok.col)
        head = self.symbol()
        if head.text == "fun":
            src = self.domain()
            dst = self.domain()
            self.expect(")")
            return fun_domain(src, dst)
        if head.text == "Qc":
            lo_t, hi_t = self.symbol(), self.symbol()
            try:
                lo, hi = parse_rational(lo_t.text), parse_rational(hi_t.text)
            except RationalFormatError as exc:
                raise FormulaSyntaxError(str(exc), lo_t.line, lo_t.col) from None
            if lo > hi:
                raise FormulaSyntaxError("empty interval domain", lo_t.line, lo_t.col)
            self.expect(")")
            return compact_interval(lo, hi)
        raise UnknownDomainError(f"unknown domain constructor {head.text!r}", head.line, head.col)

    # terms
    def term(self) -> Term:
        tok = self.next()
        if tok.kind == "sym":
            return Var(tok.text)
        if tok.kind != "(":
            raise FormulaSyntaxError(f"expected a term, found {tok.text!r}", tok.line, tok.col)
        head = self.symbol()
        args = []
        while self.peek() is not None and self.peek().kind != ")":
            args.append(self.term())
        self.expect(")")
        if not args:
            raise FormulaSyntaxError("application needs at least one argument", head.line, head.col)
        return App(head.text, tuple(args))

    # formulas
    def formula(self, bound: frozenset[str], outer_ok: bool) -> Formula:
        self.expect("(")
        head = self.symbol()
        op = head.text
        if op == "atom":
            name = self.symbol()
            psig = self.sig.predicate(name.text)
            if psig is None:
                raise UnknownPredicateError(f"unknown predicate {name.text!r}", name.line, name.col)
            args = []
            while self.peek() is not None and self.peek().kind != ")":
                args.append(self.term())
            if len(args) != psig.arity:
                raise FormulaSyntaxError(
                    f"predicate {name.text!r} expects {psig.arity} arguments, got {len(args)}",
                    name.line, name.col)
            self.expect(")")
            return Atom(name.text, tuple(args), psig.strict)
        if op == "not":
            body = self.formula(bound, False)
            self.expect(")")
            return Not(body)
        if op in ("and", "or", "implies"):
            left = self.formula(bound, False)
            right = self.formula(bound, False)
            self.expect(")")
            return {"and": And, "or": Or, "implies": Implies}[op](left, right)
        if op in ("forall", "exists"):
            var = self.symbol()
            if var.text in bound:
                raise ReboundVariableError(f"variable {var.text!r} is already bound", var.line, var.col)
            dom_tok = self.peek()
            dom = self.domain()
            if dom.kind is DomainKind.OUTER and not (outer_ok and op == "forall"):
                raise OuterQuantifierError(
                    f"outer domain {dom.name!r} allowed only in the outermost universal block",
                    dom_tok.line, dom_tok.col)
            body = self.formula(bound | {var.text}, outer_ok and op == "forall")
            self.expect(")")
            cls = ForAll if op == "forall" else Exists
            return cls(var.text, dom, body)
        raise FormulaSyntaxError(f"unknown connective {op!r}", head.line, head.col)

    def finish(self) -> None:
        tok = self.peek()
        if tok is not None:
            raise FormulaSyntaxError(f"trailing input {tok.text!r}", tok.line, tok.col)


def parse_file(text: str, signature: Signature | None = None) -> FormulaFile:
    """Parse a formula file (optional preamble followed by one formula)."""
    p = _Parser(text, signature)
    declared = p.preamble()
    f = p.formula(frozenset(), True)
    p.finish()
    base = signature or DEFAULT_SIGNATURE
    return FormulaFile(Signature(base.domains + declared.domains, base.predicates + declared.predicates), f)


def parse(text: str, signature: Signature | None = None) -> Formula:
    return parse_file(text, signature).formula


# ---------------------------------------------------------------------------
# Rendering


def render_term(t: Term) -> str:
    return str(t)


def render(f: Formula) -> str:
    """Canonical single-line surface syntax."""
    if isinstance(f, Atom):
        return "(" + " ".join(["atom", f.pred, *map(render_term, f.args)]) + ")"
    if isinstance(f, Not):
        return f"(not {render(f.body)})"
    if isinstance(f, And):
        return f"(and {render(f.left)} {render(f.right)})"
    if isinstance(f, Or):
        return f"(or {render(f.left)} {render(f.right)})"
    if isinstance(f, Implies):
        return f"(implies {render(f.left)} {render(f.right)})"
    if isinstance(f, ForAll):
        return f"(forall {f.var} {f.domain.name} {render(f.body)})"
    if isinstance(f, Exists):
        return f"(exists {f.var} {f.domain.name} {render(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def render_signature(sig: Signature) -> str:
    parts = []
    if sig.domains:
        entries = []
        for name, d in sig.domains:
            if d.is_function:
                entries.append(f"({name} {d.name})")
            elif d.descriptor != name:
                entries.append(f'({name} {d.kind.value} "{d.descriptor}")')
            else:
                entries.append(f"({name} {d.kind.value})")
        parts.append("(domains " + " ".join(entries) + ")")
    if sig.predicates:
        entries = []
        for name, p in sig.predicates:
            entries.append(f"({name} {p.arity}{'' if p.strict else ' nonstrict'})")
        parts.append("(predicates " + " ".join(entries) + ")")
    return "\n".join(parts)


def render_file(ff: FormulaFile) -> str:
    head = render_signature(ff.signature)
    body = render(ff.formula)
    return f"{head}\n{body}\n" if head else f"{body}\n"


def normalize_whitespace(text: str) -> str:
    """Collapse whitespace and drop comments, for textual round-trip comparisons."""
    return " ".join(t.text if t.kind != "str" else f'"{t.text}"' for t in _tokenize(text)).replace(
        "( ", "(").replace(" )", ")")


# ---------------------------------------------------------------------------
# Variables, substitution, renaming


def term_symbols(t: Term) -> Iterator[str]:
    if isinstance(t, Var):
        yield t.name
    else:
        yield t.head
        for a in t.args:
            yield from term_symbols(a)


def free_symbols(f: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    """Names occurring free (parameters, free function symbols and free variables)."""
    if isinstance(f, Atom):
        return {s for a in f.args for s in term_symbols(a) if s not in bound}
    if isinstance(f, Not):
        return free_symbols(f.body, bound)
    if isinstance(f, Binary):
        return free_symbols(f.left, bound) | free_symbols(f.right, bound)
    if isinstance(f, Quantified):
        return free_symbols(f.body, bound | {f.var})
    raise TypeError(f"not a formula: {f!r}")


def all_symbols(f: Formula) -> set[str]:
    """Every name in ``f``, free or bound."""
    if isinstance(f, Atom):
        return {s for a in f.args for s in term_symbols(a)}
    if isinstance(f, Not):
        return all_symbols(f.body)
    if isinstance(f, Binary):
        return all_symbols(f.left) | all_symbols(f.right)
    if isinstance(f, Quantified):
        return all_symbols(f.body) | {f.var}
    raise TypeError(f"not a formula: {f!r}")


_SUFFIX_RE = re.compile(r"^(.*?)_(\d+)$")


class NameSupply:
    """Fresh-name generator: ``base``, then ``base_1``, ``base_2``, ...

    Names handed out are never reused; the counter only grows.
    """

    def __init__(self, used: set[str] | None = None):
        self.used: set[str] = set(used or ())
        self._counters: dict[str, int] = {}

    def reserve(self, names) -> None:
        self.used.update(names)

    def fresh(self, base: str) -> str:
        m = _SUFFIX_RE.match(base)
        if m and m.group(1):
            base = m.group(1)
        if base not in self.used:
            self.used.add(base)
            return base
        k = self._counters.get(base, 0)
        while True:
            k += 1
            cand = f"{base}_{k}"
            if cand not in self.used:
                self._counters[base] = k
                self.used.add(cand)
                return cand


def substitute_term(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    args = tuple(substitute_term(a, mapping) for a in t.args)
    if t.head in mapping:
        r = mapping[t.head]
        if isinstance(r, Var):
            return App(r.name, args)
        return App(r.head, r.args + args)
    return App(t.head, args)


def substitute(f: Formula, mapping: dict[str, Term], supply: NameSupply | None = None) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free names."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(substitute_term(a, mapping) for a in f.args), f.strict)
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping, supply))
    if isinstance(f, Binary):
        return type(f)(substitute(f.left, mapping, supply), substitute(f.right, mapping, supply))
    if isinstance(f, Quantified):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        incoming = {s for v in inner.values() for s in term_symbols(v)}
        var, body = f.var, f.body
        if var in incoming:
            supply = supply or NameSupply(all_symbols(f) | incoming | set(mapping))
            new = supply.fresh(var)
            body = substitute(body, {var: Var(new)}, supply)
            var = new
        return type(f)(var, f.domain, substitute(body, inner, supply))
    raise TypeError(f"not a formula: {f!r}")


def rename_apart(f: Formula, supply: NameSupply | None = None) -> Formula:
    """Rename bound variables so that every binder is distinct from every other
    binder and from every free symbol.  Names are kept when already unique."""
    supply = supply or NameSupply(free_symbols(f))
    return _rename(f, {}, supply)


def _rename(f: Formula, env: dict[str, str], supply: NameSupply) -> Formula:
    if isinstance(f, Atom):
        mapping = {k: Var(v) for k, v in env.items() if k != v}
        return substitute(f, mapping) if mapping else f
    if isinstance(f, Not):
        return Not(_rename(f.body, env, supply))
    if isinstance(f, Binary):
        return type(f)(_rename(f.left, env, supply), _rename(f.right, env, supply))
    if isinstance(f, Quantified):
        new = supply.fresh(f.var)
        return type(f)(new, f.domain, _rename(f.body, {**env, f.var: new}, supply))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Prenex form


def split_prefix(f: Formula) -> tuple[list[Quantifier], Formula]:
    prefix: list[Quantifier] = []
    while isinstance(f, Quantified):
        prefix.append(Quantifier("forall" if isinstance(f, ForAll) else "exists", f.var, f.domain))
        f = f.body
    return prefix, f


def wrap_prefix(prefix: Sequence[Quantifier], matrix: Formula) -> Formula:
    for q in reversed(prefix):
        matrix = (ForAll if q.kind == "forall" else Exists)(q.var, q.domain, matrix)
    return matrix


def _merge_prefixes(a: list[Quantifier], b: list[Quantifier]) -> list[Quantifier]:
    """Interleave two independent prefixes, preserving the order inside each.

    Chooses the interleaving that minimises, lexicographically, (number of
    quantifier blocks up to the last non-compact quantifier, number of
    compact quantifiers standing in front of non-compact ones).  Ties go to
    the left operand.
    """
    if not a:
        return list(b)
    if not b:
        return list(a)

    nc_a = [0] * (len(a) + 1)
    for i in range(len(a) - 1, -1, -1):
        nc_a[i] = nc_a[i + 1] + (not a[i].domain.is_compact)
    nc_b = [0] * (len(b) + 1)
    for j in range(len(b) - 1, -1, -1):
        nc_b[j] = nc_b[j + 1] + (not b[j].domain.is_compact)

    @lru_cache(maxsize=None)
    def best(i: int, j: int, last: str | None) -> tuple[tuple[int, int], tuple[int, ...]]:
        if i == len(a) and j == len(b):
            return (0, 0), ()
        options = []
        for side in (0, 1):
            if side == 0 and i < len(a):
                q, ni, nj = a[i], i + 1, j
            elif side == 1 and j < len(b):
                q, ni, nj = b[j], i, j + 1
            else:
                continue
            remaining = nc_a[ni] + nc_b[nj]
            counted = (not q.domain.is_compact) or remaining > 0
            blocks = 1 if counted and q.kind != last else 0
            penalty = remaining if q.domain.is_compact else 0
            nlast = q.kind if counted else last
            (cb, cp), path = best(ni, nj, nlast)
            options.append(((cb + blocks, cp + penalty), (side,) + path))
        return min(options, key=lambda o: o[0])

    _, path = best(0, 0, None)
    best.cache_clear()
    out, i, j = [], 0, 0
    for side in path:
        if side == 0:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    return out


def _prenex(f: Formula) -> tuple[list[Quantifier], Formula]:
    if isinstance(f, Atom):
        return [], f
    if isinstance(f, Not):
        p, m = _prenex(f.body)
        return [q.flipped() for q in p], Not(m)
    if isinstance(f, (And, Or)):
        pl, ml = _prenex(f.left)
        pr, mr = _prenex(f.right)
        return _merge_prefixes(pl, pr), type(f)(ml, mr)
    if isinstance(f, Implies):
        pl, ml = _prenex(f.left)
        pr, mr = _prenex(f.right)
        return _merge_prefixes([q.flipped() for q in pl], pr), Implies(ml, mr)
    if isinstance(f, Quantified):
        p, m = _prenex(f.body)
        kind = "forall" if isinstance(f, ForAll) else "exists"
        return [Quantifier(kind, f.var, f.domain)] + p, m
    raise TypeError(f"not a formula: {f!r}")


def prenex(f: Formula) -> Formula:
    """Logically equivalent formula with every quantifier in front (over
    nonempty domains).  Bound variables are renamed apart first; among the
    admissible quantifier orders the one with fewest alternations of
    non-compact blocks is chosen, with compact quantifiers pushed inward."""
    f = rename_apart(f)
    prefix, matrix = _prenex(f)
    return wrap_prefix(prefix, matrix)


# ---------------------------------------------------------------------------
# Classification


class Complexity(Enum):
    PI1 = "Pi1"
    PI2 = "Pi2"
    PI3 = "Pi3"
    OTHER = "Other"


@dataclass(frozen=True)
class ComplexityClass:
    value: Complexity
    witness: tuple[Quantifier, ...]
    """The prenex prefix up to the last non-compact quantifier (the compact
    tail is part of the matrix)."""

    def __str__(self) -> str:
        return f"{self.value.value}: " + " ".join(map(str, self.witness))


def quantifier_blocks(prefix: Sequence[Quantifier]) -> list[str]:
    blocks: list[str] = []
    for q in prefix:
        if not blocks or blocks[-1] != q.kind:
            blocks.append(q.kind)
    return blocks


def significant_prefix(prefix: Sequence[Quantifier]) -> list[Quantifier]:
    last = max((i for i, q in enumerate(prefix) if not q.domain.is_compact), default=-1)
    return list(prefix[: last + 1])


def classify(f: Formula) -> ComplexityClass:
    prefix, _ = split_prefix(prenex(f))
    sig = significant_prefix(prefix)
    blocks = quantifier_blocks(sig)
    if blocks and blocks[0] == "exists":
        blocks = ["forall"] + blocks
    level = max(len(blocks), 1)
    value = {1: Complexity.PI1, 2: Complexity.PI2, 3: Complexity.PI3}.get(level, Complexity.OTHER)
    return ComplexityClass(value, tuple(sig))


def alternations(f: Formula) -> int:
    """Number of quantifier-kind changes in the prenex prefix."""
    prefix, _ = split_prefix(prenex(f))
    return max(len(quantifier_blocks(prefix)) - 1, 0)


def outer_prefix(f: Formula) -> tuple[list[Quantifier], Formula]:
    """Split off the leading universal quantifiers over outer domains."""
    prefix: list[Quantifier] = []
    while isinstance(f, ForAll) and f.domain.kind is DomainKind.OUTER:
        prefix.append(Quantifier("forall", f.var, f.domain))
        f = f.body
    return prefix, f


def has_inner_outer(f: Formula) -> bool:
    """True if an outer-domain quantifier occurs anywhere below the outer prefix."""
    _, body = outer_prefix(f)

    def walk(g: Formula) -> bool:
        if isinstance(g, Atom):
            return False
        if isinstance(g, Not):
            return walk(g.body)
        if isinstance(g, Binary):
            return walk(g.left) or walk(g.right)
        return g.domain.kind is DomainKind.OUTER or walk(g.body)

    return walk(body)
