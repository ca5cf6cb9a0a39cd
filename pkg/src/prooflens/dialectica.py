"""Skolemization, the ND (Dialectica) translation and witness-form extraction."""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import (
    And,
    App,
    Atom,
    Binary,
    Complexity,
    DomainKind,
    DomainTag,
    Exists,
    ForAll,
    Formula,
    Implies,
    NameSupply,
    Not,
    Or,
    OuterQuantifierError,
    Quantified,
    Quantifier,
    Term,
    Var,
    all_symbols,
    classify,
    curried,
    fun_domain,
    outer_prefix,
    render,
    rename_apart,
    substitute,
    wrap_prefix,
)


@dataclass(frozen=True)
class Binder:
    """A variable of the witness or challenge block.

    For witnesses, ``deps`` names the challenge variables the witness is
    applied to (as leading arguments) at every occurrence in the matrix.
    """

    name: str
    domain: DomainTag
    deps: tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.name}:{self.domain.name}"


@dataclass(frozen=True)
class DialecticaForm:
    """``forall outer . exists witnesses . forall challenges . matrix``."""

    witnesses: tuple[Binder, ...]
    challenges: tuple[Binder, ...]
    matrix: Formula
    outer: tuple[Quantifier, ...] = ()
    source: Formula | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return render(embed(self))


def _capital(name: str) -> str:
    return name[:1].upper() + name[1:]


class _Translator:
    def __init__(self, supply: NameSupply):
        self.supply = supply

    def lift(self, old: str) -> str:
        """Name for a variable that replaces ``old``, which disappears."""
        if old[:1].isupper() or not old[:1].isalpha():
            return old
        return self.supply.fresh(_capital(old))

    def nd(self, f: Formula) -> tuple[list[Binder], list[Binder], Formula]:
        if isinstance(f, Atom):
            return [], [], f
        if isinstance(f, Or):
            return self.nd(Not(And(Not(f.left), Not(f.right))))
        if isinstance(f, Exists):
            return self.nd(Not(ForAll(f.var, f.domain, Not(f.body))))
        if isinstance(f, And):
            wa, ca, ma = self.nd(f.left)
            wb, cb, mb = self.nd(f.right)
            return wa + wb, ca + cb, And(ma, mb)
        if isinstance(f, Not):
            w, c, m = self.nd(f.body)
            ys = tuple(b.name for b in w)
            yvars = tuple(Var(y) for y in ys)
            new_w, mapping = [], {}
            for x in c:
                if ys:
                    name = self.lift(x.name)
                    new_w.append(Binder(name, curried([b.domain for b in w], x.domain), ys))
                    mapping[x.name] = App(name, yvars)
                else:
                    new_w.append(Binder(x.name, x.domain))
            new_c = [Binder(b.name, b.domain) for b in w]
            return new_w, new_c, Not(substitute(m, mapping))
        if isinstance(f, Implies):
            wa, ca, ma = self.nd(f.left)
            wb, cb, mb = self.nd(f.right)
            ys = [b.name for b in wa]
            us = [b.name for b in cb]
            new_w: list[Binder] = []
            left_map: dict[str, Term] = {}
            args = tuple(Var(v) for v in ys + us)
            arg_doms = [b.domain for b in wa] + [b.domain for b in cb]
            for x in ca:
                if args:
                    name = self.lift(x.name)
                    new_w.append(Binder(name, curried(arg_doms, x.domain), tuple(ys + us)))
                    left_map[x.name] = App(name, args)
                else:
                    new_w.append(Binder(x.name, x.domain))
            right_map: dict[str, Term] = {}
            yargs = tuple(Var(v) for v in ys)
            for v in wb:
                if ys:
                    name = self.lift(v.name)
                    new_w.append(Binder(name, curried([b.domain for b in wa], v.domain),
                                        tuple(ys) + v.deps))
                    right_map[v.name] = App(name, yargs)
                else:
                    new_w.append(v)
            new_c = [Binder(b.name, b.domain) for b in wa] + list(cb)
            return new_w, new_c, Implies(substitute(ma, left_map), substitute(mb, right_map))
        if isinstance(f, ForAll):
            w, c, m = self.nd(f.body)
            new_w, mapping = [], {}
            for y in w:
                name = self.lift(y.name)
                new_w.append(Binder(name, fun_domain(f.domain, y.domain), (f.var,) + y.deps))
                mapping[y.name] = App(name, (Var(f.var),))
            return new_w, [Binder(f.var, f.domain)] + c, substitute(m, mapping)
        raise TypeError(f"not a formula: {f!r}")


def nd(f: Formula) -> DialecticaForm:
    """ND translation.  A leading block of universal quantifiers over outer
    domains is carried through unchanged as ``outer``."""
    outer, body = outer_prefix(f)
    _check_no_inner_outer(body)
    body = rename_apart(body)
    tr = _Translator(NameSupply(all_symbols(body) | {q.var for q in outer}))
    w, c, m = tr.nd(body)
    return DialecticaForm(tuple(w), tuple(c), m, tuple(outer), f)


def _check_no_inner_outer(body: Formula) -> None:
    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            return
        if isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, Binary):
            walk(g.left)
            walk(g.right)
        else:
            if g.domain.kind is DomainKind.OUTER:
                raise OuterQuantifierError(
                    f"quantifier over outer domain {g.domain.name} below the outer prefix")
            walk(g.body)

    walk(body)


def embed(d: DialecticaForm) -> Formula:
    """Re-quantify a form as ``forall outer exists witnesses forall challenges matrix``."""
    prefix = list(d.outer)
    prefix += [Quantifier("exists", b.name, b.domain) for b in d.witnesses]
    prefix += [Quantifier("forall", b.name, b.domain) for b in d.challenges]
    return wrap_prefix(prefix, d.matrix)


def render_form(d: DialecticaForm) -> str:
    """Formula-file text for a form, with the block structure in comments."""
    lines = []
    if d.outer:
        lines.append("; outer prefix (carried unchanged): " + " ".join(q.var for q in d.outer))
    for b in d.witnesses:
        dep = f" applied to ({' '.join(b.deps)})" if b.deps else ""
        lines.append(f"; witness {b.name} : {b.domain.name}{dep}")
    for b in d.challenges:
        lines.append(f"; challenge {b.name} : {b.domain.name}")
    lines.append(render(embed(d)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Skolemization


class _Skolemizer:
    def __init__(self, supply: NameSupply):
        self.supply = supply

    def stretch(self, f: Formula) -> Formula:
        hoisted, g = self.walk(f, [])
        return wrap_prefix([Quantifier("exists", n, d) for n, d in hoisted], g)

    def walk(self, f: Formula, univs: list[tuple[str, DomainTag]]
             ) -> tuple[list[tuple[str, DomainTag]], Formula]:
        if isinstance(f, Atom):
            return [], f
        if isinstance(f, Not):
            return [], Not(self.stretch(f.body))
        if isinstance(f, Implies):
            h, right = self.walk(f.right, univs)
            return h, Implies(self.stretch(f.left), right)
        if isinstance(f, (And, Or)):
            hl, left = self.walk(f.left, univs)
            hr, right = self.walk(f.right, univs)
            return hl + hr, type(f)(left, right)
        if isinstance(f, ForAll):
            h, body = self.walk(f.body, univs + [(f.var, f.domain)])
            return h, ForAll(f.var, f.domain, body)
        if isinstance(f, Exists):
            if f.domain.kind is DomainKind.COUNTABLE and univs:
                name = self.supply.fresh(_capital(f.var))
                dom = curried([d for _, d in univs], f.domain)
                term = App(name, tuple(Var(v) for v, _ in univs))
                h, body = self.walk(substitute(f.body, {f.var: term}), univs)
                return [(name, dom)] + h, body
            return [], Exists(f.var, f.domain, self.stretch(f.body))
        raise TypeError(f"not a formula: {f!r}")


def skolemize(f: Formula) -> Formula:
    """Replace each countable existential below universals by an existential
    over a function of the intervening universal variables.

    Hoisting happens within positive stretches of the formula; a negation,
    an antecedent or a kept existential starts a new stretch, and hoisted
    quantifiers are placed at the head of their stretch (after the outer
    prefix at top level).
    """
    outer, body = outer_prefix(f)
    body = rename_apart(body)
    sk = _Skolemizer(NameSupply(all_symbols(body) | {q.var for q in outer}))
    return wrap_prefix(outer, sk.stretch(body))


# ---------------------------------------------------------------------------
# Witness form of Pi2 statements


class NotPi2(ValueError):
    pass


@dataclass(frozen=True)
class WitnessProfile:
    challenges: tuple[Binder, ...]
    witnesses: tuple[Binder, ...]
    matrix: Formula
    outer: tuple[Quantifier, ...] = ()


def pi2_witness_form(d: DialecticaForm) -> WitnessProfile:
    """The ``(x, Y, matrix)`` reading ``forall x . matrix(x, Y(x))`` of a form
    whose source formula is Pi2 (or simpler)."""
    if d.source is not None:
        level = classify(d.source).value
        if level not in (Complexity.PI1, Complexity.PI2):
            raise NotPi2(f"source formula is {level.value}, not Pi2")
    return WitnessProfile(d.challenges, d.witnesses, d.matrix, d.outer)


def quantifier_free(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return quantifier_free(f.body)
    if isinstance(f, Binary):
        return quantifier_free(f.left) and quantifier_free(f.right)
    return False


def demorgan_or(f: Formula) -> Formula:
    """Rewrite every disjunction as a negated conjunction of negations."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(demorgan_or(f.body))
    if isinstance(f, Or):
        return Not(And(Not(demorgan_or(f.left)), Not(demorgan_or(f.right))))
    if isinstance(f, Binary):
        return type(f)(demorgan_or(f.left), demorgan_or(f.right))
    if isinstance(f, Quantified):
        return type(f)(f.var, f.domain, demorgan_or(f.body))
    raise TypeError(f"not a formula: {f!r}")
