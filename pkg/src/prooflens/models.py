"""Finite-model semantics: the truth-value oracle used to test the
syntactic transformations.

Base domains are interpreted as carriers ``{0, ..., k-1}``.  A function
domain is interpreted as the set of *all* total maps, each map stored as a
tuple indexed by the position of its argument in the source carrier.

Besides evaluation in a single model, the module evaluates a formula in all
predicate tables at once: each table bit (a predicate applied to a tuple of
carrier elements) is a BDD variable, and the truth value of a formula is the
BDD of the set of tables where it holds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from dd.autoref import BDD

from .dialectica import Binder, DialecticaForm, embed
from .formula import (
    And,
    App,
    Atom,
    Binary,
    DomainKind,
    DomainTag,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    Quantified,
    Quantifier,
    Term,
    Var,
    outer_prefix,
    render,
    split_prefix,
    wrap_prefix,
)

Value = object  # int for base carriers, tuple for maps


SIZE_BITS = 1 << 12


class CarrierTooLarge(ValueError):
    """A function-space carrier would exceed the configured cap."""


class UnassignedSymbol(ValueError):
    pass


# ---------------------------------------------------------------------------
# Carriers


@dataclass
class Carriers:
    sizes: Mapping[str, int]
    cap: int = 729
    max_depth: int = 2
    _cache: dict = field(default_factory=dict, repr=False)

    def elements(self, d: DomainTag) -> list[Value]:
        key = d.name
        hit = self._cache.get(key)
        if hit is not None:
            return hit[0]
        if d.is_function:
            if d.order > self.max_depth:
                raise CarrierTooLarge(f"{d.name} is nested deeper than {self.max_depth} levels")
            src, dst = self.elements(d.src), self.elements(d.dst)
            if len(dst) ** len(src) > self.cap:
                raise CarrierTooLarge(
                    f"{d.name} has {len(dst)}^{len(src)} elements (cap {self.cap})")
            elems: list[Value] = list(itertools.product(dst, repeat=len(src)))
        else:
            if d.name not in self.sizes:
                raise UnassignedSymbol(f"no carrier assigned to domain {d.name}")
            elems = list(range(self.sizes[d.name]))
        index = None if not d.is_function else {v: i for i, v in enumerate(elems)}
        self._cache[key] = (elems, index)
        return elems

    def indexer(self, d: DomainTag) -> Callable[[Value], int] | None:
        """Position of a value in the carrier; ``None`` means the identity."""
        self.elements(d)
        index = self._cache[d.name][1]
        return None if index is None else index.__getitem__

    def size(self, d: DomainTag) -> int:
        """Number of elements; ``OverflowError`` beyond ``2**SIZE_BITS``."""
        if not d.is_function:
            return self.sizes[d.name]
        base, exp = self.size(d.dst), self.size(d.src)
        if base > 1 and exp * (base.bit_length() - 1) > SIZE_BITS:
            raise OverflowError(f"{d.name} has more than 2^{SIZE_BITS} elements")
        return base ** exp


def base_domains(d: DomainTag) -> Iterator[DomainTag]:
    if d.is_function:
        yield from base_domains(d.src)
        yield from base_domains(d.dst)
    else:
        yield d


def formula_domains(f: Formula) -> dict[str, DomainTag]:
    """Base domains occurring in the quantifiers of ``f``, by name."""
    out: dict[str, DomainTag] = {}

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            return
        if isinstance(g, Not):
            walk(g.body)
        elif isinstance(g, Binary):
            walk(g.left)
            walk(g.right)
        else:
            for b in base_domains(g.domain):
                out.setdefault(b.name, b)
            walk(g.body)

    walk(f)
    return out


# ---------------------------------------------------------------------------
# Compilation to closures


@dataclass(frozen=True)
class _Algebra:
    """Truth values: ``0``/``1`` for a single model, BDD nodes over the
    table bits for all tables at once.  Both support ``&``, ``|`` and ``==``."""

    true: object
    false: object
    neg: Callable[[object], object]


BOOL = _Algebra(1, 0, lambda x: 1 ^ x)


class _Compiler:
    def __init__(self, carriers: Carriers, constants: Mapping[str, Value],
                 functions: Mapping[str, Callable[..., Value]],
                 atom: Callable[[str, tuple], object], alg: _Algebra = BOOL):
        self.carriers = carriers
        self.constants = constants
        self.functions = functions
        self.atom = atom
        self.alg = alg

    def term(self, t: Term, bound: Mapping[str, DomainTag]):
        if isinstance(t, Var):
            name = t.name
            if name in bound:
                return lambda env: env[name]
            if name in self.constants:
                v = self.constants[name]
                return lambda env: v
            raise UnassignedSymbol(f"no value assigned to {name}")
        args = [self.term(a, bound) for a in t.args]
        head = t.head
        if head in bound:
            d = bound[head]
            steps = []
            for _ in args:
                if not d.is_function:
                    raise UnassignedSymbol(f"{head} applied to too many arguments")
                steps.append(self.carriers.indexer(d.src))
                d = d.dst

            def apply(env, args=args, steps=steps, head=head):
                v = env[head]
                for a, ix in zip(args, steps):
                    x = a(env)
                    v = v[x if ix is None else ix(x)]
                return v

            return apply
        if head in self.functions:
            fn = self.functions[head]
            return lambda env: fn(*(a(env) for a in args))
        raise UnassignedSymbol(f"no interpretation for function symbol {head}")

    def formula(self, f: Formula, bound: Mapping[str, DomainTag]):
        T, F, neg = self.alg.true, self.alg.false, self.alg.neg
        if isinstance(f, Atom):
            args = [self.term(a, bound) for a in f.args]
            pred, atom = f.pred, self.atom
            return lambda env: atom(pred, tuple(a(env) for a in args))
        if isinstance(f, Not):
            body = self.formula(f.body, bound)
            return lambda env: neg(body(env))
        if isinstance(f, And):
            l, r = self.formula(f.left, bound), self.formula(f.right, bound)

            def conj(env):
                a = l(env)
                return F if a == F else a & r(env)

            return conj
        if isinstance(f, Or):
            l, r = self.formula(f.left, bound), self.formula(f.right, bound)

            def disj(env):
                a = l(env)
                return T if a == T else a | r(env)

            return disj
        if isinstance(f, Implies):
            l, r = self.formula(f.left, bound), self.formula(f.right, bound)

            def imp(env):
                a = neg(l(env))
                return T if a == T else a | r(env)

            return imp
        if isinstance(f, Quantified):
            elems = self.carriers.elements(f.domain)
            body = self.formula(f.body, {**bound, f.var: f.domain})
            var = f.var
            if isinstance(f, ForAll):
                def forall(env):
                    acc = T
                    for v in elems:
                        env[var] = v
                        acc = acc & body(env)
                        if acc == F:
                            break
                    return acc

                return forall

            def exists(env):
                acc = F
                for v in elems:
                    env[var] = v
                    acc = acc | body(env)
                    if acc == T:
                        break
                return acc

            return exists
        raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Single models


@dataclass
class FiniteModel:
    """Carrier sizes per base domain name, the true tuples of each predicate,
    and interpretations of free constants and function symbols."""

    sizes: Mapping[str, int]
    predicates: Mapping[str, Iterable[tuple]] = field(default_factory=dict)
    constants: Mapping[str, Value] = field(default_factory=dict)
    functions: Mapping[str, Callable[..., Value]] = field(default_factory=dict)
    cap: int = 729
    max_depth: int = 2

    def __post_init__(self) -> None:
        self.predicates = {k: frozenset(map(tuple, v)) for k, v in self.predicates.items()}
        self.carriers = Carriers(self.sizes, self.cap, self.max_depth)

    def _atom(self, pred: str, args: tuple) -> int:
        table = self.predicates.get(pred)
        if table is None:
            raise UnassignedSymbol(f"no table for predicate {pred}")
        return 1 if args in table else 0


def finite_model_eval(f: Formula, m: FiniteModel) -> bool:
    """Tarskian truth of the closed formula ``f`` in ``m``."""
    fn = _Compiler(m.carriers, m.constants, m.functions, m._atom).formula(f, {})
    return bool(fn({}))


# ---------------------------------------------------------------------------
# All predicate tables at once


class TableSpace:
    """Every interpretation of the given predicates over fixed carriers.

    ``arg_domains[p]`` lists the argument domains of predicate ``p``; there
    is one boolean table bit per predicate and argument tuple.  A formula is
    evaluated to a BDD over those bits, so two formulas agree on all tables
    iff their BDDs are the same node.
    """

    def __init__(self, carriers: Carriers, arg_domains: Mapping[str, Sequence[DomainTag]],
                 order: Mapping[str, Sequence[int]] | None = None):
        self.carriers = carriers
        self.arg_domains = dict(arg_domains)
        self.offsets: dict[str, tuple[int, list[tuple[Callable | None, int]]]] = {}
        total = 0
        keys: list[tuple[tuple[int, ...], int]] = []
        for rank, p in enumerate(sorted(self.arg_domains)):
            doms = list(self.arg_domains[p])
            radix = []
            weight = 1
            for d in reversed(doms):
                radix.append((None if not d.is_function else carriers.indexer(d), weight))
                weight *= carriers.size(d)
            radix.reverse()
            self.offsets[p] = (total, radix)
            perm = tuple(order.get(p, range(len(doms)))) if order else tuple(range(len(doms)))
            sizes = [carriers.size(d) for d in doms]
            for j, idx in enumerate(itertools.product(*(range(n) for n in sizes))):
                keys.append((tuple(idx[k] for k in perm) + (rank,), total + j))
            total += weight
        self.bits = total
        self.bdd = BDD()
        # Variable order decides BDD size; atoms sharing their inner arguments
        # are placed next to each other.
        self.bdd.declare(*(f"t{i}" for _, i in sorted(keys)))
        self.alg = _Algebra(self.bdd.true, self.bdd.false, lambda x: ~x)

    def bit(self, pred: str, args: tuple) -> int:
        base, radix = self.offsets[pred]
        i = base
        for a, (ix, w) in zip(args, radix):
            i += (a if ix is None else ix(a)) * w
        return i

    def evaluate(self, f: Formula, constants: Mapping[str, Value] | None = None,
                 functions: Mapping[str, Callable[..., Value]] | None = None):
        """The set of tables in which ``f`` holds, as a BDD."""
        var = self.bdd.var
        bit = self.bit

        def atom(pred: str, args: tuple):
            return var(f"t{bit(pred, args)}")

        return _Compiler(self.carriers, constants or {}, functions or {}, atom,
                         self.alg).formula(f, {})({})

    def count(self, u) -> int:
        return self.bdd.count(u, nvars=self.bits) if self.bits else int(u == self.bdd.true)

    def table(self, assignment: Mapping[str, bool]) -> dict[str, list[tuple]]:
        """Predicate tables for a (partial) bit assignment; unset bits are false."""
        out = {}
        for p, doms in self.arg_domains.items():
            elems = [self.carriers.elements(d) for d in doms]
            out[p] = [args for args in itertools.product(*elems)
                      if assignment.get(f"t{self.bit(p, args)}", False)]
        return out


# ---------------------------------------------------------------------------
# Atom abstraction


def _term_domain(t: Term, bound: Mapping[str, DomainTag]) -> DomainTag:
    if isinstance(t, Var):
        return bound[t.name]
    d = bound[t.head]
    for _ in t.args:
        d = d.dst
    return d


def _closed(t: Term, bound: Mapping[str, DomainTag]) -> bool:
    if isinstance(t, Var):
        return t.name in bound
    return t.head in bound and all(_closed(a, bound) for a in t.args)


def _kept(t: Term, bound: Mapping[str, DomainTag]) -> list[Term]:
    if _closed(t, bound):
        return [t]
    if isinstance(t, Var):
        return []
    out = [Var(t.head)] if t.head in bound else []
    for a in t.args:
        out += _kept(a, bound)
    return out


def abstract_atoms(f: Formula) -> tuple[Formula, dict[str, tuple[DomainTag, ...]]]:
    """Replace every atom by a fresh predicate over the subterms built from
    bound variables only; free constants and function symbols are dropped.

    Syntactically equal atoms get the same predicate.  The result is a
    formula over predicates only, suited to exhaustive table enumeration.
    """
    names: dict[str, str] = {}
    sigs: dict[str, tuple[DomainTag, ...]] = {}

    def walk(g: Formula, bound: dict[str, DomainTag]) -> Formula:
        if isinstance(g, Atom):
            args: list[Term] = []
            for a in g.args:
                for k in _kept(a, bound):
                    if k not in args:
                        args.append(k)
            key = render(Atom(g.pred, tuple(args)))
            doms = tuple(_term_domain(a, bound) for a in args)
            if key not in names:
                names[key] = f"A{len(names)}"
                sigs[names[key]] = doms
            return Atom(names[key], tuple(args), g.strict)
        if isinstance(g, Not):
            return Not(walk(g.body, bound))
        if isinstance(g, Binary):
            return type(g)(walk(g.left, bound), walk(g.right, bound))
        if isinstance(g, Quantified):
            if g.domain.kind is DomainKind.OUTER:
                inner = {k: v for k, v in bound.items() if k != g.var}
                return type(g)(g.var, g.domain, walk(g.body, inner))
            return type(g)(g.var, g.domain, walk(g.body, {**bound, g.var: g.domain}))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, {}), sigs


def argument_order(f: Formula) -> dict[str, tuple[int, ...]]:
    """For each predicate, its argument positions sorted from the most deeply
    bound argument outwards (at the first occurrence)."""
    out: dict[str, tuple[int, ...]] = {}

    def depth(t: Term, depths: Mapping[str, int]) -> int:
        if isinstance(t, Var):
            return depths.get(t.name, -1)
        return max([depths.get(t.head, -1)] + [depth(a, depths) for a in t.args])

    def walk(g: Formula, depths: dict[str, int]) -> None:
        if isinstance(g, Atom):
            if g.pred not in out:
                ds = [depth(a, depths) for a in g.args]
                out[g.pred] = tuple(sorted(range(len(ds)), key=lambda k: (-ds[k], k)))
        elif isinstance(g, Not):
            walk(g.body, depths)
        elif isinstance(g, Binary):
            walk(g.left, depths)
            walk(g.right, depths)
        else:
            walk(g.body, {**depths, g.var: len(depths)})

    walk(f, {})
    return out


def predicate_domains(f: Formula) -> dict[str, tuple[DomainTag, ...]]:
    """Argument domains of each predicate of a formula whose atoms have
    only closed arguments (as produced by :func:`abstract_atoms`)."""
    out: dict[str, tuple[DomainTag, ...]] = {}

    def walk(g: Formula, bound: dict[str, DomainTag]) -> None:
        if isinstance(g, Atom):
            doms = tuple(_term_domain(a, bound) for a in g.args)
            if out.setdefault(g.pred, doms) != doms:
                raise ValueError(f"predicate {g.pred} used at two different types")
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, Binary):
            walk(g.left, bound)
            walk(g.right, bound)
        else:
            walk(g.body, {**bound, g.var: g.domain})

    walk(f, {})
    return out


# ---------------------------------------------------------------------------
# Choice reduction of witness blocks


def _occurrences(t: Term, names: set[str], out: dict[str, list], bare: set[str]) -> None:
    if isinstance(t, Var):
        if t.name in names:
            bare.add(t.name)
        return
    if t.head in names:
        out.setdefault(t.head, []).append(t.args)
    for a in t.args:
        _occurrences(a, names, out, bare)


def _formula_terms(f: Formula) -> Iterator[Term]:
    if isinstance(f, Atom):
        yield from f.args
    elif isinstance(f, Not):
        yield from _formula_terms(f.body)
    elif isinstance(f, Binary):
        yield from _formula_terms(f.left)
        yield from _formula_terms(f.right)
    else:
        yield from _formula_terms(f.body)


def _rewrite(t: Term, cut: Mapping[str, int]) -> Term:
    if isinstance(t, Var):
        return t
    args = tuple(_rewrite(a, cut) for a in t.args)
    k = cut.get(t.head)
    if k is None:
        return App(t.head, args)
    rest = args[k:]
    return App(t.head, rest) if rest else Var(t.head)


def _rewrite_formula(f: Formula, cut: Mapping[str, int]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_rewrite(a, cut) for a in f.args), f.strict)
    if isinstance(f, Not):
        return Not(_rewrite_formula(f.body, cut))
    if isinstance(f, Binary):
        return type(f)(_rewrite_formula(f.left, cut), _rewrite_formula(f.right, cut))
    return type(f)(f.var, f.domain, _rewrite_formula(f.body, cut))


def _best_chain(candidates: list[Binder], witnesses: Sequence[Binder],
                cost: Callable[[DomainTag], float] | None) -> list[Binder]:
    """Chain of candidates (by inclusion of argument sets) leaving the
    cheapest product of unreduced witness carriers; without a cost, the
    longest chain."""
    best: list[Binder] = []
    best_key: tuple | None = None
    n = len(candidates)
    for mask in range(1 << n) if n <= 12 else [(1 << n) - 1]:
        pick = sorted((candidates[i] for i in range(n) if mask >> i & 1), key=lambda b: len(b.deps))
        if any(not set(a.deps) <= set(b.deps) for a, b in zip(pick, pick[1:])):
            continue
        chosen = {b.name for b in pick}
        if cost is None:
            key = (-len(pick),)
        else:
            total = 1.0
            for w in witnesses:
                if w.name not in chosen:
                    total *= cost(w.domain)
            key = (total, -len(pick))
        if best_key is None or key < best_key:
            best, best_key = pick, key
    return best


def reduce_witnesses(d: DialecticaForm, cost: Callable[[DomainTag], float] | None = None) -> Formula:
    """A formula equivalent to ``embed(d)`` in which witnesses are chosen
    pointwise where that is sound.

    A witness ``W`` whose every occurrence is ``W(c1, ..., ck, ...)`` with the
    same challenge variables ``c1..ck`` is replaced by an existential over its
    value type placed right after those challenges, provided the argument
    sets of all replaced witnesses form a chain under inclusion (so that the
    universal block can be reordered to put each set first).  Remaining
    witnesses stay as existentials over function spaces in front; ``cost``
    (carrier size of a domain) picks the chain that keeps those cheapest.
    """
    challenge_names = {b.name for b in d.challenges}
    wnames = {b.name for b in d.witnesses}
    occ: dict[str, list] = {}
    bare: set[str] = set()
    for t in _formula_terms(d.matrix):
        _occurrences(t, wnames, occ, bare)

    candidates: list[Binder] = []
    for b in d.witnesses:
        k = len(b.deps)
        if k == 0:
            candidates.append(b)
            continue
        if b.name in bare or not set(b.deps) <= challenge_names or len(set(b.deps)) != k:
            continue
        lead = tuple(Var(x) for x in b.deps)
        if all(len(args) >= k and tuple(args[:k]) == lead for args in occ.get(b.name, [])):
            candidates.append(b)

    chain = _best_chain(candidates, d.witnesses, cost)
    reduced = {b.name for b in chain}

    prefix = list(d.outer)
    prefix += [Quantifier("exists", b.name, b.domain) for b in d.witnesses if b.name not in reduced]
    placed: set[str] = set()
    by_name = {b.name: b for b in d.challenges}
    for b in chain:
        for x in b.deps:
            if x not in placed:
                prefix.append(Quantifier("forall", x, by_name[x].domain))
                placed.add(x)
        dom = b.domain
        for _ in b.deps:
            dom = dom.dst
        prefix.append(Quantifier("exists", b.name, dom))
    for c in d.challenges:
        if c.name not in placed:
            prefix.append(Quantifier("forall", c.name, c.domain))
    cut = {b.name: len(b.deps) for b in chain}
    return wrap_prefix(prefix, _rewrite_formula(d.matrix, cut))


def _pull(prefix: list[Quantifier], matrix: Formula, p: int
          ) -> tuple[list[Quantifier], Formula] | None:
    q = prefix[p]
    occ: dict[str, list] = {}
    bare: set[str] = set()
    for t in _formula_terms(matrix):
        _occurrences(t, {q.var}, occ, bare)
    if q.var in bare:
        return None
    uses = occ.get(q.var, [])
    if not uses:
        return prefix[:p] + prefix[p + 1:], matrix
    k = 0
    while all(len(a) > k and isinstance(a[k], Var) and a[k] == uses[0][k] for a in uses):
        k += 1
    lead = [a.name for a in uses[0][:k]]
    if k == 0 or len(set(lead)) != k:
        return None
    pos = {x.var: i for i, x in enumerate(prefix)}
    if any(x not in pos for x in lead):
        return None
    dom = q.domain
    for _ in range(k):
        dom = dom.dst
    y = Quantifier(q.kind, q.var, dom)
    after = [x for x in lead if pos[x] > p]
    s_end = p + 1
    while s_end < len(prefix) and prefix[s_end].kind == q.kind:
        s_end += 1
    o_end = s_end
    while o_end < len(prefix) and prefix[o_end].kind != q.kind:
        o_end += 1
    if not after:
        block, lo, hi = [], p + 1, p + 1
    elif all(pos[x] < s_end for x in after):
        block, lo, hi = prefix[p + 1:s_end], p + 1, s_end
    elif all(s_end <= pos[x] < o_end for x in after):
        block, lo, hi = prefix[s_end:o_end], s_end, o_end
    else:
        return None
    first = [x for x in block if x.var in after]
    rest = [x for x in block if x.var not in after]
    new = prefix[:p] + prefix[p + 1:lo] + first + [y] + rest + prefix[hi:]
    return new, _rewrite_formula(matrix, {q.var: k})


def pull_functions(f: Formula) -> Formula:
    """Replace function-type quantifiers that are only ever applied to the
    same variables by quantifiers over their value types.

    Works on a prenex formula.  A variable ``Y`` whose every occurrence is
    ``Y(u1, ..., uk, ...)`` becomes a variable of the type left after ``k``
    arguments, placed right after ``u1..uk``.  This is sound when the ``u``
    are bound before ``Y``, in the block of ``Y``'s own kind that follows
    it, or in the block of the other kind after that.  The last case covers
    both choice (``exists Y forall u`` to ``forall u exists y``) and its
    dual (``forall Z exists u`` to ``exists u forall z``); each is an
    equivalence over finite nonempty carriers.  Unused quantifiers are
    dropped.  Applied until nothing changes.
    """
    prefix, matrix = split_prefix(f)
    prefix = list(prefix)
    progress = True
    while progress:
        progress = False
        for p, q in enumerate(prefix):
            if q.domain.is_function:
                step = _pull(prefix, matrix, p)
                if step is not None:
                    prefix, matrix = step
                    progress = True
                    break
    return wrap_prefix(prefix, matrix)


# ---------------------------------------------------------------------------
# Equivalence over all tables


@dataclass(frozen=True)
class EquivalenceReport:
    """Outcome of comparing two formulas over every table of every carrier
    assignment.  ``skipped`` lists carrier assignments that could not be
    evaluated, with the reason."""

    formula: str
    assignments: int
    tables: int
    mismatches: int
    skipped: tuple[tuple[str, str], ...] = ()
    counterexample: dict | None = None

    @property
    def equivalent(self) -> bool:
        return self.mismatches == 0

    @property
    def exhaustive(self) -> bool:
        return not self.skipped


def carrier_assignments(domains: Iterable[str], max_size: int = 3) -> Iterator[dict[str, int]]:
    names = sorted(set(domains))
    for sizes in itertools.product(range(1, max_size + 1), repeat=len(names)):
        yield dict(zip(names, sizes))


def compare_all_tables(f: Formula, g: Formula | Callable[[Carriers], Formula],
                       max_size: int = 3, cap: int = 729,
                       label: str | None = None) -> EquivalenceReport:
    """Evaluate ``f`` and ``g`` (predicate-only formulas over the same
    predicates) in every table of every carrier assignment with sizes
    ``1..max_size`` and count disagreements.  ``g`` may be a function of the
    carriers, for formulas whose best evaluation order depends on them."""
    make_g = g if callable(g) else (lambda _c: g)
    probe = make_g(Carriers({}, cap))
    doms = set(formula_domains(f)) | set(formula_domains(probe))
    preds = predicate_domains(f)
    order = argument_order(f)
    for p, ds in predicate_domains(probe).items():
        if preds.setdefault(p, ds) != ds:
            raise ValueError(f"predicate {p} has different types in the two formulas")
    for ds in preds.values():
        for d in ds:
            doms.update(b.name for b in base_domains(d))
    assignments = 0
    tables = mismatches = 0
    skipped: list[tuple[str, str]] = []
    counterexample = None
    for sizes in carrier_assignments(doms, max_size):
        carriers = Carriers(sizes, cap)
        try:
            space = TableSpace(carriers, preds, order)
            u, v = space.evaluate(f), space.evaluate(make_g(carriers))
            diff = (u & ~v) | (~u & v)
        except CarrierTooLarge as exc:
            skipped.append((",".join(f"{k}={v}" for k, v in sizes.items()), str(exc)))
            continue
        assignments += 1
        tables += 1 << space.bits
        if diff != space.bdd.false:
            mismatches += space.count(diff)
            if counterexample is None:
                counterexample = {"sizes": dict(sizes), "tables": space.table(space.bdd.pick(diff))}
    return EquivalenceReport(label or render(f), assignments, tables, mismatches,
                             tuple(skipped), counterexample)


def carrier_cost(carriers: Carriers) -> Callable[[DomainTag], float]:
    def cost(d: DomainTag) -> float:
        try:
            return float(carriers.size(d))
        except (KeyError, OverflowError):
            return float("inf")

    return cost


def nd_equivalence(f: Formula, max_size: int = 3, cap: int = 729,
                   reduce: bool = True, label: str | None = None) -> EquivalenceReport:
    """Compare ``f`` with its re-quantified ND translation over all tables,
    after abstracting atoms to predicates."""
    from .dialectica import nd

    # The outer prefix is carried through unchanged and abstracted atoms
    # cannot mention its variables, so only the body is compared.
    _, body = outer_prefix(f)
    g, _ = abstract_atoms(body)
    d = nd(g)
    if reduce:
        def h(c: Carriers) -> Formula:
            return pull_functions(reduce_witnesses(d, carrier_cost(c) if c.sizes else None))
    else:
        h = embed(d)
    return compare_all_tables(g, h, max_size, cap, label)
