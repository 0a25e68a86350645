"""Canonical rational functions backed by flint's multivariate polynomials.

A :class:`RationalFunction` is a pair ``num/den`` of ``fmpq_mpoly`` living in
a *space*: a sorted tuple of symbols together with the flint context whose
generators follow that order.  After every operation the pair is reduced by
its gcd and the denominator is scaled to a primitive integer polynomial whose leading
coefficient (under the block order below) is positive.  Equal rational functions therefore have equal
pairs once both are pruned to the symbols they actually use.

Block order: opaque symbols dominate jets, which dominate dependents, then
independents, then parameters; inside a block monomials compare by total
degree and then lexicographically.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

import flint

from ..errors import DivisionByZeroPolynomial
from .symbols import (
    RANK_DEPENDENT,
    RANK_INDEPENDENT,
    RANK_JET,
    RANK_OPAQUE,
    RANK_PARAMETER,
    SYMBOL_TYPES,
    Opaque,
    Symbol,
    sort_key,
    sorted_symbols,
)

_BY_NAME: dict = {}
_SPACES: dict = {}
_UNIONS: dict = {}


def _fmpq(v) -> flint.fmpq:
    if isinstance(v, flint.fmpq):
        return v
    v = Fraction(v)
    return flint.fmpq(v.numerator, v.denominator)


def _frac(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class Space:
    """A sorted symbol tuple with its flint context (interned)."""

    __slots__ = ("syms", "ctx", "index", "blocks", "names")

    def __init__(self, syms: tuple):
        self.syms = syms
        self.names = tuple(s.key_name() for s in syms)
        for n, s in zip(self.names, syms):
            _BY_NAME.setdefault(n, s)
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names or ("_",), "lex")
        self.index = {s: i for i, s in enumerate(syms)}
        blocks = []
        for rank in (RANK_OPAQUE, RANK_JET, RANK_DEPENDENT, RANK_INDEPENDENT, RANK_PARAMETER):
            idx = [i for i, s in enumerate(syms) if s.rank == rank]
            if idx:
                blocks.append(tuple(reversed(idx)))
        self.blocks = tuple(blocks)

    @property
    def nvars(self) -> int:
        return len(self.syms)

    def gen(self, s: Symbol):
        return self.ctx.gen(self.index[s])

    def zero(self):
        return self.ctx.from_dict({})

    def one(self):
        return self.ctx.constant(1)

    def normalizer(self, p):
        """Scalar making ``p`` primitive over the integers with positive leading coefficient."""
        coeffs = p.coeffs()
        lcm = 1
        g = 0
        for c in coeffs:
            lcm = math.lcm(lcm, int(c.q))
        for c in coeffs:
            g = math.gcd(g, int(c.p) * (lcm // int(c.q)))
        scale = flint.fmpq(lcm, g)
        if self.leading_coefficient(p) < 0:
            scale = -scale
        return scale

    def leading_coefficient(self, p):
        """Leading coefficient under the block order."""
        terms = p.to_dict()
        if len(terms) == 1:
            return next(iter(terms.values()))
        best = None
        best_c = None
        for exps, c in terms.items():
            key = tuple((sum(exps[i] for i in blk), tuple(exps[i] for i in blk)) for blk in self.blocks)
            if best is None or key > best:
                best, best_c = key, c
        return best_c


def space_of(symbols: Iterable[Symbol]) -> Space:
    key = sorted_symbols(symbols)
    sp = _SPACES.get(key)
    if sp is None:
        sp = Space(key)
        _SPACES[key] = sp
    return sp


def union(a: Space, b: Space) -> Space:
    if a is b:
        return a
    k = (id(a), id(b))
    sp = _UNIONS.get(k)
    if sp is None:
        if set(b.syms) <= set(a.syms):
            sp = a
        elif set(a.syms) <= set(b.syms):
            sp = b
        else:
            sp = space_of(a.syms + b.syms)
        _UNIONS[k] = sp
    return sp


def union_all(spaces: Iterable[Space]) -> Space:
    syms: set = set()
    for sp in spaces:
        syms.update(sp.syms)
    return space_of(syms)


EMPTY = space_of(())


def lift(p, src: Space, dst: Space):
    if src is dst:
        return p
    if not src.syms:
        return dst.ctx.constant(p.leading_coefficient() if not p.is_zero() else 0)
    return p.project_to_context(dst.ctx)


class RationalFunction:
    """Reduced quotient of two polynomials with a normalized denominator."""

    __slots__ = ("space", "num", "den", "_key")

    def __init__(self, space: Space, num, den, _canonical: bool = False):
        self.space = space
        self._key = None
        if _canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = _canonicalize(space, num, den)

    # construction -----------------------------------------------------
    @staticmethod
    def constant(v) -> "RationalFunction":
        return RationalFunction(EMPTY, EMPTY.ctx.constant(_fmpq(v)), EMPTY.one(), True)

    @staticmethod
    def symbol(s: Symbol) -> "RationalFunction":
        sp = space_of((s,))
        return RationalFunction(sp, sp.gen(s), sp.one(), True)

    @staticmethod
    def poly(space: Space, p) -> "RationalFunction":
        return RationalFunction(space, p, space.one(), True)

    # inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        if self.num.is_zero():
            return Fraction(0)
        return _frac(self.num.leading_coefficient()) / _frac(self.den.leading_coefficient())

    def free_symbols(self) -> frozenset:
        used = set()
        for p in (self.num, self.den):
            if p.is_zero() or p.is_constant():
                continue
            for i, d in enumerate(p.degrees()):
                if d:
                    used.add(self.space.syms[i])
        return frozenset(used)

    def depends_on(self, pred) -> bool:
        return any(pred(s) for s in self.free_symbols())

    def numerator(self) -> "RationalFunction":
        return RationalFunction(self.space, self.num, self.space.one(), True)

    def denominator(self) -> "RationalFunction":
        return RationalFunction(self.space, self.den, self.space.one(), True)

    def primitive(self) -> "RationalFunction":
        """Numerator scaled to an integer primitive polynomial with positive leading coefficient."""
        if self.num.is_zero():
            return self
        num = self.num * self.space.normalizer(self.num)
        return RationalFunction(self.space, num, self.space.one(), True).pruned()

    def pruned(self) -> "RationalFunction":
        sp = space_of(self.free_symbols())
        if sp is self.space:
            return self
        return RationalFunction(sp, lift(self.num, self.space, sp), lift(self.den, self.space, sp), True)

    def in_space(self, sp: Space) -> "RationalFunction":
        if sp is self.space:
            return self
        return RationalFunction(sp, lift(self.num, self.space, sp), lift(self.den, self.space, sp), True)

    def node_count(self) -> int:
        return len(self.num) + len(self.den)

    def key(self):
        """Hashable canonical form: sorted (monomial, coefficient) lists."""
        if self._key is None:
            r = self.pruned()
            self._key = (_poly_key(r.space, r.num), _poly_key(r.space, r.den))
        return self._key

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = as_rf(other)
            except TypeError:
                return NotImplemented
        return (self - other).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __bool__(self):
        return not self.is_zero()

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        return as_rf(other)

    def __add__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        sp = union(self.space, other.space)
        an, ad = lift(self.num, self.space, sp), lift(self.den, self.space, sp)
        bn, bd = lift(other.num, other.space, sp), lift(other.den, other.space, sp)
        if ad == bd:
            return RationalFunction(sp, an + bn, ad)
        if ad.is_constant() and bd.is_constant():
            return RationalFunction(sp, an * bd + bn * ad, ad * bd)
        g = ad.gcd(bd)
        if g.is_one():
            return RationalFunction(sp, an * bd + bn * ad, ad * bd)
        ad1, bd1 = ad / g, bd / g
        return RationalFunction(sp, an * bd1 + bn * ad1, ad1 * bd)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.space, -self.num, self.den, True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return ZERO_RF
        sp = union(self.space, other.space)
        an, ad = lift(self.num, self.space, sp), lift(self.den, self.space, sp)
        bn, bd = lift(other.num, other.space, sp), lift(other.den, other.space, sp)
        if ad.is_constant() and bd.is_constant():
            return RationalFunction(sp, an * bn, ad * bd)
        # cross-cancel first to keep the products small
        g1 = an.gcd(bd)
        g2 = bn.gcd(ad)
        if not g1.is_one():
            an, bd = an / g1, bd / g1
        if not g2.is_one():
            bn, ad = bn / g2, ad / g2
        num, den = _scale(sp, an * bn, ad * bd)
        return RationalFunction(sp, num, den, True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise DivisionByZeroPolynomial("inverse of the zero rational function")
        num, den = _scale(self.space, self.den, self.num)
        return RationalFunction(self.space, num, den, True)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        k = int(k)
        if k == 0:
            return ONE_RF
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.space, self.num**k, self.den**k, True)

    # calculus ---------------------------------------------------------
    def diff(self, s: Symbol) -> "RationalFunction":
        """Formal partial derivative with the opaque chain rule."""
        sp = self.space
        dn, sp2 = _poly_diff(sp, self.num, s)
        if self.den.is_constant():
            return RationalFunction(sp2, dn, sp2.one(), True)
        dd, sp3 = _poly_diff(sp, self.den, s)
        spx = union(sp2, sp3)
        n = lift(self.num, sp, spx)
        d = lift(self.den, sp, spx)
        dn = lift(dn, sp2, spx)
        dd = lift(dd, sp3, spx)
        return RationalFunction(spx, dn * d - n * dd, d * d)

    def subs(self, bindings: Mapping[Symbol, "RationalFunction"], rename_opaque: bool = True) -> "RationalFunction":
        return substitute_rf(self, bindings, rename_opaque)

    def evaluate(self, point: Mapping[Symbol, Fraction]) -> Fraction:
        vals = [_fmpq(point[s]) if s in point else None for s in self.space.syms]
        used = self.free_symbols()
        for s, v in zip(self.space.syms, vals):
            if v is None and s in used:
                raise KeyError(s)
        vals = [v if v is not None else flint.fmpq(0) for v in vals]
        d = _eval_poly(self.den, vals)
        if d == 0:
            raise DivisionByZeroPolynomial("evaluation hit a zero denominator")
        return _frac(_eval_poly(self.num, vals)) / _frac(d)

    # jet structure ----------------------------------------------------
    def split(self, variables: Iterable[Symbol]) -> dict:
        """Group the numerator by monomials in ``variables``.

        Returns ``{monomial: coefficient}`` where a monomial is a tuple of
        ``(symbol, exponent)`` pairs sorted by symbol order and coefficients
        are rational functions free of ``variables`` (the denominator is
        folded into each coefficient).  The denominator must not involve the
        grouping variables.
        """
        sp = self.space
        idx = [sp.index[v] for v in variables if v in sp.index]
        if any(self.den.degrees()[i] for i in idx) if not self.den.is_constant() else False:
            raise ValueError("denominator depends on the grouping variables")
        groups: dict = {}
        for exps, c in self.num.to_dict().items():
            mono = tuple((i, exps[i]) for i in idx if exps[i])
            rest = list(exps)
            for i in idx:
                rest[i] = 0
            groups.setdefault(mono, {})[tuple(rest)] = c
        out = {}
        for mono, terms in groups.items():
            key = tuple(sorted(((sp.syms[i], e) for i, e in mono), key=lambda t: sort_key(t[0])))
            out[key] = RationalFunction(sp, sp.ctx.from_dict(terms), self.den)
        return out

    def degree_in(self, variables: Iterable[Symbol]) -> int:
        idx = [self.space.index[v] for v in variables if v in self.space.index]
        if self.num.is_zero():
            return -1
        if not idx:
            return 0
        return int(max(sum(e[i] for i in idx) for e in self.num.monoms()))

    def low_degree_in(self, variables: Iterable[Symbol]) -> int:
        idx = [self.space.index[v] for v in variables if v in self.space.index]
        if self.num.is_zero():
            return -1
        if not idx:
            return 0
        return int(min(sum(e[i] for i in idx) for e in self.num.monoms()))

    def homogeneous_part(self, variables: Iterable[Symbol], degree: int) -> "RationalFunction":
        sp = self.space
        idx = [sp.index[v] for v in variables if v in sp.index]
        terms = {e: c for e, c in self.num.to_dict().items() if sum(e[i] for i in idx) == degree}
        return RationalFunction(sp, sp.ctx.from_dict(terms), self.den)

    # conversion -------------------------------------------------------
    def to_expr(self):
        from .tree import Const, Sym, add, mul, power

        r = self.pruned()

        def poly_expr(p):
            terms = []
            for exps, c in sorted(p.to_dict().items(), key=lambda t: _print_order(t[0])):
                fs = [Const(_frac(c))]
                for i, e in enumerate(exps):
                    if e:
                        fs.append(power(Sym(r.space.syms[i]), e))
                terms.append(mul(*fs))
            return add(*terms)

        n = poly_expr(r.num)
        if r.den.is_one():
            return n
        return mul(n, power(poly_expr(r.den), -1))

    def __str__(self):
        return str(self.to_expr())

    def __repr__(self):
        return f"RationalFunction({self})"


RationalNormalForm = RationalFunction


def _print_order(exps):
    return (-sum(exps), tuple(-e for e in exps))


def _poly_key(sp: Space, p):
    items = []
    for exps, c in p.to_dict().items():
        mono = tuple((sp.names[i], e) for i, e in enumerate(exps) if e)
        items.append((mono, (int(c.p), int(c.q))))
    items.sort()
    return tuple(items)


def _eval_poly(p, vals):
    if p.is_zero():
        return flint.fmpq(0)
    total = flint.fmpq(0)
    for exps, c in p.to_dict().items():
        t = c
        for v, e in zip(vals, exps):
            if e:
                t = t * v**e
        total += t
    return total


def _canonicalize(sp: Space, num, den):
    if den.is_zero():
        raise DivisionByZeroPolynomial("denominator normalizes to the zero polynomial")
    if num.is_zero():
        return sp.zero(), sp.one()
    if den.is_constant():
        c = den.leading_coefficient()
        if c != 1:
            num = num / c
        return num, sp.one()
    g = num.gcd(den)
    if not g.is_one():
        num = num / g
        den = den / g
        if den.is_constant():
            c = den.leading_coefficient()
            return (num / c if c != 1 else num), sp.one()
    c = sp.normalizer(den)
    if c != 1:
        num = num * c
        den = den * c
    return num, den


def _scale(sp: Space, num, den):
    # inputs already coprime; only the scalar normalisation may be off
    if den.is_constant():
        c = den.leading_coefficient()
        return (num / c if c != 1 else num), sp.one()
    c = sp.normalizer(den)
    if c != 1:
        return num * c, den * c
    return num, den


def _poly_diff(sp: Space, p, s: Symbol):
    """d p / d s in a (possibly enlarged) space."""
    if p.is_zero() or p.is_constant():
        return sp.zero(), sp
    degs = p.degrees()
    new_terms = []  # (opaque var index, new opaque symbol)
    for i, t in enumerate(sp.syms):
        if isinstance(t, Opaque) and degs[i] and s in t.args:
            for slot, a in enumerate(t.args, 1):
                if a == s:
                    new_terms.append((i, t.derivative(slot)))
    sp2 = space_of(sp.syms + tuple(t for _, t in new_terms)) if new_terms else sp
    q = lift(p, sp, sp2)
    out = sp2.zero()
    if s in sp.index and degs[sp.index[s]]:
        out = q.derivative(sp2.index[s])
    for i, t in new_terms:
        out = out + q.derivative(sp2.index[sp.syms[i]]) * sp2.gen(t)
    return out, sp2


def substitute_rf(r: RationalFunction, bindings: Mapping[Symbol, RationalFunction], rename_opaque: bool = True) -> RationalFunction:
    """Simultaneous substitution of symbols by rational functions."""
    sp = r.space
    used = r.free_symbols()
    binds = {k: as_rf(v) for k, v in bindings.items() if k in used or (rename_opaque and isinstance(k, SYMBOL_TYPES))}
    renames = {}
    if rename_opaque:
        for k, v in bindings.items():
            v = as_rf(v)
            if not isinstance(k, Opaque) and v.is_polynomial():
                s = _as_single_symbol(v)
                if s is not None and not isinstance(s, Opaque):
                    renames[k] = s
    images: dict = {}
    for s in sp.syms:
        if s not in used:
            continue
        if s in binds:
            images[s] = binds[s]
        elif isinstance(s, Opaque) and renames and any(a in renames for a in s.args):
            images[s] = RationalFunction.symbol(s.with_args(renames.get(a, a) for a in s.args))
    if not images:
        return r
    keep = [s for s in sp.syms if s not in images]
    target = union_all([space_of(keep)] + [im.space for im in images.values()])
    polys_n = []
    polys_d = []
    for s in sp.syms:
        if s in images:
            im = images[s]
            polys_n.append(lift(im.num, im.space, target))
            polys_d.append(lift(im.den, im.space, target))
        else:
            polys_n.append(target.gen(s) if s in target.index else target.zero())
            polys_d.append(None)
    rational = [i for i, d in enumerate(polys_d) if d is not None and not d.is_one()]
    if not rational:
        args = polys_n
        num = r.num.compose(*args, ctx=target.ctx) if sp.syms else lift(r.num, sp, target)
        den = r.den.compose(*args, ctx=target.ctx) if sp.syms else lift(r.den, sp, target)
        return RationalFunction(target, num, den)
    # group rational images by common denominator and homogenise per group
    groups: list = []
    for i in rational:
        d = polys_d[i]
        for g in groups:
            if g[0] == d:
                g[1].append(i)
                break
        else:
            groups.append([d, [i]])
    num, nshift = _homogenized_compose(r.num, sp, target, polys_n, groups)
    den, dshift = _homogenized_compose(r.den, sp, target, polys_n, groups)
    # value = num / prod q^nshift  divided by  den / prod q^dshift
    for (q, _), a, b in zip(groups, nshift, dshift):
        k = b - a
        if k > 0:
            num = num * q**k
        elif k < 0:
            den = den * q ** (-k)
    return RationalFunction(target, num, den)


def _homogenized_compose(p, sp: Space, target: Space, polys_n, groups):
    if p.is_zero():
        return target.zero(), [0] * len(groups)
    terms = p.to_dict()
    degs = []
    for _, idx in groups:
        degs.append(max(sum(e[i] for i in idx) for e in terms))
    extra = tuple(f"~h{k}" for k in range(len(groups)))
    hctx = flint.fmpq_mpoly_ctx.get(sp.names + extra, "lex")
    hterms = {}
    for e, c in terms.items():
        tail = tuple(D - sum(e[i] for i in idx) for (_, idx), D in zip(groups, degs))
        hterms[tuple(e) + tail] = c
    hp = hctx.from_dict(hterms)
    args = list(polys_n) + [q for q, _ in groups]
    return hp.compose(*args, ctx=target.ctx), degs


def _as_single_symbol(v: RationalFunction):
    if not v.den.is_one() or len(v.num) != 1:
        return None
    (exps, c), = v.num.to_dict().items()
    if c != 1 or sum(exps) != 1:
        return None
    return v.space.syms[list(exps).index(1)]


def as_rf(v) -> RationalFunction:
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(v, (int, Fraction, flint.fmpq)):
        return RationalFunction.constant(v)
    if isinstance(v, SYMBOL_TYPES):
        return RationalFunction.symbol(v)
    from .tree import Expr

    if isinstance(v, Expr):
        return expr_to_rf(v)
    raise TypeError(f"cannot interpret {v!r} as a rational function")


def expr_to_rf(e) -> RationalFunction:
    """Normal form of a tree expression, evaluated inside a single space."""
    from .tree import Add, Const, Mul, Pow, Sym

    sp = space_of(e.free_symbols())
    memo: dict = {}

    def go(node) -> RationalFunction:
        hit = memo.get(id(node))
        if hit is not None:
            return hit[1]
        if isinstance(node, Const):
            out = RationalFunction(sp, sp.ctx.constant(_fmpq(node.value)), sp.one(), True)
        elif isinstance(node, Sym):
            out = RationalFunction(sp, sp.gen(node.symbol), sp.one(), True)
        elif isinstance(node, Add):
            # sum polynomial parts directly, rational parts pairwise
            poly = sp.zero()
            rest = None
            for t in node.terms:
                v = go(t)
                if v.den.is_one():
                    poly = poly + v.num
                else:
                    rest = v if rest is None else rest + v
            out = RationalFunction(sp, poly, sp.one(), True)
            if rest is not None:
                out = out + rest
        elif isinstance(node, Mul):
            out = None
            for f in node.factors:
                v = go(f)
                out = v if out is None else out * v
        elif isinstance(node, Pow):
            out = go(node.base) ** node.exp
        else:
            raise TypeError(type(node))
        memo[id(node)] = (node, out)
        return out

    return go(e)


ZERO_RF = RationalFunction.constant(0)
ONE_RF = RationalFunction.constant(1)


def normalize(e) -> RationalFunction:
    """Canonical rational normal form of an expression."""
    return as_rf(e).pruned()


def symbol_for_name(name: str) -> Symbol:
    return _BY_NAME[name]
