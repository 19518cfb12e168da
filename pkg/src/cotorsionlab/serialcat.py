"""Interval combinatorics for the bound linear Nakayama algebra.

Indecomposables are interval modules [a, b] (support a..b, top at b, so
the stacked display of [3, 5] is 5/4/3).  Hom spaces between intervals
are at most one-dimensional with a canonical generator, which turns all
category-level questions into small exact linear algebra.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import primefield as pf
from . import repcore as rc
from .repcore import FieldChar, Module, Morphism, QuiverPresentation, SES


@dataclass(frozen=True, order=True)
class IndecId:
    """Interval [a, b]; display forms "[a,b]" and stacked "b/…/a"."""

    a: int
    b: int

    def __post_init__(self):
        if not (1 <= self.a <= self.b):
            raise ValueError(f"bad interval [{self.a},{self.b}]")

    @property
    def dim(self) -> int:
        return self.b - self.a + 1

    def as_interval(self) -> str:
        return f"[{self.a},{self.b}]"

    def as_stack(self) -> str:
        return "/".join(str(v) for v in range(self.b, self.a - 1, -1))

    def __str__(self):
        return self.as_interval()

    @staticmethod
    def parse(text: str) -> "IndecId":
        s = text.strip()
        m = re.fullmatch(r"\[\s*(\d+)\s*,\s*(\d+)\s*\]", s)
        if m:
            return IndecId(int(m.group(1)), int(m.group(2)))
        if re.fullmatch(r"\d+(\s*/\s*\d+)*", s):
            verts = [int(t) for t in s.split("/")]
            if verts != list(range(verts[0], verts[0] - len(verts), -1)):
                raise ValueError(f"stacked form must descend by 1: {text!r}")
            return IndecId(verts[-1], verts[0])
        raise ValueError(f"cannot parse interval {text!r}")


@dataclass(frozen=True)
class Obj:
    """Formal finite multiset of indecomposables; empty means zero object."""

    ids: tuple[IndecId, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(sorted(self.ids)))

    @staticmethod
    def of(*ids: IndecId) -> "Obj":
        return Obj(tuple(ids))

    @staticmethod
    def from_multiset(counts: dict[tuple[int, int], int]) -> "Obj":
        ids = []
        for (a, b), c in sorted(counts.items()):
            ids.extend([IndecId(a, b)] * c)
        return Obj(tuple(ids))

    @property
    def is_zero(self) -> bool:
        return not self.ids

    @property
    def total_dim(self) -> int:
        return sum(i.dim for i in self.ids)

    def multiset(self) -> dict[IndecId, int]:
        out: dict[IndecId, int] = {}
        for i in self.ids:
            out[i] = out.get(i, 0) + 1
        return out

    def plus(self, other: "Obj") -> "Obj":
        return Obj(self.ids + other.ids)

    def summands_in(self, ids: frozenset[IndecId] | set[IndecId]) -> bool:
        return all(i in ids for i in self.ids)

    def display(self) -> str:
        if not self.ids:
            return "0"
        return " + ".join(i.as_stack() for i in self.ids)

    def __str__(self):
        if not self.ids:
            return "0"
        return " + ".join(i.as_interval() for i in self.ids)


class CategoryCtx:
    """Immutable context for one algebra: indecomposables and Hom/Ext tables."""

    def __init__(self, presentation: QuiverPresentation, fieldc: FieldChar):
        self.presentation = presentation
        self.field = fieldc
        self.indecs: tuple[IndecId, ...] = tuple(
            IndecId(a, b)
            for a in range(1, presentation.n + 1)
            for b in range(a, presentation.n + 1)
            if presentation.admissible(a, b)
        )
        self._index = {x: i for i, x in enumerate(self.indecs)}
        self.projectives: tuple[IndecId, ...] = tuple(sorted(
            IndecId(presentation.proj_bottom(b), b) for b in range(1, presentation.n + 1)))
        self.injectives: tuple[IndecId, ...] = tuple(sorted(
            IndecId(a, presentation.inj_top(a)) for a in range(1, presentation.n + 1)))
        k = len(self.indecs)
        self._hom = np.zeros((k, k), dtype=np.int64)
        self._ext = np.zeros((k, k), dtype=np.int64)
        for i, x in enumerate(self.indecs):
            for j, y in enumerate(self.indecs):
                self._hom[i, j] = 1 if (x.a <= y.a <= x.b <= y.b) else 0
        for i, x in enumerate(self.indecs):
            for j, y in enumerate(self.indecs):
                self._ext[i, j] = self._ext_by_syzygy(x, y)
        self._realize_cache: dict[tuple[IndecId, ...], Module] = {}
        self._hom_basis_cache: dict[tuple, list[Morphism]] = {}

    # -- censuses -------------------------------------------------------

    def check_id(self, x: IndecId) -> IndecId:
        if x not in self._index:
            raise ValueError(f"{x} is not an indecomposable of this algebra")
        return x

    def projective_cover_id(self, x: IndecId) -> IndecId:
        return IndecId(self.presentation.proj_bottom(x.b), x.b)

    def syzygy_id(self, x: IndecId) -> IndecId | None:
        """First syzygy of [a,b] inside its projective cover, None if projective."""
        p_bottom = self.presentation.proj_bottom(x.b)
        if p_bottom == x.a:
            return None
        return IndecId(p_bottom, x.a - 1)

    # -- hom / ext ------------------------------------------------------

    def hom_dim(self, x: IndecId, y: IndecId) -> int:
        return int(self._hom[self._index[self.check_id(x)], self._index[self.check_id(y)]])

    def ext_dim(self, x: IndecId, y: IndecId) -> int:
        return int(self._ext[self._index[self.check_id(x)], self._index[self.check_id(y)]])

    def _ext_by_syzygy(self, x: IndecId, y: IndecId) -> int:
        """dim coker(Hom(P(b), y) -> Hom(syzygy(x), y)) for x = [a, b]."""
        omega = self.syzygy_id(x)
        if omega is None:
            return 0
        hom_omega = 1 if (omega.a <= y.a <= omega.b <= y.b) else 0
        if not hom_omega:
            return 0
        pcov = self.projective_cover_id(x)
        hom_p = 1 if (pcov.a <= y.a <= pcov.b <= y.b) else 0
        if not hom_p:
            return 1
        # restriction of the canonical P(b) -> y to the syzygy is nonzero
        # exactly when the overlap [y.a, omega.b] is nonempty, which holds
        # here since y.a <= omega.b; so the cokernel vanishes
        return 0

    def compose_canonical(self, x: IndecId, y: IndecId, z: IndecId) -> int:
        """Composition constant of canonical maps x->y->z: 1 if the
        composite is the canonical x->z map, else 0."""
        if not (self.hom_dim(x, y) and self.hom_dim(y, z)):
            raise ValueError("canonical maps do not exist")
        return 1 if z.a <= x.b else 0

    def canonical_hom(self, x: IndecId, y: IndecId) -> Morphism | None:
        """Quotient to [y.a, x.b] followed by inclusion into y, or None."""
        if not self.hom_dim(x, y):
            return None
        mx, my = self.realize_id(x), self.realize_id(y)
        comps = []
        for v in range(1, self.presentation.n + 1):
            rows, cols = my.dims[v - 1], mx.dims[v - 1]
            m = pf.zeros(rows, cols)
            if rows and cols and y.a <= v <= x.b:
                m[0, 0] = 1
            comps.append(m)
        return Morphism(mx, my, comps)

    # -- realization ----------------------------------------------------

    def realize_id(self, x: IndecId) -> Module:
        return self.realize(Obj.of(self.check_id(x)))

    def realize(self, o: Obj) -> Module:
        """Canonical module for an Obj: interval summands in sorted order."""
        key = o.ids
        hit = self._realize_cache.get(key)
        if hit is not None:
            return hit
        if not o.ids:
            m = rc.zero_module(self.presentation, self.field)
        else:
            parts = [rc.interval_module(self.presentation, self.field, i.a, i.b)
                     for i in o.ids]
            m, _, _ = rc.direct_sum(parts, self.presentation, self.field)
        self._realize_cache[key] = m
        return m

    def realize_seq(self, ids) -> tuple[Module, list[Morphism], list[Morphism]]:
        """Direct sum of interval modules in the given order (not sorted)."""
        parts = [rc.interval_module(self.presentation, self.field, i.a, i.b)
                 for i in ids]
        return rc.direct_sum(parts, self.presentation, self.field)

    def realize_with_embeddings(self, o: Obj) -> tuple[Module, list[Morphism], list[Morphism]]:
        return self.realize_seq(o.ids)

    def identify(self, m: Module) -> Obj:
        """Interval multiset of a module, via composite-map ranks."""
        if m.presentation != self.presentation or m.field != self.field:
            raise rc.ContextMismatchError("module lives over another category")
        counts = rc.interval_multiset(m)
        for (a, b) in counts:
            if not self.presentation.admissible(a, b):
                raise ValueError(f"module contains inadmissible interval [{a},{b}]")
        return Obj.from_multiset(counts)

    def identify_split(self, m: Module) -> tuple[Obj, rc.Decomposition]:
        """identify plus an explicit splitting (for basis transport)."""
        dec = rc.decompose(m)
        obj = Obj(tuple(IndecId(a, b) for a, b in dec.intervals))
        return obj, dec

    def canonical_iso_from(self, m: Module) -> tuple[Obj, Morphism, Morphism]:
        """(obj, iso: realize(obj) -> m, inverse iso)."""
        obj, dec = self.identify_split(m)
        total, incls, projs = self.realize_with_embeddings(obj)
        fwd = rc.zero_morphism(total, m)
        bwd = rc.zero_morphism(m, total)
        for k in range(len(dec.pieces)):
            fwd = fwd.add(projs[k].then(dec.incls[k]))
            bwd = bwd.add(dec.projs[k].then(incls[k]))
        # total was built from the cache-independent embeddings; re-anchor
        canon = self.realize(obj)
        fwd = Morphism(canon, m, fwd.comps, validate=False)
        bwd = Morphism(m, canon, bwd.comps, validate=False)
        return obj, fwd, bwd

    # -- hom bases between canonical objects ----------------------------

    def hom_basis(self, src: Obj, dst: Obj) -> list[Morphism]:
        key = (src.ids, dst.ids)
        hit = self._hom_basis_cache.get(key)
        if hit is None:
            hit = rc.hom_space(self.realize(src), self.realize(dst))
            self._hom_basis_cache[key] = hit
        return hit

    # -- extensions -----------------------------------------------------

    def ext_matrix_support(self, third: Obj, first: Obj) -> list[tuple[int, int]]:
        """Index pairs (i, j) with Ext(third[i], first[j]) nonzero."""
        out = []
        for i, x in enumerate(third.ids):
            for j, y in enumerate(first.ids):
                if self.ext_dim(x, y):
                    out.append((i, j))
        return out

    def ses_for_class(self, third: Obj, first: Obj,
                      coeffs: dict[tuple[int, int], int]) -> SES:
        """Realize the extension class sum(coeffs[i,j] * e_ij) as a short
        exact sequence first -> E -> third, by pushout along the projective
        presentation of `third`.  coeffs keys index (third summand, first
        summand); entries outside the Ext support must be absent or zero.
        """
        pres, fld = self.presentation, self.field
        p = fld.p
        support = set(self.ext_matrix_support(third, first))
        for key, val in coeffs.items():
            if val % p and key not in support:
                raise ValueError(f"coefficient at {key} is outside the Ext support")
        y_mod = self.realize(first)
        if third.is_zero:
            e = y_mod
            return SES(rc.identity(e), rc.zero_morphism(e, self.realize(third)))
        covers = [self.projective_cover_id(x) for x in third.ids]
        omegas = [self.syzygy_id(x) for x in third.ids]
        pmod, p_incls, p_projs = self.realize_seq(covers)
        omod, o_incls, o_projs = self.realize_seq([o for o in omegas if o is not None])
        x_mod = self.realize(third)
        _, x_incls, x_projs = self.realize_seq(third.ids)

        # iota: omega -> P, canonical inclusion summand by summand
        iota = rc.zero_morphism(omod, pmod)
        cover = rc.zero_morphism(pmod, x_mod)
        oj = 0
        for i, x in enumerate(third.ids):
            ci = covers[i]
            quot = self.canonical_hom(ci, x)
            cover = cover.add(p_projs[i].then(quot).then(x_incls[i]))
            if omegas[i] is not None:
                inc = self.canonical_hom(omegas[i], ci)
                iota = iota.add(o_projs[oj].then(inc).then(p_incls[i]))
                oj += 1

        # phi: omega -> first, canonical components scaled by the class
        _, f_incls, f_projs = self.realize_with_embeddings(first)
        phi = rc.zero_morphism(omod, y_mod)
        oj = 0
        for i, x in enumerate(third.ids):
            if omegas[i] is None:
                continue
            for j, y in enumerate(first.ids):
                c = coeffs.get((i, j), 0) % p
                if c:
                    can = self.canonical_hom(omegas[i], y)
                    if can is None:
                        raise ValueError("class generator missing (bug)")
                    phi = phi.add(o_projs[oj].then(can).then(f_incls[j]).scale(c))
            oj += 1

        py, incls, projs = rc.direct_sum([pmod, y_mod], pres, fld)
        h = rc.stack_morphisms_to_sum(
            [iota, phi.scale(p - 1)], py, incls)
        e_mod, q = rc.cokernel(h)
        u = incls[1].then(q)
        # v: E -> third, descends from (cover, 0)
        cover0 = rc.stack_morphisms_from_sum(
            [cover, rc.zero_morphism(y_mod, x_mod)], py, projs)
        vcomps = []
        for vtx in range(pres.n):
            sol = pf.solve_left(q.comps[vtx], cover0.comps[vtx], p)
            if sol is None:
                raise ArithmeticError("pushout projection failed (bug)")
            vcomps.append(sol)
        v = Morphism(e_mod, x_mod, vcomps)
        return SES(Morphism(y_mod, e_mod, u.comps), v)

    def extensions(self, x: IndecId, y: IndecId) -> list[Obj]:
        """Decomposed middle term for each class of Ext(x, y), split first."""
        self.check_id(x)
        self.check_id(y)
        middles = [Obj.of(x, y)]
        if self.ext_dim(x, y):
            for lam in range(1, self.field.p):
                ses = self.ses_for_class(Obj.of(x), Obj.of(y), {(0, 0): lam})
                middles.append(self.identify(ses.middle))
        return middles


def generate(presentation: QuiverPresentation, fieldc: FieldChar,
             validate: bool = False) -> CategoryCtx:
    """Build the category context; optionally cross-check the closed-form
    Hom/Ext tables against brute-force linear algebra."""
    ctx = CategoryCtx(presentation, fieldc)
    if validate:
        for x in ctx.indecs:
            for y in ctx.indecs:
                brute = rc.hom_dim_brute(ctx.realize_id(x), ctx.realize_id(y))
                if brute != ctx.hom_dim(x, y):
                    raise AssertionError(f"hom table wrong at ({x}, {y})")
                if ext_dim_brute(ctx, x, y) != ctx.ext_dim(x, y):
                    raise AssertionError(f"ext table wrong at ({x}, {y})")
    return ctx


def ext_dim_brute(ctx: CategoryCtx, x: IndecId, y: IndecId) -> int:
    """Ext dimension from an explicit projective presentation in repcore."""
    pcov = ctx.projective_cover_id(x)
    pmod = ctx.realize_id(pcov)
    xmod = ctx.realize_id(x)
    cover = ctx.canonical_hom(pcov, x)
    omod, oincl = rc.kernel(cover)
    ymod = ctx.realize_id(y)
    hom_o = rc.hom_space(omod, ymod)
    if not hom_o:
        return 0
    hom_p = rc.hom_space(pmod, ymod)
    if not hom_p:
        return len(hom_o)
    restricted = np.stack([oincl.then(h).vectorize() for h in hom_p], axis=1)
    return len(hom_o) - pf.rank(restricted, ctx.field.p)
