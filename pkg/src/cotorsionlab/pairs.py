"""Cotorsion pairs, twin pairs, and their heart classes.

Verification follows the two-sided contract: Ext-orthogonality on all
indecomposable pairs plus both approximation conflations witnessed for
every indecomposable of the algebra.  Heart membership is computed at
indecomposable level; membership of a general object means all its
summands are members (direct sums of conflations are conflations, so
this direction is always sound).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import repcore as rc
from .serialcat import CategoryCtx, IndecId, Obj
from .subcat import (SearchBounds, Subcategory, Verdict, find_left_approx,
                     find_right_approx, inter)


@dataclass
class CotorsionPair:
    u: Subcategory
    v: Subcategory
    verdict: Verdict
    # per-indecomposable witness conflations (live objects, not serialized):
    #   left[b]:  V_B -> U_B -> B     right[b]: B -> V^B -> U^B
    left: dict[IndecId, rc.SES] = field(default_factory=dict)
    right: dict[IndecId, rc.SES] = field(default_factory=dict)


def verify_cotorsion(ctx: CategoryCtx, u: Subcategory, v: Subcategory,
                     bounds: SearchBounds) -> CotorsionPair:
    """Check Ext-orthogonality and search both approximation conflations
    for every indecomposable of the algebra."""
    for x in sorted(u.ids):
        for y in sorted(v.ids):
            if ctx.ext_dim(x, y):
                verdict = Verdict(
                    status="fails",
                    route="orthogonality",
                    certificate={"kind": "orthogonality",
                                 "ext_nonzero": [str(x), str(y)],
                                 "u": u.display(), "v": v.display()},
                    bounds=bounds, exhaustive=True)
                return CotorsionPair(u, v, verdict)
    left: dict[IndecId, rc.SES] = {}
    right: dict[IndecId, rc.SES] = {}
    unwitnessed = []
    truncated = False
    for b in ctx.indecs:
        lv, lses = find_left_approx(ctx, b, u, v, bounds)
        rv, rses = find_right_approx(ctx, b, v, u, bounds)
        if lv.holds:
            left[b] = lses
        if rv.holds:
            right[b] = rses
        if not (lv.holds and rv.holds):
            unwitnessed.append(str(b))
            truncated = truncated or not (lv.exhaustive and rv.exhaustive)
    if unwitnessed:
        verdict = Verdict(
            status="unknown",
            route="approximation search",
            bounds=bounds,
            exhaustive=not truncated,
            notes=("unwitnessed indecomposables: " + ", ".join(unwitnessed),))
        return CotorsionPair(u, v, verdict)
    verdict = Verdict(status="holds", route="orthogonality + approximations",
                      bounds=bounds, exhaustive=True,
                      notes=(f"approximation conflations witnessed for all "
                             f"{len(ctx.indecs)} indecomposables",))
    return CotorsionPair(u, v, verdict, left, right)


@dataclass
class TwinPair:
    st: CotorsionPair
    uv: CotorsionPair
    w: Subcategory
    verdict: Verdict

    @property
    def s(self) -> Subcategory:
        return self.st.u

    @property
    def t(self) -> Subcategory:
        return self.st.v

    @property
    def u(self) -> Subcategory:
        return self.uv.u

    @property
    def v(self) -> Subcategory:
        return self.uv.v


def verify_twin(ctx: CategoryCtx, st: CotorsionPair, uv: CotorsionPair) -> TwinPair:
    """A twin needs S inside U; the core W is U intersect T."""
    w = inter(uv.u, st.v, name="W")
    if not st.verdict.holds or not uv.verdict.holds:
        bad = st if not st.verdict.holds else uv
        verdict = Verdict(status=bad.verdict.status, route="pair verification",
                          certificate=bad.verdict.certificate,
                          bounds=bad.verdict.bounds,
                          notes=bad.verdict.notes)
        return TwinPair(st, uv, w, verdict)
    missing = sorted(st.u.ids - uv.u.ids)
    if missing:
        verdict = Verdict(
            status="fails", route="inclusion S in U",
            certificate={"kind": "twin_inclusion",
                         "outside_u": [str(x) for x in missing]},
            exhaustive=True)
        return TwinPair(st, uv, w, verdict)
    notes = [f"core W = {w.display()}"]
    if w.ids == uv.u.ids and w.ids == st.v.ids:
        notes.append("core coincides with U and T")
    verdict = Verdict(status="holds", route="twin verification",
                      exhaustive=True, notes=tuple(notes))
    return TwinPair(st, uv, w, verdict)


def membership_bplus(ctx: CategoryCtx, x: IndecId, tp: TwinPair,
                     bounds: SearchBounds) -> tuple[Verdict, rc.SES | None]:
    """Conflation V -> W -> x with V in add(V), W in add(core)."""
    return find_left_approx(ctx, x, tp.w, tp.v, bounds)


def membership_bminus(ctx: CategoryCtx, x: IndecId, tp: TwinPair,
                      bounds: SearchBounds) -> tuple[Verdict, rc.SES | None]:
    """Conflation x -> W' -> S with W' in add(core), S in add(S)."""
    return find_right_approx(ctx, x, tp.w, tp.s, bounds)


@dataclass
class HeartTable:
    """Indecomposable-level membership for one twin's heart classes."""

    core: Subcategory
    bplus: dict[IndecId, Verdict]
    bminus: dict[IndecId, Verdict]
    bplus_witness: dict[IndecId, rc.SES]
    bminus_witness: dict[IndecId, rc.SES]

    def plus_ids(self) -> frozenset[IndecId]:
        return frozenset(x for x, v in self.bplus.items() if v.holds)

    def minus_ids(self) -> frozenset[IndecId]:
        return frozenset(x for x, v in self.bminus.items() if v.holds)

    def heart_ids(self) -> frozenset[IndecId]:
        return self.plus_ids() & self.minus_ids()

    def surviving_ids(self) -> frozenset[IndecId]:
        """Heart members that stay nonzero in the quotient by the core."""
        return self.heart_ids() - self.core.ids

    def tainted_ids(self) -> frozenset[IndecId]:
        """Ids whose non-membership rests on a truncated (non-complete) search."""
        out = set()
        for x in self.bplus:
            pv, mv = self.bplus[x], self.bminus[x]
            if (pv.unknown and not pv.exhaustive) or (mv.unknown and not mv.exhaustive):
                out.add(x)
        return frozenset(out)


def _heart_table(ctx: CategoryCtx, tp: TwinPair, bounds: SearchBounds) -> HeartTable:
    bplus, bminus = {}, {}
    wplus, wminus = {}, {}
    for x in ctx.indecs:
        pv, pses = membership_bplus(ctx, x, tp, bounds)
        mv, mses = membership_bminus(ctx, x, tp, bounds)
        bplus[x] = pv
        bminus[x] = mv
        if pses is not None:
            wplus[x] = pses
        if mses is not None:
            wminus[x] = mses
    return HeartTable(tp.w, bplus, bminus, wplus, wminus)


@dataclass
class HeartClasses:
    """Heart data of a twin plus the hearts of its two single pairs."""

    twin: TwinPair
    bounds: SearchBounds
    main: HeartTable     # core W = U cap T
    first: HeartTable    # heart of (S, T), core S cap T
    second: HeartTable   # heart of (U, V), core U cap V

    @property
    def w_ids(self) -> frozenset[IndecId]:
        return self.twin.w.ids

    def heart_surviving(self) -> frozenset[IndecId]:
        return self.main.surviving_ids()

    def check_core_identities(self) -> bool:
        """H cap U = W = H cap T at the indecomposable level."""
        h = self.main.heart_ids()
        return (h & self.twin.u.ids == self.w_ids
                and h & self.twin.t.ids == self.w_ids)


def degenerate_twin(ctx: CategoryCtx, pair: CotorsionPair) -> TwinPair:
    """The twin ((U,V),(U,V)) whose heart is the heart of the single pair."""
    return verify_twin(ctx, pair, pair)


def compute_hearts(ctx: CategoryCtx, tp: TwinPair,
                   bounds: SearchBounds) -> HeartClasses:
    """Membership tables for the twin's heart and both single-pair hearts."""
    if not tp.verdict.holds:
        raise ValueError("twin pair is not verified")
    main = _heart_table(ctx, tp, bounds)
    first = _heart_table(ctx, degenerate_twin(ctx, tp.st), bounds)
    second = _heart_table(ctx, degenerate_twin(ctx, tp.uv), bounds)
    return HeartClasses(tp, bounds, main, first, second)
