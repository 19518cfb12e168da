"""Summand-closed subcategories and bounded decision procedures.

A Subcategory is a set of indecomposable ids (automatically closed under
summands, always implicitly containing zero).  Membership of an object Z
in X*Y (one conflation X -> Z -> Y) is decided exactly by complete
submodule enumeration of Z.  Approximation searches enumerate extension
classes instead of raw surjections: every conflation with an
indecomposable end splits into a part whose kernel/cokernel uses each
ext-supporting indecomposable at most once plus a redundant split
summand, so subsets of the ext support with all-ones class coefficients
cover the whole search space.  A failed search is therefore complete
(flagged `exhaustive`) unless the dimension cap truncated it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import repcore as rc
from .serialcat import CategoryCtx, IndecId, Obj


@dataclass(frozen=True)
class SearchBounds:
    mult: int = 2
    dim_cap: int = 24

    def __post_init__(self):
        if self.mult < 1 or self.dim_cap < 1:
            raise ValueError("bounds must be at least 1")

    def payload(self) -> dict:
        return {"mult": self.mult, "dim_cap": self.dim_cap}


@dataclass(frozen=True)
class Subcategory:
    """Summand-closed class, given by its indecomposable ids."""

    ids: frozenset[IndecId]
    name: str = ""
    provenance: str = "literal"

    @staticmethod
    def of(ctx: CategoryCtx, ids, name: str = "", provenance: str = "literal") -> "Subcategory":
        checked = frozenset(ctx.check_id(i) for i in ids)
        return Subcategory(checked, name, provenance)

    @staticmethod
    def empty(name: str = "0") -> "Subcategory":
        return Subcategory(frozenset(), name, "empty")

    @staticmethod
    def everything(ctx: CategoryCtx, name: str = "mod A") -> "Subcategory":
        return Subcategory(frozenset(ctx.indecs), name, "all indecomposables")

    @staticmethod
    def projectives(ctx: CategoryCtx) -> "Subcategory":
        return Subcategory(frozenset(ctx.projectives), "proj", "projectives")

    @staticmethod
    def injectives(ctx: CategoryCtx) -> "Subcategory":
        return Subcategory(frozenset(ctx.injectives), "inj", "injectives")

    def sorted_ids(self) -> list[IndecId]:
        return sorted(self.ids)

    def contains_obj(self, o: Obj) -> bool:
        return o.summands_in(self.ids)

    def __contains__(self, x: IndecId) -> bool:
        return x in self.ids

    def display(self) -> str:
        return "{" + ", ".join(i.as_interval() for i in self.sorted_ids()) + "}"


def oplus(x: Subcategory, y: Subcategory, name: str = "") -> Subcategory:
    return Subcategory(x.ids | y.ids, name or f"oplus({x.name},{y.name})", "oplus")


def inter(x: Subcategory, y: Subcategory, name: str = "") -> Subcategory:
    return Subcategory(x.ids & y.ids, name or f"inter({x.name},{y.name})", "inter")


def right_perp(ctx: CategoryCtx, x: Subcategory, name: str = "") -> Subcategory:
    """Indecomposables y with Ext(u, y) = 0 for every u in x."""
    ids = frozenset(y for y in ctx.indecs
                    if all(ctx.ext_dim(u, y) == 0 for u in x.ids))
    return Subcategory(ids, name or f"rperp({x.name})", "right_perp")


def left_perp(ctx: CategoryCtx, x: Subcategory, name: str = "") -> Subcategory:
    ids = frozenset(y for y in ctx.indecs
                    if all(ctx.ext_dim(y, v) == 0 for v in x.ids))
    return Subcategory(ids, name or f"lperp({x.name})", "left_perp")


@dataclass(frozen=True)
class Verdict:
    """Three-valued result; Fails always carries a replayable certificate.

    `exhaustive` marks negative searches whose reduced space was fully
    enumerated, so "no witness" is a definitive non-existence statement.
    """

    status: str  # "holds" | "fails" | "unknown"
    route: str = ""
    witnesses: tuple = ()
    certificate: dict | None = None
    bounds: SearchBounds | None = None
    exhaustive: bool = False
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.status not in ("holds", "fails", "unknown"):
            raise ValueError(f"bad verdict status {self.status!r}")
        if self.status == "fails" and self.certificate is None:
            raise ValueError("a failing verdict needs a certificate")

    @property
    def holds(self) -> bool:
        return self.status == "holds"

    @property
    def fails(self) -> bool:
        return self.status == "fails"

    @property
    def unknown(self) -> bool:
        return self.status == "unknown"

    def payload(self) -> dict:
        out = {"status": self.status, "route": self.route}
        if self.witnesses:
            out["witnesses"] = list(self.witnesses)
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.bounds is not None:
            out["bounds"] = self.bounds.payload()
        if self.exhaustive:
            out["exhaustive"] = True
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def ses_payload(ctx: CategoryCtx, ses: rc.SES) -> dict:
    """Self-contained JSON form of a conflation (all matrices included)."""
    return {
        "first": str(ctx.identify(ses.first)),
        "middle": str(ctx.identify(ses.middle)),
        "third": str(ctx.identify(ses.third)),
        "first_dims": list(ses.first.dims),
        "middle_dims": list(ses.middle.dims),
        "third_dims": list(ses.third.dims),
        "middle_maps": [m.tolist() for m in ses.middle.maps],
        "first_maps": [m.tolist() for m in ses.first.maps],
        "third_maps": [m.tolist() for m in ses.third.maps],
        "i_comps": [c.tolist() for c in ses.i.comps],
        "p_comps": [c.tolist() for c in ses.p.comps],
    }


# -- membership of a fixed object in X * Y ------------------------------


def star_member(ctx: CategoryCtx, z: Obj, x: Subcategory, y: Subcategory,
                dim_cap: int = 24) -> Verdict:
    """Exact decision of z in X*Y by complete submodule enumeration."""
    zmod = ctx.realize(z)
    checked = 0
    for sub, incl in rc.submodules(zmod, dim_cap=dim_cap):
        checked += 1
        sub_obj = ctx.identify(sub)
        if not x.contains_obj(sub_obj):
            continue
        quot, proj = rc.cokernel(incl)
        quot_obj = ctx.identify(quot)
        if y.contains_obj(quot_obj):
            ses = rc.SES(incl, proj)
            return Verdict(
                status="holds",
                route="submodule search",
                witnesses=({"object": str(z),
                            "conflation": ses_payload(ctx, ses)},),
                exhaustive=True,
            )
    return Verdict(
        status="fails",
        route="submodule search",
        certificate={"object": str(z), "submodules_checked": checked,
                     "x": x.display(), "y": y.display()},
        exhaustive=True,
    )


def subcat_in_star(ctx: CategoryCtx, a: Subcategory, x: Subcategory,
                   y: Subcategory, bounds: SearchBounds) -> Verdict:
    """a included in X*Y, checked on each indecomposable of a.

    Sufficient for the whole additive closure because direct sums of
    conflations are conflations.
    """
    witnesses = []
    for z in sorted(a.ids):
        v = star_member(ctx, Obj.of(z), x, y, dim_cap=bounds.dim_cap)
        if v.fails:
            return Verdict(
                status="fails",
                route="indecomposable-level star check",
                certificate={"offender": str(z), "detail": v.certificate},
                bounds=bounds,
                exhaustive=True,
            )
        witnesses.extend(v.witnesses)
    return Verdict(status="holds", route="indecomposable-level star check",
                   witnesses=tuple(witnesses), bounds=bounds, exhaustive=True)


# -- approximation searches ---------------------------------------------


def _ext_class_candidates(ctx: CategoryCtx, fixed: Obj, pool: list[IndecId],
                          bounds: SearchBounds, fixed_is_third: bool):
    """Candidate partner multisets and all-ones-normalizable classes.

    Yields (partner_obj, coeffs) in ascending (total_dim, lex) order,
    starting with the empty partner (split classes).  Each pool id is
    used at most once: higher multiplicities reduce to this case by
    column operations since each Ext(x, y) here is at most 1-dimensional.
    """
    usable = sorted(pool)
    subsets = [()]
    for k in range(1, len(usable) + 1):
        subsets.extend(combinations(usable, k))
    subsets.sort(key=lambda s: (sum(i.dim for i in s), s))
    for subset in subsets:
        partner = Obj(tuple(subset))
        if partner.total_dim + fixed.total_dim > bounds.dim_cap:
            continue
        if fixed_is_third:
            coeffs = {(0, j): 1 for j in range(len(subset))}
        else:
            coeffs = {(i, 0): 1 for i in range(len(subset))}
        yield partner, coeffs


def find_left_approx(ctx: CategoryCtx, b: IndecId, u: Subcategory,
                     v: Subcategory, bounds: SearchBounds) -> tuple[Verdict, rc.SES | None]:
    """Search a conflation V -> U0 -> b with U0 in add(u), V in add(v).

    Enumerates kernel candidates over the ext support of b in v and
    realizes each class; smallest witnesses come first.  Returns the
    verdict together with the witness conflation when one is found.
    """
    ctx.check_id(b)
    pool = [y for y in sorted(v.ids) if ctx.ext_dim(b, y) == 1]
    truncated = False
    third = Obj.of(b)
    for partner, coeffs in _ext_class_candidates(ctx, third, pool, bounds, True):
        if len(partner.ids) == 0:
            # split candidate: 0 -> b -> b
            if b in u:
                ses = ctx.ses_for_class(third, partner, {})
                return Verdict(status="holds", route="split",
                               witnesses=(ses_payload(ctx, ses),),
                               bounds=bounds, exhaustive=True), ses
            continue
        ses = ctx.ses_for_class(third, partner, coeffs)
        mid = ctx.identify(ses.middle)
        if u.contains_obj(mid):
            return Verdict(status="holds", route="extension-class search",
                           witnesses=(ses_payload(ctx, ses),),
                           bounds=bounds, exhaustive=True), ses
    if sum(i.dim for i in pool) + third.total_dim > bounds.dim_cap:
        truncated = True
    return Verdict(status="unknown", route="extension-class search",
                   bounds=bounds, exhaustive=not truncated,
                   notes=(f"no covering conflation for {b} with cover in "
                          f"add{u.display()} and kernel in add{v.display()}",)), None


def find_right_approx(ctx: CategoryCtx, b: IndecId, t: Subcategory,
                      s: Subcategory, bounds: SearchBounds) -> tuple[Verdict, rc.SES | None]:
    """Search a conflation b -> T0 -> S with T0 in add(t), S in add(s)."""
    ctx.check_id(b)
    pool = [x for x in sorted(s.ids) if ctx.ext_dim(x, b) == 1]
    truncated = False
    first = Obj.of(b)
    for partner, coeffs in _ext_class_candidates(ctx, first, pool, bounds, False):
        if len(partner.ids) == 0:
            if b in t:
                ses = ctx.ses_for_class(partner, first, {})
                return Verdict(status="holds", route="split",
                               witnesses=(ses_payload(ctx, ses),),
                               bounds=bounds, exhaustive=True), ses
            continue
        ses = ctx.ses_for_class(partner, first, coeffs)
        mid = ctx.identify(ses.middle)
        if t.contains_obj(mid):
            return Verdict(status="holds", route="extension-class search",
                           witnesses=(ses_payload(ctx, ses),),
                           bounds=bounds, exhaustive=True), ses
    if sum(i.dim for i in pool) + first.total_dim > bounds.dim_cap:
        truncated = True
    return Verdict(status="unknown", route="extension-class search",
                   bounds=bounds, exhaustive=not truncated,
                   notes=(f"no coresolving conflation for {b} with middle in "
                          f"add{t.display()} and cokernel in add{s.display()}",)), None
