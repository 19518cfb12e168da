"""Bundled example configurations over the bound A6 algebra.

The algebra is the linear quiver 6 -> 5 -> 4 -> 3 -> 2 -> 1 with the two
length-four paths 5..1 and 6..2 set to zero; it has 18 interval
indecomposables.  Three subcategory quadruples (S, T, U, V) are shipped;
each forms a twin cotorsion pair with a qualitatively different heart:
EX_NONINTEGRAL has a non-integral heart, EX_ABELIAN an abelian one, and
EX_NONABELIAN an integral but non-abelian one with core W = U = T.

Every fixture is gated by self-validation tests: twin verification must
hold and the computed heart tables must match the expected sets below,
so a transcription error cannot pass silently.
"""

from __future__ import annotations

from .repcore import FieldChar, QuiverPresentation
from .serialcat import CategoryCtx, IndecId, generate
from .subcat import Subcategory

PAPER_N = 6
PAPER_RELATIONS = ((1, 5), (2, 6))


def _ids(*pairs: tuple[int, int]) -> tuple[IndecId, ...]:
    return tuple(IndecId(a, b) for a, b in pairs)


EX_NONINTEGRAL = {
    "S": _ids((1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 5), (3, 6), (5, 6), (6, 6)),
    "T": _ids((1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4), (2, 5), (3, 3),
              (3, 6), (4, 6), (5, 6), (6, 6)),
    "U": _ids((1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 5), (3, 6), (4, 5),
              (4, 6), (5, 5), (5, 6), (6, 6)),
    "V": _ids((1, 2), (1, 3), (1, 4), (2, 2), (2, 5), (3, 6), (4, 6), (5, 6), (6, 6)),
}

EX_ABELIAN = {
    "S": _ids((1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 5), (3, 6), (6, 6)),
    "T": _ids((1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4), (2, 5), (3, 3),
              (3, 4), (3, 6), (4, 4), (4, 6), (5, 6), (6, 6)),
    "U": _ids((1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 5), (3, 6), (5, 5),
              (5, 6), (6, 6)),
    "V": _ids((1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 5), (3, 3), (3, 6),
              (4, 6), (5, 6), (6, 6)),
}

_EX3_T = _ids((1, 1), (1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4), (2, 5),
              (3, 3), (3, 6), (4, 6), (5, 6), (6, 6))

EX_NONABELIAN = {
    "S": _ids((1, 1), (1, 2), (1, 3), (1, 4), (2, 5), (3, 6), (5, 6), (6, 6)),
    "T": _EX3_T,
    "U": _EX3_T,
    "V": _ids((1, 4), (2, 3), (2, 4), (2, 5), (3, 6), (4, 6), (5, 6), (6, 6)),
}

FIXTURES = {
    "ex-nonintegral": EX_NONINTEGRAL,
    "ex-abelian": EX_ABELIAN,
    "ex-nonabelian": EX_NONABELIAN,
}

# expected heart data, used by the fixture gate
EXPECTED_HEART = {
    "ex-nonintegral": _ids((3, 4), (3, 5), (4, 4)),
    "ex-abelian": _ids((3, 5)),
    "ex-nonabelian": _ids((3, 4), (3, 5), (4, 4), (4, 5), (5, 5)),
}
EXPECTED_H1_NONABELIAN = _ids((3, 4), (3, 5), (5, 5))


def paper_presentation() -> QuiverPresentation:
    return QuiverPresentation(PAPER_N, PAPER_RELATIONS)


def paper_context(p: int = 2) -> CategoryCtx:
    return generate(paper_presentation(), FieldChar(p))


def fixture_subcategories(ctx: CategoryCtx, name: str) -> dict[str, Subcategory]:
    data = FIXTURES[name]
    return {k: Subcategory.of(ctx, v, name=k, provenance=f"fixture {name}")
            for k, v in data.items()}
