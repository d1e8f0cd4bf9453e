"""Dimensions of the graded TQFT state spaces of generic decorated
surfaces, computed through the intertwiner solver.

The genus-1 space of a generic surface has dimension equal to the size of
the index set of the meridian class; for genus n > 1 the dimension is a
sum over fundamental colorings of a trivalent spine of products of vertex
invariant-space dimensions, where each vertex contributes the total
periodicity-graded Hom from the unit to its incident colors.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from . import _linalg as la
from . import weightcat as wc
from .qscalars import ScalarContext


@dataclass(frozen=True)
class TrivalentSurfaceData:
    """Meridian degree data of a generic surface of genus n >= 2.

    The spine is a chain of n-1 theta-shaped pieces: edges e_i carry one
    common meridian class m0, and each piece has a parallel pair e'_i,
    e''_i with m''_i = m0 - m'_i.
    """

    genus: int
    m0: wc.Degree
    mprime: tuple[wc.Degree, ...]

    def __post_init__(self):
        if self.genus < 2:
            raise ValueError("trivalent data needs genus >= 2")
        if len(self.mprime) != self.genus - 1:
            raise ValueError("need one primed class per piece")

    def msecond(self, i: int) -> wc.Degree:
        return wc.Degree(self.m0.g - self.mprime[i].g)

    def all_generic(self, tol: float) -> bool:
        degs = [self.m0, *self.mprime,
                *(self.msecond(i) for i in range(self.genus - 1))]
        return all(not d.is_critical(tol) for d in degs)


def sphere_hom_dim(ctx: ScalarContext, wi: complex, wj: complex,
                   k: int, kp: int) -> int:
    """dim Hom(V_i (x) sigma(k) (x) V_j^*, sigma(k')); the two-sphere
    state-space dimension, equal to delta_ij delta_kk' on index-set
    representatives."""
    src = wc.ObjectWord([(1, wc.Typical(complex(wi))), (1, wc.Sigma(k)),
                         (-1, wc.Typical(complex(wj)))])
    dst = wc.ObjectWord([(1, wc.Sigma(kp))])
    return len(wc.hom_basis(ctx, src, dst))


def genus1_dim(ctx: ScalarContext, g: wc.Degree) -> int:
    """State-space dimension of a generic genus-1 surface.

    Returns the index-set size and cross-checks it against the direct
    count of invariants in V_i^* (x) V_i over the representatives.
    """
    if g.is_critical(ctx.tol):
        raise wc.CriticalDegree(f"genus-1 class {g.g} is critical")
    reps = wc.index_set(ctx, g)
    total = 0
    for a in reps:
        word = wc.ObjectWord([(-1, wc.Typical(a)), (1, wc.Typical(a))])
        total += len(wc.hom_basis(ctx, wc.EMPTY_WORD, word))
    if total != len(reps):
        raise la.NumericInstability(
            f"genus-1 cross-check failed: {total} != {len(reps)}")
    return len(reps)


def _vertex_words(ctx: ScalarContext, e: complex, ep: complex, epp: complex):
    """The two vertex words of one theta piece, e -> e' + e''."""
    wa = wc.ObjectWord([(1, wc.Typical(e)), (-1, wc.Typical(ep)),
                        (-1, wc.Typical(epp))])
    wb = wc.ObjectWord([(-1, wc.Typical(e)), (1, wc.Typical(ep)),
                        (1, wc.Typical(epp))])
    return wa, wb


def graded_vertex_dim(ctx: ScalarContext, word: wc.ObjectWord,
                      brute: bool = False) -> int:
    """Total periodicity-graded invariant dimension of a vertex word.

    Default route: sum ordinary Hom(1, word (x) sigma(k)) over the finite
    window of k in rbar*Z meeting the weight support.  Brute route: count
    joint null vectors of the raising and lowering actions with weight in
    rbar*Z, directly on the full tensor word.
    """
    if brute:
        return wc.hom_dim_graded(ctx, word)
    M = wc.realize(ctx, word)
    ks = set()
    for w in M.weights:
        wv = complex(w)
        if abs(wv.imag) <= ctx.tol:
            r = round(wv.real / ctx.rbar)
            if abs(wv.real - r * ctx.rbar) <= 100 * ctx.tol:
                # an invariant in word (x) sigma(k rbar) needs a word weight
                # of -k rbar, so the window is the negated weight support
                ks.add(-int(r))
    total = 0
    for k in sorted(ks):
        aug = wc.ObjectWord(list(word.letters) + [(1, wc.Sigma(k * ctx.rbar))])
        total += len(wc.hom_basis(ctx, wc.EMPTY_WORD, aug))
    return total


def genus_n_dim(ctx: ScalarContext, data: TrivalentSurfaceData,
                brute: bool = False, rep_shift: int = 0) -> int:
    """State-space dimension of a generic surface of genus n >= 2.

    Enumerates fundamental colorings (index-set representatives per edge
    class, optionally shifted by rep_shift periods) and sums the products
    of the two vertex dimensions of every theta piece.  With brute=True
    each vertex dimension is recomputed by the direct nullspace oracle on
    the full tensor word.
    """
    if not data.all_generic(ctx.tol):
        raise wc.CriticalDegree("all spine meridian classes must be generic")
    n = data.genus
    shift = rep_shift * ctx.rbar
    reps0 = [a + shift for a in wc.index_set(ctx, data.m0)]
    total = 0
    pieces = []
    for i in range(n - 1):
        repsp = [a + shift for a in wc.index_set(ctx, data.mprime[i])]
        repspp = [a + shift for a in wc.index_set(ctx, data.msecond(i))]
        pieces.append((repsp, repspp))
    # the common edges e_1 .. e_{n-1} all carry class m0 but are separate
    # edges, each with its own coloring
    for e_colors in product(reps0, repeat=n - 1):
        piece_total = 1
        for i in range(n - 1):
            repsp, repspp = pieces[i]
            sub = 0
            for ep, epp in product(repsp, repspp):
                wa, wb = _vertex_words(ctx, e_colors[i], ep, epp)
                da = graded_vertex_dim(ctx, wa, brute=brute)
                if da == 0:
                    continue
                db = graded_vertex_dim(ctx, wb, brute=brute)
                sub += da * db
            piece_total *= sub
            if piece_total == 0:
                break
        total += piece_total
    return total
