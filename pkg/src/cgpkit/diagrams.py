"""Sliced combinatorial ribbon-graph diagrams.

A diagram is a list of slices read bottom to top; each slice is a list of
cells acting on adjacent groups of letters of the current boundary word.
Cells are the elementary tangles: identities, the two crossings, the four
cup/cap flavors, and coupons holding explicit matrices.  Framing is
blackboard: a framing change is a curl built out of a cap, a self-crossing
and a cup, which evaluates to the twist.

Strand components are recovered by union-find over boundary ports; a
coupon joins all of its legs into one component.  Components can carry
formal color sums (Kirby colors); expansion into plain diagrams happens at
evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .qscalars import ScalarContext, Scalar
from .weightcat import (
    Color,
    FormalColorSum,
    Letter,
    ObjectWord,
    Sigma,
    Typical,
    color_degree,
    realize,
    realize_letter,
)


class BoundaryMismatch(ValueError):
    pass


class NoProjectiveEdge(ValueError):
    pass


class NotProjectiveEdge(ValueError):
    pass


class NoSection(ArithmeticError):
    pass


def flip(letter: Letter) -> Letter:
    sign, color = letter
    return (-sign, color)


@dataclass(frozen=True, eq=False)
class Cell:
    """One elementary tangle piece inside a slice."""

    kind: str  # id | xpos | xneg | cup_l | cup_r | cap_l | cap_r | coupon
    letters: tuple[Letter, ...] = ()
    domain: ObjectWord | None = None
    codomain: ObjectWord | None = None
    matrix: np.ndarray | None = None

    def in_letters(self) -> tuple[Letter, ...]:
        k = self.kind
        if k == "id":
            return (self.letters[0],)
        if k in ("xpos", "xneg"):
            return self.letters
        if k == "cup_l":
            return (flip(self.letters[0]), self.letters[0])
        if k == "cup_r":
            return (self.letters[0], flip(self.letters[0]))
        if k in ("cap_l", "cap_r"):
            return ()
        if k == "coupon":
            return self.domain.letters
        raise ValueError(f"unknown cell kind {self.kind!r}")

    def out_letters(self) -> tuple[Letter, ...]:
        k = self.kind
        if k == "id":
            return (self.letters[0],)
        if k in ("xpos", "xneg"):
            return (self.letters[1], self.letters[0])
        if k in ("cup_l", "cup_r"):
            return ()
        if k == "cap_l":
            return (self.letters[0], flip(self.letters[0]))
        if k == "cap_r":
            return (flip(self.letters[0]), self.letters[0])
        if k == "coupon":
            return self.codomain.letters
        raise ValueError(f"unknown cell kind {self.kind!r}")


def id_cell(letter: Letter) -> Cell:
    return Cell("id", (letter,))


def cross(letter1: Letter, letter2: Letter, positive: bool = True) -> Cell:
    return Cell("xpos" if positive else "xneg", (letter1, letter2))


def cup(letter: Letter, left: bool) -> Cell:
    return Cell("cup_l" if left else "cup_r", (letter,))


def cap(letter: Letter, left: bool) -> Cell:
    return Cell("cap_l" if left else "cap_r", (letter,))


def coupon(domain: ObjectWord, codomain: ObjectWord, matrix: np.ndarray) -> Cell:
    return Cell("coupon", (), domain, codomain, matrix)


Slice = list[Cell]


@dataclass
class Diagram:
    source: ObjectWord
    slices: list[Slice]
    prefactor: Scalar = 1.0 + 0.0j
    formal: dict[int, FormalColorSum] = field(default_factory=dict)

    # -- structure ---------------------------------------------------------

    def boundary_words(self) -> list[ObjectWord]:
        words = [self.source]
        w = self.source
        for s, cells in enumerate(self.slices):
            out = []
            pos = 0
            for cell in cells:
                ins = cell.in_letters()
                if tuple(w.letters[pos:pos + len(ins)]) != ins:
                    raise BoundaryMismatch(
                        f"slice {s}: cell {cell.kind} expects {ins}, boundary has "
                        f"{w.letters[pos:pos + len(ins)]}"
                    )
                pos += len(ins)
                out.extend(cell.out_letters())
            if pos != len(w):
                raise BoundaryMismatch(f"slice {s}: {len(w) - pos} unconsumed letters")
            w = ObjectWord(out)
            words.append(w)
        return words

    @property
    def target(self) -> ObjectWord:
        return self.boundary_words()[-1]

    def is_closed(self) -> bool:
        return len(self.source) == 0 and len(self.target) == 0

    # -- components ---------------------------------------------------------

    def ports_and_components(self):
        """Union-find over boundary ports; returns (port -> comp id) map.

        A port is (boundary index, letter index).  Components are numbered
        by first appearance scanning boundaries bottom to top, left to
        right.
        """
        words = self.boundary_words()
        parent: dict[tuple[int, int], tuple[int, int]] = {}

        def find(p):
            while parent[p] != p:
                parent[p] = parent[parent[p]]
                p = parent[p]
            return p

        def union(p, q):
            parent.setdefault(p, p)
            parent.setdefault(q, q)
            rp, rq = find(p), find(q)
            if rp != rq:
                parent[rp] = rq

        for b, w in enumerate(words):
            for i in range(len(w)):
                parent.setdefault((b, i), (b, i))
        for s, cells in enumerate(self.slices):
            pin = 0
            pout = 0
            for cell in cells:
                nin = len(cell.in_letters())
                nout = len(cell.out_letters())
                ins = [(s, pin + t) for t in range(nin)]
                outs = [(s + 1, pout + t) for t in range(nout)]
                k = cell.kind
                if k == "id":
                    union(ins[0], outs[0])
                elif k in ("xpos", "xneg"):
                    union(ins[0], outs[1])
                    union(ins[1], outs[0])
                elif k in ("cup_l", "cup_r"):
                    union(ins[0], ins[1])
                elif k in ("cap_l", "cap_r"):
                    union(outs[0], outs[1])
                elif k == "coupon":
                    for p in ins[1:] + outs:
                        union(ins[0] if ins else outs[0], p)
                pin += nin
                pout += nout
        comp_of: dict[tuple[int, int], int] = {}
        roots: dict[tuple[int, int], int] = {}
        for b in range(len(words)):
            for i in range(len(words[b])):
                r = find((b, i))
                if r not in roots:
                    roots[r] = len(roots)
                comp_of[(b, i)] = roots[r]
        return comp_of

    def component_count(self) -> int:
        comp = self.ports_and_components()
        return len(set(comp.values())) if comp else 0

    def component_letters(self) -> dict[int, set[Letter]]:
        comp = self.ports_and_components()
        words = self.boundary_words()
        out: dict[int, set[Letter]] = {}
        for (b, i), c in comp.items():
            out.setdefault(c, set()).add(words[b][i])
        return out

    def components_with_coupons(self) -> set[int]:
        comp = self.ports_and_components()
        bad = set()
        for s, cells in enumerate(self.slices):
            pin = 0
            pout = 0
            for cell in cells:
                nin = len(cell.in_letters())
                nout = len(cell.out_letters())
                if cell.kind == "coupon":
                    for t in range(nin):
                        bad.add(comp[(s, pin + t)])
                    for t in range(nout):
                        bad.add(comp[(s + 1, pout + t)])
                pin += nin
                pout += nout
        return bad

    def recolor_component(self, comp_id: int, color: Color) -> "Diagram":
        """Replace the color on every leg of one coupon-free component."""
        if comp_id in self.components_with_coupons():
            raise ValueError("cannot recolor a component attached to coupons")
        comp = self.ports_and_components()

        def rl(letter: Letter, port) -> Letter:
            return (letter[0], color) if comp[port] == comp_id else letter

        new_source = ObjectWord(
            [rl(l, (0, i)) for i, l in enumerate(self.source.letters)])
        new_slices: list[Slice] = []
        for s, cells in enumerate(self.slices):
            pin = 0
            pout = 0
            row: Slice = []
            for cell in cells:
                nin = len(cell.in_letters())
                nout = len(cell.out_letters())
                k = cell.kind
                if k == "id":
                    row.append(id_cell(rl(cell.letters[0], (s, pin))))
                elif k in ("xpos", "xneg"):
                    l1 = rl(cell.letters[0], (s, pin))
                    l2 = rl(cell.letters[1], (s, pin + 1))
                    row.append(Cell(k, (l1, l2)))
                elif k in ("cup_l", "cup_r"):
                    anchor = cell.letters[0]
                    port = (s, pin + (1 if k == "cup_l" else 0))
                    row.append(Cell(k, (rl(anchor, port),)))
                elif k in ("cap_l", "cap_r"):
                    anchor = cell.letters[0]
                    port = (s + 1, pout + (0 if k == "cap_l" else 1))
                    row.append(Cell(k, (rl(anchor, port),)))
                else:
                    row.append(cell)
                pin += nin
                pout += nout
            new_slices.append(row)
        return Diagram(new_source, new_slices, self.prefactor,
                       {c: f for c, f in self.formal.items() if c != comp_id})

    def crossing_records(self) -> list[tuple[int, int, int, Color, Color]]:
        """(comp a, comp b, sign, color a, color b) for every crossing."""
        comp = self.ports_and_components()
        out = []
        for s, cells in enumerate(self.slices):
            pin = 0
            for cell in cells:
                nin = len(cell.in_letters())
                if cell.kind in ("xpos", "xneg"):
                    c1 = comp[(s, pin)]
                    c2 = comp[(s, pin + 1)]
                    e1 = cell.letters[0][0]
                    e2 = cell.letters[1][0]
                    sign = e1 * e2 * (1 if cell.kind == "xpos" else -1)
                    out.append((c1, c2, sign, cell.letters[0][1], cell.letters[1][1]))
                pin += nin
        return out

    def component_colors(self) -> dict[int, Color]:
        """Single color of each coupon-free component; error on mixtures.

        Components running through coupons are genuine graphs and may carry
        several edge colors; they are omitted here.
        """
        letters = self.component_letters()
        skip = self.components_with_coupons()
        out = {}
        for c, ls in letters.items():
            if c in skip:
                continue
            colors = {col for _, col in ls}
            if len(colors) != 1:
                raise ValueError(f"component {c} carries several colors: {colors}")
            out[c] = colors.pop()
        return out


# ---------------------------------------------------------------------------
# validation / category structure
# ---------------------------------------------------------------------------


def validate(ctx: ScalarContext, d: Diagram) -> str | None:
    """None when structurally sound, else a description of the first problem."""
    try:
        words = d.boundary_words()
    except BoundaryMismatch as e:
        return str(e)
    for s, cells in enumerate(d.slices):
        for cell in cells:
            if cell.kind == "coupon":
                dom = realize(ctx, cell.domain)
                cod = realize(ctx, cell.codomain)
                if cell.matrix.shape != (cod.dim, dom.dim):
                    return (f"slice {s}: coupon matrix shape {cell.matrix.shape} "
                            f"!= ({cod.dim}, {dom.dim})")
    try:
        d.ports_and_components()
        d.component_colors()
    except ValueError as e:
        return f"component labeling: {e}"
    for c in d.formal:
        if c in d.components_with_coupons():
            return f"formal color on component {c} which touches a coupon"
    _ = words
    return None


def ensure_valid(ctx: ScalarContext, d: Diagram) -> None:
    msg = validate(ctx, d)
    if msg is not None:
        raise ValueError(msg)


def identity_diagram(word: ObjectWord) -> Diagram:
    return Diagram(word, [[id_cell(l) for l in word]] if len(word) else [])


def compose(d1: Diagram, d2: Diagram) -> Diagram:
    """d2 after d1; boundary words must match exactly."""
    if d1.target.letters != d2.source.letters:
        raise BoundaryMismatch("compose: target of first != source of second")
    out = Diagram(d1.source, [list(s) for s in d1.slices] + [list(s) for s in d2.slices],
                  d1.prefactor * d2.prefactor)
    out.formal = _remap_formal(d1, d2, out)
    return out


def tensor(d1: Diagram, d2: Diagram) -> Diagram:
    """Horizontal juxtaposition, stacking d1's slices below d2's."""
    w1t = d1.target
    w2s = d2.source
    slices: list[Slice] = []
    for s in d1.slices:
        slices.append(list(s) + [id_cell(l) for l in w2s])
    for s in d2.slices:
        slices.append([id_cell(l) for l in w1t] + list(s))
    out = Diagram(d1.source + d2.source, slices, d1.prefactor * d2.prefactor)
    out.formal = _remap_formal_tensor(d1, d2, out)
    return out


def _remap_formal(d1: Diagram, d2: Diagram, out: Diagram) -> dict[int, FormalColorSum]:
    if not d1.formal and not d2.formal:
        return {}
    comp_out = out.ports_and_components()
    mapping: dict[int, FormalColorSum] = {}
    off = len(d1.slices)
    for d, boundary_shift in ((d1, 0), (d2, off)):
        if not d.formal:
            continue
        comp_d = d.ports_and_components()
        for cid, fc in d.formal.items():
            port = next(p for p, c in comp_d.items() if c == cid)
            port_out = (port[0] + boundary_shift, port[1])
            mapping[comp_out[port_out]] = fc
    return mapping


def _remap_formal_tensor(d1: Diagram, d2: Diagram, out: Diagram) -> dict[int, FormalColorSum]:
    # boundary b <= n1 of out reads d1.words[b] + d2.source; boundary b >= n1
    # reads d1.target + d2.words[b - n1]
    if not d1.formal and not d2.formal:
        return {}
    comp_out = out.ports_and_components()
    mapping: dict[int, FormalColorSum] = {}
    if d1.formal:
        comp_d = d1.ports_and_components()
        for cid, fc in d1.formal.items():
            port = next(p for p, c in comp_d.items() if c == cid)
            mapping[comp_out[port]] = fc
    if d2.formal:
        n1 = len(d1.slices)
        w1 = len(d1.target)
        comp_d = d2.ports_and_components()
        for cid, fc in d2.formal.items():
            b, i = next(p for p, c in comp_d.items() if c == cid)
            mapping[comp_out[(b + n1, i + w1)]] = fc
    return mapping


# ---------------------------------------------------------------------------
# slice building helpers
# ---------------------------------------------------------------------------


def exchange_distant(d: Diagram, i: int) -> Diagram:
    """Swap slices i and i+1 when their nontrivial cells act on disjoint
    letter ranges (a slice-level isotopy rewrite, normalized slices only).
    """
    if not (0 <= i + 1 < len(d.slices)):
        raise ValueError("slice index out of range")

    def main_cell(cells):
        pos = 0
        found = None
        for cell in cells:
            if cell.kind != "id":
                if found is not None:
                    raise ValueError("exchange needs normalized slices")
                found = (pos, cell)
            pos += len(cell.in_letters())
        return found

    lo = main_cell(d.slices[i])
    hi = main_cell(d.slices[i + 1])
    if lo is None or hi is None:
        raise ValueError("nothing to exchange")
    (p_lo, c_lo), (p_hi, c_hi) = lo, hi
    din_lo = len(c_lo.in_letters())
    dout_lo = len(c_lo.out_letters())
    shift = dout_lo - din_lo
    words = d.boundary_words()
    w0 = words[i]
    if p_hi >= p_lo + dout_lo:
        # upper cell sits right of the lower one: pull it down first
        q = p_hi - shift
        if q < p_lo + din_lo:
            raise ValueError("slices are not distant")
        first = wrap_slice(w0, q, c_hi)
        mid = ObjectWord([c.out_letters()[t] for c in first
                          for t in range(len(c.out_letters()))])
        second = wrap_slice(mid, p_lo, c_lo)
    elif p_hi + len(c_hi.in_letters()) <= p_lo:
        first = wrap_slice(w0, p_hi, c_hi)
        mid = ObjectWord([c.out_letters()[t] for c in first
                          for t in range(len(c.out_letters()))])
        second = wrap_slice(mid, p_lo + len(c_hi.out_letters())
                            - len(c_hi.in_letters()), c_lo)
    else:
        raise ValueError("slices are not distant")
    return Diagram(d.source,
                   [list(s) for s in d.slices[:i]] + [first, second]
                   + [list(s) for s in d.slices[i + 2:]],
                   d.prefactor, dict(d.formal))


def insert_slices(d: Diagram, boundary: int, rows: list[Slice]) -> Diagram:
    """Insert word-preserving slices at an interior boundary.

    The inserted block must consume and reproduce the boundary word there.
    Formal color labels are carried across by re-anchoring each labeled
    component at a representative port.
    """
    anchors = []
    if d.formal:
        comp = d.ports_and_components()
        for cid, fc in d.formal.items():
            port = min(p for p, c in comp.items() if c == cid)
            anchors.append((port, fc))
    out = Diagram(d.source,
                  [list(s) for s in d.slices[:boundary]] + [list(r) for r in rows]
                  + [list(s) for s in d.slices[boundary:]],
                  d.prefactor)
    if anchors:
        comp_new = out.ports_and_components()
        n = len(rows)
        out.formal = {
            comp_new[(b, i) if b <= boundary else (b + n, i)]: fc
            for (b, i), fc in anchors
        }
    return out


def wrap_slice(word: ObjectWord, pos: int, cell: Cell) -> Slice:
    """One-nontrivial-cell slice acting at a given letter position."""
    ins = cell.in_letters()
    if tuple(word.letters[pos:pos + len(ins)]) != ins:
        raise BoundaryMismatch(f"cell {cell.kind} does not fit word at {pos}")
    row = [id_cell(l) for l in word.letters[:pos]]
    row.append(cell)
    row.extend(id_cell(l) for l in word.letters[pos + len(ins):])
    return row


def apply_cell(d: Diagram, pos: int, cell: Cell) -> Diagram:
    """Append one slice containing the cell at position pos."""
    w = d.target
    out = Diagram(d.source, [list(s) for s in d.slices], d.prefactor, dict(d.formal))
    out.slices.append(wrap_slice(w, pos, cell))
    return out


def add_curl(d: Diagram, pos: int, positive: bool) -> Diagram:
    """Framing kink on the strand at letter position pos (one full twist)."""
    w = d.target
    letter = w[pos]
    out = apply_cell(d, pos + 1, cap(letter, left=True))
    out = apply_cell(out, pos, cross(letter, letter, positive=positive))
    out = apply_cell(out, pos + 1, cup(letter, left=False))
    return out


def encircle(d: Diagram, span: tuple[int, int], color: Color, framing: int = 0,
             sign: int = 1) -> Diagram:
    """Insert a meridian circle of the given color around letters [i, j).

    The circle crosses the enclosed strands once in front and once behind,
    linking each enclosed strand by its orientation sign.  Framing is
    realized by curls on the circle.  Returns the new diagram; the circle
    is the component of the freshly created letters.
    """
    i, j = span
    w = d.target
    if not (0 <= i <= j <= len(w)):
        raise ValueError("span out of range")
    mer = (sign, color)
    out = apply_cell(d, i, cap(mer, left=False))  # creates (flip mer, mer) at i
    # meridian letter sits at position i+1; curls for framing
    for _ in range(abs(framing)):
        out = add_curl(out, i + 1, positive=framing > 0)
    # pass in front (over) of the enclosed letters, left to right
    for t in range(j - i):
        out = apply_cell(out, i + 1 + t, cross(mer, w[i + t], positive=True))
    # pass behind (under) on the way back
    for t in range(j - i - 1, -1, -1):
        out = apply_cell(out, i + 1 + t, cross(w[i + t], mer, positive=True))
    out = apply_cell(out, i, cup(mer, left=True))
    return out


def trace_closure(d: Diagram) -> Diagram:
    """Close an endomorphism diagram of a single letter around the right.

    Gives the closed diagram ev_r o (d (x) id) o coev_l whose renormalized
    invariant is the modified trace of the evaluation of d.
    """
    if len(d.source) != 1 or len(d.target) != 1 or d.source.letters != d.target.letters:
        raise ValueError("trace closure needs an endomorphism of one letter")
    letter = d.source[0]
    out = Diagram(ObjectWord(()), [])
    out = apply_cell(out, 0, cap(letter, left=True))
    out = _stack_between(out, d.slices, 0, 1)
    out.prefactor = d.prefactor
    out = apply_cell(out, 0, cup(letter, left=False))
    return out


# ---------------------------------------------------------------------------
# cutting a closed diagram open along an edge
# ---------------------------------------------------------------------------


def cut(ctx: ScalarContext, d: Diagram, boundary: int, pos: int) -> Diagram:
    """Cutting presentation of a closed diagram along one edge.

    The edge is the strand crossing the given slice boundary at letter
    position pos; it must be colored by a typical module.  The result is an
    endomorphism diagram of that single letter whose trace closure is
    isotopic to the input, so the renormalized invariant can be computed as
    a modified trace.  Duality bends route the remaining letters around the
    sides; no crossings are introduced.
    """
    if not d.is_closed():
        raise ValueError("cut needs a closed diagram")
    if d.formal:
        raise ValueError("expand formal colors before cutting")
    words = d.boundary_words()
    if not (0 < boundary < len(words)):
        raise ValueError("boundary index out of range")
    w = words[boundary]
    v = w[pos]
    if not isinstance(v[1], Typical):
        raise NotProjectiveEdge(f"cut edge must be typical, got {v[1]!r}")
    x = list(w.letters[:pos])
    y = list(w.letters[pos + 1:])
    lower = Diagram(EMPTY := ObjectWord(()), [list(s) for s in d.slices[:boundary]],
                    d.prefactor)
    upper = Diagram(w, [list(s) for s in d.slices[boundary:]])

    out = identity_diagram(ObjectWord([v]))
    # create the x-letters to the left: caps outermost first
    for t in range(len(x) - 1, -1, -1):
        out = apply_cell(out, len(x) - 1 - t, cap(x[t], left=False))
    # create the y-letters to the right: caps outermost first
    base = 2 * len(x) + 1
    for t in range(len(y)):
        out = apply_cell(out, base + t, cap(y[t], left=True))
    # stack the upper part (consumes x, v, y in the middle)
    nxd = len(x)  # dual-tail width on the left
    nyd = len(y)
    for s in upper.slices:
        word_now = out.target
        row = [id_cell(l) for l in word_now.letters[:nxd]]
        row.extend(s)
        row.extend(id_cell(l) for l in word_now.letters[len(word_now) - nyd:])
        out = Diagram(out.source, out.slices + [row], out.prefactor)
    # stack the lower part between the dual tails
    out = _stack_between(out, lower.slices, nxd, nyd)
    out.prefactor = d.prefactor
    # close x-duals innermost first
    for t in range(len(x)):
        out = apply_cell(out, len(x) - 1 - t, cup(x[t], left=True))
    # close y-duals innermost first
    for t in range(len(y) - 1, -1, -1):
        out = apply_cell(out, 1 + t, cup(y[t], left=False))
    return out


def _stack_between(d: Diagram, slices: list[Slice], nleft: int, nright: int) -> Diagram:
    out = Diagram(d.source, [list(s) for s in d.slices], d.prefactor, dict(d.formal))
    for s in slices:
        word_now = out.target
        row = [id_cell(l) for l in word_now.letters[:nleft]]
        row.extend(s)
        row.extend(id_cell(l) for l in word_now.letters[len(word_now) - nright:])
        out.slices.append(row)
    return out


# ---------------------------------------------------------------------------
# stabilizations
# ---------------------------------------------------------------------------


def stabilize_projective(ctx: ScalarContext, d: Diagram, boundary: int, pos: int,
                         g, index_weight: complex) -> Diagram:
    """Projective stabilization along the edge at (boundary, pos).

    Replaces an identity segment of a typical-colored edge by the coupon
    pair (section, id (x) right evaluation) introducing a detour colored by
    the simple projective module of highest weight index_weight (of generic
    degree g).  Skein-equivalent: closed evaluations are unchanged.
    """
    from . import weightcat as wc
    from . import rt_eval

    words = d.boundary_words()
    w = words[boundary]
    letter = w[pos]
    if not isinstance(letter[1], Typical):
        raise NotProjectiveEdge("projective stabilization needs a typical edge")
    vi = Typical(complex(index_weight))
    uword = ObjectWord([letter])
    bigword = ObjectWord([letter, (1, vi), (-1, vi)])
    # section s: U -> U (x) Vi (x) Vi* with (id (x) ev_r) o s = id
    basis = wc.hom_basis(ctx, uword, bigword)
    if not basis:
        raise NoSection("no intertwiners U -> U (x) Vi (x) Vi*")
    U = realize(ctx, uword)
    Vi = realize_letter(ctx, (1, vi))
    evr = wc.ev_coev(ctx, Vi, "ev_r")
    from . import _linalg as la
    proj = la.kron(ctx, la.eye(ctx, U.dim), evr)
    cols = [np.reshape(proj @ b, -1) for b in basis]
    A = np.stack(cols, axis=1)
    target_vec = np.reshape(la.eye(ctx, U.dim), -1)
    coeffs = la.solve_lstsq(ctx, A, target_vec)
    resid = la.norm_inf((A @ coeffs) - target_vec)
    if resid > ctx.tol * max(1.0, la.norm_inf(target_vec)):
        raise NoSection(f"section solve residual {resid:.3e}")
    smat = sum(c * b for c, b in zip(coeffs, basis))
    w2 = ObjectWord(list(w.letters[:pos]) + list(bigword.letters) + list(w.letters[pos + 1:]))
    rows = [
        wrap_slice(w, pos, coupon(uword, bigword, smat)),
        wrap_slice(w2, pos, coupon(bigword, uword, proj)),
    ]
    return insert_slices(d, boundary, rows)


def stabilize_generic(ctx: ScalarContext, d: Diagram, boundary: int,
                      span: tuple[int, int], g) -> Diagram:
    """Generic stabilization around a vertical corridor of the diagram.

    Inserts the two-component Kirby-colored pair: a -1 framed circle of
    index g around the corridor strands, and a +1 framed circle of index g
    around that circle, scaling the prefactor by 1/(Delta_- Delta_+).  The
    corridor's degree flux must be (the generic) g for the enclosing
    invariant to be unchanged.
    """
    from . import weightcat as wc

    deg = g if isinstance(g, wc.Degree) else wc.Degree(complex(g))
    if deg.is_critical(ctx.tol):
        raise wc.CriticalDegree(f"stabilization index {deg.g} is critical")
    omega = wc.kirby_color(ctx, deg)
    first = omega.terms[0][1]
    consts = wc.constants(ctx)

    # two concentric circles of index g around the corridor, oppositely
    # oriented, framings -1 and +1; blowing both down is a trivial double
    # surgery, and the two stabilization skeins cancel their twists
    w = d.boundary_words()[boundary]
    i, _ = span
    rows_minus = encircle(Diagram(w, []), span, first, framing=-1, sign=+1).slices
    out = insert_slices(d, boundary, rows_minus)
    rows_plus = encircle(Diagram(w, []), span, first, framing=+1, sign=-1).slices
    out = insert_slices(out, boundary, rows_plus)
    comp_map = out.ports_and_components()
    plus_comp = comp_map[(boundary + 1, i)]
    minus_comp = comp_map[(boundary + 1 + len(rows_plus), i)]
    out.formal = dict(out.formal)
    out.formal[minus_comp] = omega
    out.formal[plus_comp] = omega
    out.prefactor = out.prefactor / (consts.delta_minus * consts.delta_plus)
    return out


def encircle_at(d: Diagram, boundary: int, span: tuple[int, int], color: Color,
                framing: int = 0) -> Diagram:
    """Encircle strands at an interior slice boundary."""
    w = d.boundary_words()[boundary]
    rows = encircle(Diagram(w, []), span, color, framing=framing).slices
    return insert_slices(d, boundary, rows)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def color_to_json(c: Color):
    if isinstance(c, Typical):
        a = complex(c.alpha)
        return {"typical": {"re": a.real, "im": a.imag}}
    return {"sigma": c.k}


def color_from_json(obj) -> Color:
    if "typical" in obj:
        return Typical(complex(obj["typical"]["re"], obj["typical"]["im"]))
    if "sigma" in obj:
        return Sigma(int(obj["sigma"]))
    raise ValueError(f"bad color: {obj!r}")


def letter_to_json(l: Letter):
    return ["+" if l[0] > 0 else "-", color_to_json(l[1])]


def letter_from_json(obj) -> Letter:
    return (1 if obj[0] == "+" else -1, color_from_json(obj[1]))


def _matrix_to_json(m: np.ndarray):
    return [[[complex(x).real, complex(x).imag] for x in row] for row in m]


def _matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(a, b) for a, b in row] for row in rows],
                    dtype=np.complex128)


def cell_to_json(cell: Cell):
    out = {"kind": cell.kind}
    if cell.kind == "coupon":
        out["domain"] = [letter_to_json(l) for l in cell.domain]
        out["codomain"] = [letter_to_json(l) for l in cell.codomain]
        out["matrix"] = _matrix_to_json(cell.matrix)
    else:
        out["letters"] = [letter_to_json(l) for l in cell.letters]
    return out


def cell_from_json(obj) -> Cell:
    kind = obj["kind"]
    if kind == "coupon":
        return coupon(
            ObjectWord([letter_from_json(l) for l in obj["domain"]]),
            ObjectWord([letter_from_json(l) for l in obj["codomain"]]),
            _matrix_from_json(obj["matrix"]),
        )
    return Cell(kind, tuple(letter_from_json(l) for l in obj["letters"]))


def diagram_to_json(d: Diagram):
    out = {
        "source": [letter_to_json(l) for l in d.source],
        "slices": [{"cells": [cell_to_json(c) for c in s]} for s in d.slices],
    }
    pf = complex(d.prefactor)
    if pf != 1.0 + 0.0j:
        out["prefactor"] = [pf.real, pf.imag]
    if d.formal:
        out["formal"] = {
            str(cid): [[[complex(co).real, complex(co).imag], color_to_json(c)]
                       for co, c in fc.terms]
            for cid, fc in d.formal.items()
        }
    return out


def diagram_from_json(obj) -> Diagram:
    d = Diagram(
        ObjectWord([letter_from_json(l) for l in obj["source"]]),
        [[cell_from_json(c) for c in s["cells"]] for s in obj["slices"]],
    )
    if "prefactor" in obj:
        d.prefactor = complex(obj["prefactor"][0], obj["prefactor"][1])
    for cid, terms in obj.get("formal", {}).items():
        d.formal[int(cid)] = FormalColorSum(
            tuple((complex(co[0], co[1]), color_from_json(c)) for co, c in terms))
    return d
