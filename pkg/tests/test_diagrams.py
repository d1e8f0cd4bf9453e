import numpy as np
import pytest

from cgpkit import diagrams as dg
from cgpkit import fixtures as fx
from cgpkit import rt_eval
from cgpkit import weightcat as wc

GENERIC = 0.37 + 0.2j
GENERIC2 = 0.59 - 0.11j


def word(*letters):
    return wc.ObjectWord(list(letters))


def test_validate_identity(ctx):
    w = word((1, wc.Typical(GENERIC)), (-1, wc.Sigma(0)))
    d = dg.identity_diagram(w)
    assert dg.validate(ctx, d) is None
    assert d.target.letters == w.letters


def test_validate_reports_mismatch(ctx):
    w = word((1, wc.Typical(GENERIC)))
    d = dg.identity_diagram(w)
    # a slice expecting the wrong letter
    d.slices.append([dg.id_cell((1, wc.Sigma(0)))])
    msg = dg.validate(ctx, d)
    assert msg is not None and "slice" in msg


def test_validate_coupon_shape(ctx):
    w = word((1, wc.Typical(GENERIC)))
    bad = dg.Diagram(w, [[dg.coupon(w, w, np.eye(3))]])
    msg = dg.validate(ctx, bad)
    if ctx.nilpotency != 3:
        assert msg is not None and "coupon" in msg
    else:
        assert msg is None


def test_compose_requires_matching_boundary(ctx):
    w1 = word((1, wc.Typical(GENERIC)))
    w2 = word((1, wc.Typical(GENERIC2)))
    with pytest.raises(dg.BoundaryMismatch):
        dg.compose(dg.identity_diagram(w1), dg.identity_diagram(w2))
    d = dg.compose(dg.identity_diagram(w1), dg.identity_diagram(w1))
    assert dg.validate(ctx, d) is None


def test_component_counting(ctx):
    a = wc.Typical(GENERIC)
    u = fx.unknot(a)
    assert u.component_count() == 1
    both = dg.tensor(u, fx.unknot(wc.Sigma(0)))
    assert both.component_count() == 2
    tref = fx.trefoil(a)
    assert tref.component_count() == 1
    hopf = fx.hopf_link(a, wc.Typical(GENERIC2))
    assert hopf.component_count() == 2


def test_crossing_records_and_linking(ctx):
    a = wc.Typical(GENERIC)
    hopf = fx.hopf_link(a, wc.Typical(GENERIC2))
    recs = hopf.crossing_records()
    assert len(recs) == 2
    assert sum(s for _, _, s, _, _ in recs) == 2  # positive Hopf link
    curl = dg.add_curl(dg.identity_diagram(word((1, a))), 0, positive=True)
    recs = curl.crossing_records()
    assert len(recs) == 1 and recs[0][2] == 1


def test_encircle_linking(ctx):
    a = wc.Typical(GENERIC)
    d = dg.encircle(dg.Diagram(word((1, a)), []), (0, 1), wc.Typical(GENERIC2))
    recs = d.crossing_records()
    comp = d.ports_and_components()
    mer = comp[(1, 0)]
    lk = sum(s for c1, c2, s, _, _ in recs if {c1, c2} == {mer, comp[(0, 0)]})
    assert lk == 2  # two crossings of equal sign: linking number one


def test_recolor_component(ctx):
    a = wc.Typical(GENERIC)
    b = wc.Typical(GENERIC2)
    u = fx.unknot(a, framing=1)
    comp = u.ports_and_components()[(1, 0)]
    u2 = u.recolor_component(comp, b)
    colors = set(u2.component_colors().values())
    assert colors == {b}
    assert dg.validate(ctx, u2) is None


def test_formal_remap_through_compose_tensor(ctx):
    g = wc.Degree(0.5)
    om = wc.kirby_color(ctx, g)
    u = fx.unknot(om.terms[0][1])
    comp = u.ports_and_components()[(1, 0)]
    u.formal[comp] = om
    # tensor with something on the left shifts ports
    both = dg.tensor(fx.unknot(wc.Typical(GENERIC)), u)
    assert len(both.formal) == 1
    cid = next(iter(both.formal))
    colors = both.component_letters()[cid]
    assert all(c == om.terms[0][1] for _, c in colors)


def test_serialization_roundtrip(ctx):
    a = wc.Typical(GENERIC)
    d = fx.trefoil(a)
    d.prefactor = 2.5 - 1.25j
    om = wc.kirby_color(ctx, wc.Degree(0.5))
    mer = dg.encircle(d, (0, 0), om.terms[0][1])  # empty span circle
    blob = dg.diagram_to_json(mer)
    back = dg.diagram_from_json(blob)
    assert dg.validate(ctx, back) is None
    assert back.prefactor == mer.prefactor
    v1 = rt_eval.evaluate(ctx, mer)
    v2 = rt_eval.evaluate(ctx, back)
    assert np.abs(np.asarray(v1) - np.asarray(v2)).max() < 1e-14


def test_coupon_serialization_roundtrip(ctx):
    a = wc.Typical(GENERIC)
    w = word((1, a))
    M = wc.realize(ctx, w)
    th = wc.twist(ctx, M)
    d = dg.Diagram(w, [[dg.coupon(w, w, th)]])
    back = dg.diagram_from_json(dg.diagram_to_json(d))
    assert np.abs(back.slices[0][0].matrix - th).max() < 1e-15


def test_cut_identity_fixtures(ctx):
    a = wc.Typical(GENERIC)
    u = fx.unknot(a)
    c = dg.cut(ctx, u, 1, 0)
    mat = rt_eval.evaluate(ctx, c)
    assert np.abs(mat - np.eye(ctx.nilpotency)).max() < 1e-12
    # twist loop cuts to the twist matrix
    k = fx.unknot(a, framing=1)
    ck = dg.cut(ctx, k, 1, 0)
    mat = rt_eval.evaluate(ctx, ck)
    th = wc.twist(ctx, wc.realize_letter(ctx, (1, a)))
    assert np.abs(mat - th).max() < 1e-11


def test_cut_requires_typical(ctx):
    s = fx.unknot(wc.Sigma(0))
    with pytest.raises(dg.NotProjectiveEdge):
        dg.cut(ctx, s, 1, 0)


def test_trace_closure_inverts_cut(ctx):
    a = wc.Typical(GENERIC)
    t = fx.figure_eight(a)
    c = dg.cut(ctx, t, *rt_eval.find_typical_edge(ctx, t))
    again = dg.trace_closure(c)
    v1 = rt_eval.f_prime(ctx, t)
    v2 = rt_eval.f_prime(ctx, again)
    assert abs(v1 - v2) < 1e-9 * max(1, abs(v1))


def test_stabilize_projective_section_property(ctx):
    a = wc.Typical(GENERIC)
    u = fx.unknot(a)
    g = wc.Degree(0.7)
    d = dg.stabilize_projective(ctx, u, 1, 0, g, wc.index_set(ctx, g)[0])
    assert dg.validate(ctx, d) is None
    # composing the two inserted coupons gives the identity on the edge
    s_cell = d.slices[1][0]
    p_cell = d.slices[2][0]
    comp = p_cell.matrix @ s_cell.matrix
    assert np.abs(comp - np.eye(comp.shape[0])).max() < 1e-10


def test_stabilize_generic_structure(ctx):
    a = wc.Typical(GENERIC)
    u = fx.unknot(a)
    d = dg.stabilize_generic(ctx, u, 1, (0, 1), wc.Degree(GENERIC))
    assert dg.validate(ctx, d) is None
    assert len(d.formal) == 2
    degs = {fc.degree(ctx).reduced() for fc in d.formal.values()}
    assert len(degs) == 1


def test_exchange_distant_cells(ctx):
    a = wc.Typical(GENERIC)
    b = wc.Typical(GENERIC2)
    # two split circles: their cap/cup slices act on disjoint ranges
    d = dg.tensor(fx.unknot(a), fx.unknot(b))
    count0 = d.component_count()
    v0 = rt_eval.f_prime(ctx, d)
    # find an exchangeable adjacent pair and swap it
    swapped = None
    for i in range(len(d.slices) - 1):
        try:
            swapped = dg.exchange_distant(d, i)
            break
        except ValueError:
            continue
    assert swapped is not None
    assert dg.validate(ctx, swapped) is None
    assert swapped.component_count() == count0
    assert abs(rt_eval.f_prime(ctx, swapped) - v0) < 1e-10 * max(1, abs(v0))
