import itertools

import numpy as np
import pytest

from cgpkit import diagrams as dg
from cgpkit import fixtures as fx
from cgpkit import surgery as sg
from cgpkit import surgery_fixtures as sfx
from cgpkit import weightcat as wc

GENERIC = 0.37 + 0.2j


def test_linking_data_examples(ctx6):
    ph = sfx._placeholder(ctx6)
    # +1 framed unknot
    u = fx.unknot(ph, framing=1)
    comp = u.ports_and_components()[(1, 0)]
    p = sg.SurgeryPresentation(u, frozenset({comp}), {comp: wc.Degree(0.5)})
    link = sg.linking_data(ctx6, p)
    assert link.matrix.tolist() == [[1]] and link.signature == 1
    # 0 framed 2-component unlink
    two = dg.tensor(fx.unknot(ph), fx.unknot(ph))
    comps = sorted(set(two.ports_and_components().values()))
    p2 = sg.SurgeryPresentation(two, frozenset(comps),
                                {c: wc.Degree(0.5) for c in comps})
    link2 = sg.linking_data(ctx6, p2)
    assert np.all(link2.matrix == 0) and link2.signature == 0
    # positive Hopf link, 0 writhe: eigenvalues +-1
    hopf = fx.hopf_link(ph, ph)
    comps = sorted(set(hopf.ports_and_components().values()))
    p3 = sg.SurgeryPresentation(hopf, frozenset(comps),
                                {comps[0]: wc.Degree(0.5),
                                 comps[1]: wc.Degree(-0.5)})
    link3 = sg.linking_data(ctx6, p3)
    assert link3.matrix.tolist() in ([[0, 1], [1, 0]],)
    assert link3.signature == 0


def test_exact_signature_routes():
    mat = np.array([[6, 1], [1, 1]])
    assert sg._signature_exact(mat) == 2
    assert sg._signature_exact(np.array([[0, 1], [1, 0]])) == 0
    assert sg._signature_exact(np.array([[-3]])) == -1
    assert sg._signature_exact(np.zeros((3, 3), dtype=int)) == 0
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        m = rng.integers(-4, 5, (n, n))
        m = m + m.T
        vals = np.linalg.eigvalsh(m.astype(float))
        want = int((vals > 1e-9).sum()) - int((vals < -1e-9).sum())
        assert sg._signature_exact(m) == want


def test_check_computable(ctx6):
    p = sfx.s1xs2_presentation(ctx6, 0.5)
    assert sg.check_computable(ctx6, p) == []
    p2 = sfx.s1xs2_presentation(ctx6, 1.0)
    assert len(sg.check_computable(ctx6, p2)) == 1
    p3 = sfx.s1xs2_presentation(ctx6, 0.5 + 0.0j)
    assert sg.check_computable(ctx6, p3) == []


def test_cohomology_constraint_enforced(ctx6):
    ph = sfx._placeholder(ctx6)
    base = fx.unknot(ph, framing=1)
    d = dg.encircle_at(base, 1, (0, 1), wc.Typical(GENERIC), framing=0)
    comp = d.ports_and_components()[(1, 0)]
    # framing 1 with a generic-degree meridian circle cannot balance
    p = sg.SurgeryPresentation(d, frozenset({comp}), {comp: wc.Degree(0.5)})
    with pytest.raises(ValueError):
        sg.validate_presentation(ctx6, p)


def test_cgp_unknot_axiom(ctx):
    a = GENERIC
    c = wc.constants(ctx)
    v = sg.cgp(ctx, sfx.unknot_presentation(ctx, a))
    assert abs(v - c.eta * wc.modified_dimension(ctx, a)) < 1e-10


def test_cgp_blowdown_pair(ctx):
    a = GENERIC
    for mf in (1, -1):
        vm = sg.cgp(ctx, sfx.surgery_meridian_presentation(ctx, a, mf))
        vref = sg.cgp(ctx, sfx.unknot_presentation(ctx, a, framing=-mf))
        assert abs(vm - vref) <= 1e-8 * max(1.0, abs(vref))


def test_cgp_s1xs2(ctx):
    c = wc.constants(ctx)
    g = wc.Degree(0.5)
    v = sg.cgp(ctx, sfx.s1xs2_presentation(ctx, 0.5))
    om = wc.kirby_color(ctx, g)
    expect = c.eta / c.D * sum(
        coeff * wc.modified_dimension(ctx, complex(col.alpha))
        for coeff, col in om.terms)
    assert abs(v - expect) < 1e-9 * max(1.0, abs(expect))


def test_cgp_index2_pair(ctx6):
    c = wc.constants(ctx6)
    pa, pb = sfx.index2_pair(ctx6, wc.Degree(0.5))
    ratio = sg.cgp(ctx6, pb) / sg.cgp(ctx6, pa)
    assert abs(ratio - 1 / c.D) < 1e-9


def test_cgp_multiplicative_disjoint(ctx6):
    a, b = GENERIC, 0.8 + 0.3j
    p1 = sfx.unknot_presentation(ctx6, a)
    p2 = sfx.unknot_presentation(ctx6, b)
    v = sg.cgp_disjoint(ctx6, [p1, p2])
    assert abs(v - sg.cgp(ctx6, p1) * sg.cgp(ctx6, p2)) < 1e-12


def test_cgp_not_computable_and_admissible(ctx6):
    # admissible through the typical circle, but the reading is critical
    p = sfx.s1xs2_decorated_presentation(ctx6, 0.0, [2.0])
    with pytest.raises(sg.NotComputable):
        sg.cgp(ctx6, p, auto=False)
    with pytest.raises(sg.NotAdmissible):
        # critical reading and no typical edge anywhere
        sg.cgp(ctx6, sfx.s1xs2_presentation(ctx6, 0.0), auto=False)


def test_projective_stabilization_invariance(ctx):
    a = GENERIC
    p0 = sfx.unknot_presentation(ctx, a)
    v0 = sg.cgp(ctx, p0)
    d = dg.stabilize_projective(ctx, p0.diagram, 1, 0, wc.Degree(0.7),
                                wc.index_set(ctx, wc.Degree(0.7))[0])
    v1 = sg.cgp(ctx, sg.SurgeryPresentation(d, frozenset(), {}))
    assert abs(v1 - v0) <= 1e-9 * max(1.0, abs(v0))


def test_generic_stabilization_invariance(ctx):
    a = GENERIC
    p0 = sfx.unknot_presentation(ctx, a)
    v0 = sg.cgp(ctx, p0)
    d = dg.stabilize_generic(ctx, p0.diagram, 1, (0, 1), wc.Degree(a))
    v1 = sg.cgp(ctx, sg.SurgeryPresentation(d, frozenset(), {}))
    assert abs(v1 - v0) <= 1e-9 * max(1.0, abs(v0))


def test_generic_stabilization_s1xs2_and_double_surgery(ctx6):
    ps = sfx.s1xs2_presentation(ctx6, 0.5)
    vs = sg.cgp(ctx6, ps)
    d2 = dg.stabilize_generic(ctx6, ps.diagram, 1, (0, 1), wc.Degree(0.5))
    surg = d2.ports_and_components()[(1, 0)]
    ps2 = sg.SurgeryPresentation(d2, frozenset({surg}), {surg: wc.Degree(0.5)})
    assert abs(sg.cgp(ctx6, ps2) - vs) <= 1e-9 * max(1.0, abs(vs))
    # undo by a double index-2 surgery: both circles become surgery
    # components and the stabilization prefactor is dropped
    c = wc.constants(ctx6)
    formal_comps = sorted(d2.formal)
    d3 = dg.Diagram(d2.source, [list(s) for s in d2.slices],
                    d2.prefactor * (c.delta_minus * c.delta_plus), {})
    mer = {surg: wc.Degree(0.5)}
    for comp in formal_comps:
        mer[comp] = wc.Degree(0.5)
    ps3 = sg.SurgeryPresentation(d3, frozenset(mer), mer)
    assert abs(sg.cgp(ctx6, ps3) - vs) <= 1e-9 * max(1.0, abs(vs))


def test_lens_handle_slide_pair(ctx6):
    for k in (0, 1):
        va = sg.cgp(ctx6, sfx.lens_unknot_presentation(ctx6, 5, k))
        vb = sg.cgp(ctx6, sfx.slid_lens_presentation(ctx6, 5, k))
        assert abs(va - vb) <= 1e-7 * max(1.0, abs(va), abs(vb))


def test_lens_spaces_distinguished(ctx6):
    vals1 = [sg.cgp(ctx6, sfx.lens_unknot_presentation(ctx6, 5, k))
             for k in range(4)]
    vals2 = [sg.cgp(ctx6, sfx.lens_chain_presentation(ctx6, 2, 3, k))
             for k in range(4)]
    best = min(max(abs(a - b) for a, b in zip(vals1, p))
               for p in itertools.permutations(vals2))
    assert best > 1e-3


def test_auto_stabilize_unchanged_when_computable(ctx6):
    p = sfx.s1xs2_presentation(ctx6, 0.5)
    assert sg.auto_stabilize(ctx6, p) is p


def test_auto_stabilize_critical_meridian_fixture(ctx6):
    p = sfx.s1xs2_decorated_presentation(ctx6, 0.0, [2.0])
    assert sg.check_computable(ctx6, p)
    v1 = sg.cgp(ctx6, p, auto=True)
    v2 = sg.cgp(ctx6, sg.auto_stabilize(ctx6, p, index=wc.Degree(0.85)))
    assert abs(v1 - v2) < 1e-9


def test_auto_stabilize_slide_consistency(ctx6):
    """Threading a computable component leaves the invariant unchanged."""
    ph = sfx._placeholder(ctx6)
    T = wc.Typical(2.0)
    base = fx.unknot(ph)
    d = dg.encircle_at(base, 1, (0, 1), T, framing=0)
    d = dg.encircle_at(d, 1, (0, 1), ph, framing=2)
    d = dg.encircle_at(d, 1, (1, 2), ph, framing=3)
    u2 = d.ports_and_components()[(1, 0)]
    wr = {}
    for a, b, s_, _, _ in d.crossing_records():
        if a == b:
            wr[a] = wr.get(a, 0) + s_
    colors = d.component_colors()
    others = sorted(c for c, col in colors.items() if col == ph and c != u2)
    u1 = next(c for c in others if wr.get(c, 0) == 2)
    u3 = next(c for c in others if wr.get(c, 0) == 3)
    p = sg.SurgeryPresentation(
        d, frozenset({u1, u2, u3}),
        {u2: wc.Degree(-5.6 + 0j), u1: wc.Degree(0.8 + 0j),
         u3: wc.Degree(-3.2 + 0j)})
    v_direct = sg.cgp(ctx6, p)
    # thread the (computable) middle component: the reading drops by the
    # index, and the value of the presented manifold is unchanged
    stab = sg._thread_detour(ctx6, p, u2, wc.Degree(0.55))
    v_thread = sg.cgp(ctx6, stab)
    assert abs(v_thread - v_direct) <= 1e-8 * max(1.0, abs(v_direct))


def test_auto_stabilize_split_unknot(ctx6):
    a = GENERIC
    c = wc.constants(ctx6)
    for fr in (1, -1):
        ps = sfx.split_surgery_unknot_presentation(ctx6, a, fr)
        v = sg.cgp(ctx6, ps, auto=True)
        expect = c.eta * wc.modified_dimension(ctx6, a)
        assert abs(v - expect) <= 1e-8 * max(1.0, abs(expect))


def test_kirby_equivalence_suite_report(ctx6):
    fixtures = [
        ("blowdown+1", sfx.surgery_meridian_presentation(ctx6, GENERIC, 1),
         sfx.unknot_presentation(ctx6, GENERIC, framing=-1)),
        ("lens-slide", sfx.lens_unknot_presentation(ctx6, 5, 1),
         sfx.slid_lens_presentation(ctx6, 5, 1)),
    ]
    report = sg.kirby_equivalence_suite(ctx6, fixtures)
    assert all(entry["pass"] for entry in report)


def test_cgp_jobs_parallel(ctx6):
    p = sfx.lens_unknot_presentation(ctx6, 5, 1)
    v1 = sg.cgp(ctx6, p, jobs=1)
    v4 = sg.cgp(ctx6, p, jobs=4)
    assert abs(v1 - v4) < 1e-12
