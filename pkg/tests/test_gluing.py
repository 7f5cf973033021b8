import json

import pytest

from lieposet.algebras import build_g, build_gA
from lieposet.forms import in_kernel, index, is_contact_form, kernel
from lieposet.posets import Poset
from lieposet.toral import (
    ConstructionScript,
    GlueError,
    ScriptError,
    ScriptStep,
    block,
    disconnected_contact_check,
    ext_hasse_has_cycle,
    glue,
    index_delta_check,
    index_formula,
    is_contact_sequence,
    random_toral_script,
    run_script,
)


def script_of(*specs):
    steps = []
    for i, spec in enumerate(specs):
        if i == 0:
            bid, n = spec
            steps.append(ScriptStep(block_id=bid, n=n))
        else:
            bid, n, rule, identify = spec
            steps.append(
                ScriptStep(
                    block_id=bid, n=n, rule=rule, identify=tuple(sorted(identify.items()))
                )
            )
    return ConstructionScript(steps)


def test_glue_a1_reproduces_two_chain_shape():
    chain3 = Poset.chain(3)
    claw = block("pendant_chain", 4)  # 1 < 2 < {3,4}
    result = glue(chain3, claw, "A1", {"a1": 3})
    expected = Poset.from_covers(
        6, [(1, 2), (2, 3), (4, 5), (5, 3), (5, 6)]
    )
    assert result.poset.is_isomorphic_to(expected)
    # the merged vertex keeps its target's identity through q_map
    assert result.q_map[3] == result.s_map[3]


def test_glue_validation_errors():
    chain3 = Poset.chain(3)
    claw = block("pendant_chain", 4)
    with pytest.raises(GlueError):
        glue(chain3, claw, "A1", {"a2": 3})  # wrong role set
    with pytest.raises(GlueError):
        glue(chain3, claw, "A1", {"a1": 1})  # target not maximal
    with pytest.raises(GlueError):
        glue(chain3, claw, "Z9", {"a1": 3})
    with pytest.raises(GlueError):
        glue(chain3, block("chain2"), "A2", {"a2": 3})  # chain2 has no a2
    with pytest.raises(GlueError):
        glue(chain3, claw, "B", {"a1": 3, "a2": 3})  # duplicate targets


def test_glue_d1_requires_related_target():
    claw_poset = block("pendant_chain", 4).poset  # min 1, maxima {3,4}
    chain2 = block("chain2")
    ok = glue(claw_poset, chain2, "D1", {"c": 1, "a1": 3})
    assert ok.poset.n == 4  # nothing fresh
    # unrelated pair demands rule E1, not D1
    two_claws = glue(claw_poset, block("pendant_chain", 4), "A1", {"a1": 3}).poset
    ext = two_claws.extremal_data()
    mins = sorted(ext.minimal)
    maxs = sorted(ext.maximal)
    x = mins[0]
    unrelated = [y for y in maxs if not two_claws.related(x, y)]
    related = [y for y in maxs if two_claws.related(x, y)]
    assert unrelated and related
    with pytest.raises(GlueError):
        glue(two_claws, chain2, "D1", {"c": x, "a1": unrelated[0]})
    with pytest.raises(GlueError):
        glue(two_claws, chain2, "E1", {"c": x, "a1": related[0]})
    assert glue(two_claws, chain2, "E1", {"c": x, "a1": unrelated[0]}).poset.n == two_claws.n


def test_glue_adds_no_cross_relations():
    # relations of the result are exactly the relabeled union: merged
    # vertices stay extremal on both sides so no new compositions appear
    import random

    rng = random.Random(0)
    for _ in range(12):
        script = random_toral_script(
            seed=rng.randint(0, 999), length=2, allow_contact=False, max_dim=45
        )
        q_poset = script.steps[0].block().poset
        blk = script.steps[1].block()
        rule = script.steps[1].rule
        identify = dict(script.steps[1].identify)
        result = glue(q_poset, blk, rule, identify)
        expected = {
            (result.q_map[p], result.q_map[q]) for p, q in q_poset.relations
        } | {(result.s_map[p], result.s_map[q]) for p, q in blk.poset.relations}
        assert result.poset.relations == frozenset(expected)


def test_glue_min_max_side_enforced():
    chain3 = Poset.chain(3)
    cup = block("pendant_chain_dual", 4)  # {1,2} < 3 < 4; c = 4 maximal
    with pytest.raises(GlueError):
        glue(chain3, cup, "C", {"c": 1})  # c maximal in block, 1 minimal in Q
    assert glue(chain3, cup, "C", {"c": 3}).poset.n == 6


def test_run_script_single_block():
    script = script_of(("contact_chain3", None))
    result = run_script(script)
    assert result.poset == Poset.chain(3)
    assert result.form.support == {(1, 1), (1, 3), (2, 3)}
    assert result.audits[0].added == [(1, 1), (1, 3), (2, 3)]


def test_run_script_rejects_late_contact_block():
    script = script_of(
        ("six_a", None),
        ("contact_chain3", None, "C", {"c": 1}),
    )
    with pytest.raises(ScriptError):
        run_script(script)
    # without form building the poset still glues
    assert run_script(script, build_form=False).poset.n == 8


def test_script_json_roundtrip():
    script = script_of(
        ("contact_fork", None),
        ("six_a", None, "A1", {"a1": 5}),
        ("chain2", None, "C", {"c": 1}),
    )
    data = json.loads(json.dumps(script.to_json()))
    back = ConstructionScript.from_json(data)
    assert back == script


def test_is_contact_sequence():
    good = script_of(
        ("contact_fork", None),
        ("six_a", None, "A1", {"a1": 5}),
    )
    assert is_contact_sequence(good)
    no_contact = script_of(
        ("six_a", None),
        ("chain2", None, "C", {"c": 1}),
    )
    assert not is_contact_sequence(no_contact)
    bad_rule = script_of(
        ("contact_fork", None),
        ("six_a", None, "B", {"a1": 4, "a2": 5}),
    )
    assert not is_contact_sequence(bad_rule)


def test_d1_subtraction_keeps_unit_coefficients():
    # glue a chain2 across a related min-max pair: its edge summand is
    # already present, so one copy is subtracted
    script = script_of(
        ("contact_chain3", None),
        ("chain2", None, "D1", {"c": 1, "a1": 3}),
    )
    result = run_script(script)
    assert result.poset == Poset.chain(3)
    assert result.form.support == {(1, 1), (1, 3), (2, 3)}
    assert all(c == 1 for c in result.form.coeffs.values())
    assert result.audits[1].subtracted == [(1, 3)]


def test_f_rule_subtracts_both_edges():
    # six_a_dual has two minimal roles; glue onto a poset with two minima
    base = run_script(
        script_of(
            ("contact_fork_dual", None),
        ),
        build_form=False,
    ).poset
    blk = block("six_a_dual")
    ext = base.extremal_data()
    mins = sorted(ext.minimal)
    maxs = sorted(ext.maximal)
    result = glue(base, blk, "F", {"c": maxs[0], "a1": mins[0], "a2": mins[1]})
    assert result.poset.n == base.n + 3


def test_index_formula_frobenius_script():
    script = script_of(
        ("six_a", None),
        ("pendant_chain", 4, "A1", {"a1": 5}),
        ("chain2", None, "C", {"c": 1}),
    )
    result = run_script(script, build_form=False)
    assert index_formula(result.poset, script) == 0
    assert index(build_gA(result.poset), seed=3) == 0


def test_index_formula_contact_script():
    script = script_of(
        ("contact_chain4", None),
        ("six_a", None, "A1", {"a1": 4}),
    )
    result = run_script(script)
    assert index_formula(result.poset, script) == 1
    assert index(build_gA(result.poset), seed=3) == 1


def test_index_delta_rule_b():
    # rule B adds one to the index over a Frobenius block
    q = block("pendant_chain", 4).poset
    blk = block("pendant_chain", 4)
    expected, computed = index_delta_check(q, blk, "B", {"a1": 3, "a2": 4}, seed=5)
    assert expected == 1 and computed == 1


def test_index_delta_rule_e1():
    base = glue(
        block("pendant_chain", 4).poset, block("pendant_chain", 4), "A1", {"a1": 3}
    ).poset
    ext = base.extremal_data()
    x = sorted(ext.minimal)[0]
    z = next(y for y in sorted(ext.maximal) if not base.related(x, y))
    expected, computed = index_delta_check(
        base, block("chain2"), "E1", {"c": x, "a1": z}, seed=5
    )
    assert expected == 1 and computed == 1


def test_ext_hasse_cycle_example():
    poset = Poset.from_covers(
        7, [(1, 3), (1, 4), (3, 6), (4, 6), (4, 7), (2, 4), (2, 5)]
    )
    assert ext_hasse_has_cycle(poset)
    assert not ext_hasse_has_cycle(Poset.chain(4))
    assert not ext_hasse_has_cycle(block("six_a").poset)


def test_disconnected_contact_check():
    frob_a = block("six_a").poset
    frob_b = block("diamond_stack", 3).poset
    two = frob_a.disjoint_sum(frob_b)
    assert disconnected_contact_check(two)
    three = two.disjoint_sum(block("chain2").poset)
    assert not disconnected_contact_check(three)
    with_odd = frob_a.disjoint_sum(Poset.chain(3))
    assert not disconnected_contact_check(with_odd)
    with pytest.raises(ValueError):
        disconnected_contact_check(frob_a)


def test_random_script_reproducible():
    a = random_toral_script(seed=7, length=4, allow_contact=True)
    b = random_toral_script(seed=7, length=4, allow_contact=True)
    assert a == b
    # every generated step must replay cleanly
    assert run_script(a, build_form=False).poset.n >= a.steps[0].block().poset.n


def test_random_script_single_contact_block():
    script = random_toral_script(seed=1, length=1, allow_contact=True)
    assert len(script.steps) == 1
    assert script.contact_block_count() == 1


def test_random_frobenius_scripts_have_index_zero():
    for seed in range(6):
        script = random_toral_script(
            seed=seed, length=4, allow_contact=False, rule_pool=sorted({"A1", "A2", "C", "D1", "D2", "F"}),
            max_dim=50,
        )
        result = run_script(script, build_form=False)
        assert index(build_gA(result.poset), seed=seed) == 0
        assert index_formula(result.poset, script) == 0


def test_random_contact_scripts_build_contact_forms():
    for seed in range(4):
        script = random_toral_script(
            seed=seed,
            length=3,
            allow_contact=True,
            rule_pool=sorted({"A1", "A2", "C", "D1", "D2", "F"}),
            max_dim=50,
        )
        assert is_contact_sequence(script)
        result = run_script(script)
        gA = build_gA(result.poset)
        assert is_contact_form(gA, result.form, seed=seed).is_contact


def test_form_building_under_index_raising_rules():
    # rules outside the index-preserving set still build a sane form:
    # unit coefficients, one subtraction per merged related edge
    script = script_of(
        ("six_a", None),
        ("pendant_chain", 4, "B", {"a1": 5, "a2": 6}),
    )
    result = run_script(script)
    assert all(c == 1 for c in result.form.coeffs.values())
    assert result.audits[1].subtracted == []

    base_script = script_of(
        ("pendant_chain", 4, ),
        ("pendant_chain", 4, "A1", {"a1": 3}),
    )
    base = run_script(base_script)
    x = min(base.poset.minimal_elements)
    rel = [y for y in sorted(base.poset.maximal_elements) if base.poset.related(x, y)]
    unrel = [
        y for y in sorted(base.poset.maximal_elements) if not base.poset.related(x, y)
    ]
    g1 = ConstructionScript(
        list(base_script.steps)
        + [
            ScriptStep(
                block_id="pendant_chain",
                n=4,
                rule="G1",
                identify=tuple(sorted({"c": x, "a1": rel[0], "a2": unrel[0]}.items())),
            )
        ]
    )
    result = run_script(g1)
    assert all(c == 1 for c in result.form.coeffs.values())
    assert len(result.audits[2].subtracted) == 1


def test_restriction_property_of_built_kernels():
    # kernel elements restrict into each prefix and block kernel
    script = script_of(
        ("contact_chain4", None),
        ("six_a", None, "A1", {"a1": 4}),
        ("chain2", None, "C", {"c": 1}),
    )
    result = run_script(script)
    g_final = build_g(result.poset)
    rep = kernel(g_final, result.form)
    maps = result.block_to_final_maps()
    for vec in rep.vectors:
        elem = g_final.element(vec)
        for i, step in enumerate(script.steps):
            blk = step.block()
            g_blk = build_g(blk.poset)
            from lieposet.forms import restrict_element

            restricted = restrict_element(elem, maps[i], g_blk)
            assert in_kernel(g_blk, blk.form, restricted), (i, step.block_id)


def test_contact_script_outputs_have_acyclic_ext_hasse():
    for seed in range(8):
        script = random_toral_script(
            seed=seed,
            length=3,
            allow_contact=True,
            rule_pool=("A1", "A2", "C", "D1", "D2", "F"),
            max_dim=50,
        )
        result = run_script(script, build_form=False)
        assert not ext_hasse_has_cycle(result.poset), seed


def test_built_support_is_union_of_block_supports():
    # every added summand stays a summand: subtractions only cancel the
    # duplicate copy created by merging an extremal edge
    for seed in range(8):
        script = random_toral_script(
            seed=seed,
            length=4,
            allow_contact=True,
            rule_pool=("A1", "A2", "C", "D1", "D2", "F"),
            max_dim=50,
        )
        result = run_script(script)
        union = set()
        for audit in result.audits:
            union |= set(audit.added)
        assert result.form.support == frozenset(union), seed
        assert all(c == 1 for c in result.form.coeffs.values())


def test_diagonal_kill_kills_support_on_built_forms():
    # solutions of the diagonal-bracket conditions vanish on every strict
    # summand of the built form
    from fractions import Fraction

    from lieposet.forms import dphi_matrix
    from lieposet.linalg import RatMatrix, kernel_basis

    for seed in (2, 5, 11):
        script = random_toral_script(
            seed=seed,
            length=3,
            allow_contact=True,
            rule_pool=("A1", "A2", "C", "D1", "D2", "F"),
            max_dim=45,
        )
        result = run_script(script)
        g = build_g(result.poset)
        m = dphi_matrix(g, result.form)
        diag_rows = [
            m.rows[i] for i, lab in enumerate(g.labels) if lab[0] == "d"
        ]
        for vec in kernel_basis(RatMatrix(diag_rows)):
            coords = g.to_matrix_coords(vec)
            for pq in result.form.strict_support:
                assert coords.get(pq, Fraction(0)) == 0, (seed, pq)


def test_extremal_diagonal_equality_on_contact_blocks():
    # full-kernel elements match diagonal coordinates across related
    # extremal pairs
    from fractions import Fraction

    for bid, n in (
        ("contact_chain3", None),
        ("contact_fork", None),
        ("contact_fork_dual", None),
        ("contact_pendant_high", 6),
        ("contact_pendant_low", 7),
    ):
        blk = block(bid, n)
        g = build_g(blk.poset)
        rep = kernel(g, blk.form)
        ext = blk.poset.extremal_data()
        for coords in rep.coords:
            for p, q in ext.rel_e:
                assert coords.get((p, p), Fraction(0)) == coords.get(
                    (q, q), Fraction(0)
                ), (bid, (p, q))


def test_prefix_forms_satisfy_contact_conditions():
    # the built form passes the contact verifier at every prefix
    from lieposet.toral import verify_contact_toral_pair

    script = script_of(
        ("contact_fork", None),
        ("six_a", None, "A1", {"a1": 5}),
        ("chain2", None, "C", {"c": 1}),
    )
    result = run_script(script)
    for poset, form in zip(result.prefix_posets, result.prefix_forms):
        rep = verify_contact_toral_pair(poset, form)
        for name in (
            "cf1_diagonal_at_one",
            "cf2_small",
            "cf3_updown_partition",
            "cf4_extremal_edges",
            "contact",
        ):
            assert rep.conditions[name], (poset.n, name, rep.failed())
