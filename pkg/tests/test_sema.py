import pytest

from sandalc.corpus import MODEL_NAMES, corpus_source
from sandalc.errors import ArityError, NameResolutionError, SandalError, TypeCheckError
from sandalc.parser import parse_source
from sandalc.sema import (
    BOOL,
    EnumType,
    PAtom,
    instantiate,
    resolve_and_check,
)


def check(source):
    return resolve_and_check(parse_source(source))


def build_instance(source):
    return instantiate(check(source))


def test_two_phase_commit_resp_typed_in_both_templates():
    checked = check(corpus_source("2pc_allfaults"))
    response = checked.enums["Response"]
    assert isinstance(response, EnumType)
    for template in ("Arbiter", "Worker"):
        info = checked.templates[template]
        resp_slots = [s for s in info.slots if s.src_name == "resp"]
        assert resp_slots and all(s.type == response for s in resp_slots)


def test_wrong_payload_type_rejected():
    source = (
        "data Response { Ready, NotReady, Commit, Abort }\n"
        "proc P(c channel { Response }) { send(c, true) }\n"
        "init { c: channel { Response }, p: P(c) }"
    )
    with pytest.raises(TypeCheckError):
        check(source)


def test_unknown_ltl_instance_rejected():
    source = corpus_source("2pc_allfaults").replace("worker1.resp", "worker3.resp")
    with pytest.raises(NameResolutionError) as err:
        check(source)
    assert "worker3" in str(err.value)


def test_ltl_atom_must_be_top_level_variable():
    # the arbiter's `resp` is declared inside a loop body, not at proc level
    source = corpus_source("2pc_nofault").replace("worker1.resp", "arbiter.resp")
    with pytest.raises(NameResolutionError):
        check(source)


def test_pingpong_instantiation():
    instance = build_instance(corpus_source("pingpong"))
    assert [p.name for p in instance.processes] == ["P0", "P1"]
    assert [c.name for c in instance.channels] == [
        "receiver_to_starter",
        "starter_to_receiver",
    ]
    assert all(not c.type.is_buffered for c in instance.channels)
    assert all(not c.drop_fault for c in instance.channels)
    assert all(not p.shutdown_fault for p in instance.processes)


def test_two_phase_commit_instantiation():
    instance = build_instance(corpus_source("2pc_allfaults"))
    assert [p.name for p in instance.processes] == ["arbiter", "worker1", "worker2"]
    assert all(p.shutdown_fault for p in instance.processes)
    assert len(instance.channels) == 4
    assert all(c.drop_fault for c in instance.channels)
    arbiter = instance.processes[0]
    assert arbiter.chan_bindings["chRecvs"] == (0, 2)  # chWorker1Send, chWorker2Send
    assert arbiter.chan_bindings["chSends"] == (1, 3)


def test_empty_system_is_legal():
    instance = build_instance("init {}")
    assert instance.processes == ()
    assert instance.channels == ()


@pytest.mark.parametrize("name", MODEL_NAMES)
def test_marker_placement_invariant(name):
    instance = build_instance(corpus_source(name))
    # channels never carry shutdown, processes never carry drop: the decl
    # types make this impossible, so just confirm the fields line up
    assert all(isinstance(c.drop_fault, bool) for c in instance.channels)
    assert all(isinstance(p.shutdown_fault, bool) for p in instance.processes)


def test_instantiate_is_deterministic():
    source = corpus_source("2pc_allfaults")
    a = build_instance(source)
    b = build_instance(source)
    assert [p.name for p in a.processes] == [p.name for p in b.processes]
    assert [c.name for c in a.channels] == [c.name for c in b.channels]
    assert a.processes[0].chan_bindings == b.processes[0].chan_bindings


def test_zero_initialization_rule():
    checked = check(corpus_source("2pc_allfaults"))
    worker = checked.templates["Worker"]
    resp = next(s for s in worker.slots if s.src_name == "resp")
    assert resp.zero == "Ready"  # first declared constructor
    arbiter = checked.templates["Arbiter"]
    determined = next(s for s in arbiter.slots if s.src_name == "determined")
    assert determined.zero is False


def test_ltl_atoms_resolve_to_process_and_slot():
    instance = build_instance(corpus_source("2pc_allfaults"))
    formula = instance.ltl_specs[0].formula
    atoms = []

    def walk(p):
        if isinstance(p, PAtom):
            atoms.append(p)
        for child in getattr(p, "__dict__", {}).values():
            if hasattr(child, "__dataclass_fields__"):
                walk(child)

    walk(formula)
    names = {(a.proc_name, a.var_name) for a in atoms}
    assert names == {
        ("arbiter", "determined"),
        ("arbiter", "all_ready"),
        ("worker1", "resp"),
        ("worker2", "resp"),
    }
    arbiter_atom = next(a for a in atoms if a.var_name == "determined")
    assert arbiter_atom.proc == 0
    assert arbiter_atom.type == BOOL


class TestRejections:
    def test_recv_target_count_mismatch(self):
        source = (
            "proc P(c channel { bool, bool }) { var x bool\n  recv(c, x) }\n"
            "init { c: channel { bool, bool }, p: P(c) }"
        )
        with pytest.raises(ArityError):
            check(source)

    def test_recv_target_type_mismatch(self):
        source = (
            "data V { A, B }\n"
            "proc P(c channel { V }) { var x bool\n  recv(c, x) }\n"
            "init { c: channel { V }, p: P(c) }"
        )
        with pytest.raises(TypeCheckError):
            check(source)

    def test_receive_expression_outside_boolean_position(self):
        source = (
            "proc P(c channel { bool }) { var x bool\n  send(c, timeout_recv(c, x)) }\n"
            "init { c: channel { bool }, p: P(c) }"
        )
        with pytest.raises(SandalError):
            check(source)

    def test_receive_target_must_be_a_local_variable(self):
        source = (
            "proc P(c channel { bool }, flag bool) { recv(c, flag) }\n"
            "init { c: channel { bool }, p: P(c, true) }"
        )
        with pytest.raises(TypeCheckError) as err:
            check(source)
        assert err.value.pos.line >= 1

    def test_peek_on_rendezvous_rejected(self):
        source = (
            "proc P(c channel { bool }) { var x bool\n  peek(c, x) }\n"
            "init { c: channel { bool }, p: P(c) }"
        )
        with pytest.raises(TypeCheckError) as err:
            check(source)
        assert "buffered" in str(err.value)

    def test_cross_enum_comparison_rejected(self):
        source = (
            "data V { A }\ndata W { B }\n"
            "proc P() { var x V\n  var y W\n  if x == y { x = A } }\n"
            "init { p: P() }"
        )
        with pytest.raises(TypeCheckError):
            check(source)

    def test_non_bool_condition_rejected(self):
        source = (
            "data V { A }\n"
            "proc P() { var x V\n  if x { x = A } }\n"
            "init { p: P() }"
        )
        with pytest.raises(TypeCheckError):
            check(source)

    def test_for_over_non_array_rejected(self):
        source = (
            "proc P(c channel { bool }) { for x in c { send(x, true) } }\n"
            "init { c: channel { bool }, p: P(c) }"
        )
        with pytest.raises(TypeCheckError):
            check(source)

    def test_assignment_to_parameter_rejected(self):
        source = "proc P(flag bool) { flag = true }\ninit { p: P(true) }"
        with pytest.raises(TypeCheckError):
            check(source)

    def test_unknown_template_rejected(self):
        with pytest.raises(NameResolutionError):
            check("init { p: Ghost() }")

    def test_duplicate_instance_names_rejected(self):
        with pytest.raises(NameResolutionError):
            check("init { c: channel { bool }, c: channel { bool } }")

    def test_argument_arity_checked(self):
        source = "proc P(c channel { bool }) { send(c, true) }\ninit { p: P() }"
        with pytest.raises(ArityError):
            check(source)

    def test_channel_kind_must_match_parameter(self):
        source = (
            "proc P(c channel { bool }) { send(c, true) }\n"
            "init { b: channel [2] { bool }, p: P(b) }"
        )
        with pytest.raises(TypeCheckError):
            check(source)

    def test_duplicate_constructor_across_enums_rejected(self):
        with pytest.raises(NameResolutionError):
            check("data V { A }\ndata W { A }\ninit {}")

    def test_shadowed_redeclaration_in_same_scope_rejected(self):
        source = "proc P() { var x bool\n  var x bool }\ninit { p: P() }"
        with pytest.raises(NameResolutionError):
            check(source)


def test_sibling_arrays_may_have_different_lengths():
    """Array arguments are independent; no lock-step length check."""
    source = (
        "proc P(xs []channel { bool }, ys []channel { bool }) {\n"
        "  for x in xs { send(x, true) }\n"
        "  for y in ys { send(y, true) }\n"
        "}\n"
        "init { a: channel { bool }, b: channel { bool }, c: channel { bool },\n"
        "  p: P([a], [b, c]) }"
    )
    instance = build_instance(source)
    assert instance.processes[0].chan_bindings == {"xs": (0,), "ys": (1, 2)}


def test_value_parameters_substituted():
    source = (
        "data V { A, B }\n"
        "proc P(c channel { V }, what V, go bool) {\n"
        "  if go { send(c, what) }\n"
        "}\n"
        "init { c: channel { V }, p: P(c, B, true) }"
    )
    instance = build_instance(source)
    assert instance.processes[0].const_bindings == {"what": "B", "go": True}


def test_value_parameter_wrong_type_rejected():
    source = (
        "data V { A, B }\n"
        "proc P(go bool) { var x bool\n  x = go }\n"
        "init { p: P(B) }"
    )
    with pytest.raises(TypeCheckError):
        check(source)


def test_nested_scopes_may_shadow():
    source = (
        "proc P() {\n"
        "  var x bool\n"
        "  if x {\n"
        "    var x bool\n"
        "    x = true\n"
        "  }\n"
        "}\n"
        "init { p: P() }"
    )
    checked = check(source)
    info = checked.templates["P"]
    assert [s.name for s in info.slots] == ["x", "x_2"]
    assert info.body_level == {"x": 0}  # ltl sees the proc-level one
