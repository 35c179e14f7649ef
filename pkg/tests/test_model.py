"""Assembly: implicit declaration, uniqueness errors, determinism."""

import pytest

from tmkit import (
    DanglingRefError,
    DuplicateArcError,
    DuplicatePathError,
    StageKind,
    StageRef,
    UnknownParentError,
    assemble_model,
    canonical_signature,
    parse,
    simplify,
)
from tmkit.model import (
    BehaviorDecl,
    EventDecl,
    FlowDecl,
    InvalidArcError,
    ThimacDecl,
    TriggerDecl,
)


def _coffee_decls():
    return [
        ThimacDecl("Mill"),
        FlowDecl(
            "Beans",
            (StageRef("Mill", StageKind.RECEIVE), StageRef("Mill", StageKind.PROCESS)),
        ),
        FlowDecl(
            "Electricity",
            (StageRef("Mill", StageKind.TRANSFER), StageRef("Mill", StageKind.RECEIVE)),
        ),
        TriggerDecl(
            StageRef("Mill", StageKind.PROCESS), StageRef("Powder", StageKind.CREATE)
        ),
    ]


def test_empty_model_has_only_anonymous_root():
    model = assemble_model([])
    assert list(model.thimacs) == [""]
    assert model.flows == ()
    assert model.triggers == ()


def test_coffee_mill_shape():
    model = assemble_model(_coffee_decls())
    # root, Mill, and the implicitly created Powder
    assert len(model.thimacs) == 3
    assert set(model.thimacs) == {"", "Mill", "Powder"}
    assert len(model.flows) == 2
    assert len(model.triggers) == 1
    assert model.thimacs["Mill"].stages == {
        StageKind.RECEIVE,
        StageKind.PROCESS,
        StageKind.TRANSFER,
    }
    assert model.thimacs["Powder"].stages == {StageKind.CREATE}


def test_duplicate_thimac_path_rejected():
    with pytest.raises(DuplicatePathError):
        assemble_model([ThimacDecl("Mill"), ThimacDecl("Mill")])


def test_implicit_then_explicit_is_not_a_duplicate():
    decls = _coffee_decls()
    model = assemble_model(decls + [ThimacDecl("Powder")])
    assert "Powder" in model.thimacs
    with pytest.raises(DuplicatePathError):
        assemble_model(decls + [ThimacDecl("Powder"), ThimacDecl("Powder")])


def test_unknown_parent_for_explicit_dotted_path():
    with pytest.raises(UnknownParentError):
        assemble_model([ThimacDecl("Mill.Motor")])
    model = assemble_model([ThimacDecl("Mill"), ThimacDecl("Mill.Motor")])
    assert model.thimacs["Mill"].children == ("Mill.Motor",)


def test_implicit_reference_creates_ancestors():
    model = assemble_model(
        [
            FlowDecl(
                "X",
                (
                    StageRef("A.B.C", StageKind.RELEASE),
                    StageRef("A.B.C", StageKind.TRANSFER),
                ),
            )
        ]
    )
    assert set(model.thimacs) == {"", "A", "A.B", "A.B.C"}


def test_dangling_ref_when_implicit_disabled():
    decls = [
        FlowDecl(
            "X",
            (StageRef("A", StageKind.CREATE), StageRef("A", StageKind.PROCESS)),
        )
    ]
    assemble_model(decls)  # fine by default
    with pytest.raises(DanglingRefError):
        assemble_model(decls, implicit_decls=False)
    ok = assemble_model([ThimacDecl("A")] + decls, implicit_decls=False)
    assert ok.thimacs["A"].stages == {StageKind.CREATE, StageKind.PROCESS}


def test_duplicate_flow_arc_rejected():
    ref1 = StageRef("A", StageKind.CREATE)
    ref2 = StageRef("A", StageKind.PROCESS)
    with pytest.raises(DuplicateArcError):
        assemble_model([FlowDecl("X", (ref1, ref2)), FlowDecl("X", (ref1, ref2))])
    # same endpoints under a different thing label are fine
    model = assemble_model([FlowDecl("X", (ref1, ref2)), FlowDecl("Y", (ref1, ref2))])
    assert len(model.flows) == 2


def test_duplicate_trigger_rejected():
    src = StageRef("A", StageKind.PROCESS)
    dst = StageRef("B", StageKind.CREATE)
    with pytest.raises(DuplicateArcError):
        assemble_model([TriggerDecl(src, dst), TriggerDecl(src, dst)])


def test_self_trigger_rejected():
    ref = StageRef("A", StageKind.PROCESS)
    with pytest.raises(InvalidArcError):
        assemble_model([TriggerDecl(ref, ref)])


def test_behavior_self_loop_rejected():
    decls = [
        FlowDecl(
            "X", (StageRef("A", StageKind.CREATE), StageRef("A", StageKind.PROCESS))
        ),
        EventDecl("E1", (StageRef("A", StageKind.CREATE),)),
    ]
    with pytest.raises(InvalidArcError):
        assemble_model(decls + [BehaviorDecl(("E1", "E1"))])


def test_behavior_unknown_event_rejected():
    with pytest.raises(DanglingRefError):
        assemble_model([BehaviorDecl(("E1", "E2"))])


def test_event_arc_member_pulls_in_endpoints():
    decls = [
        FlowDecl(
            "X", (StageRef("A", StageKind.CREATE), StageRef("A", StageKind.PROCESS))
        ),
        EventDecl("E1", ("F1",)),
    ]
    model = assemble_model(decls)
    assert set(model.events["E1"].region) == {
        StageRef("A", StageKind.CREATE),
        StageRef("A", StageKind.PROCESS),
    }


def test_model_is_immutable():
    model = assemble_model(_coffee_decls())
    with pytest.raises(TypeError):
        model.thimacs["New"] = None
    with pytest.raises(AttributeError):
        model.name = "other"


def test_assembly_is_deterministic():
    text = (
        "thimac Mill\n"
        "flow Beans: Mill.transfer -> Mill.receive -> Mill.process\n"
        "trigger Mill.process ~> Powder.create\n"
    )
    m1 = assemble_model(parse(text))
    m2 = assemble_model(parse(text))
    assert canonical_signature(simplify(m1)) == canonical_signature(simplify(m2))
    assert dict(m1.thimacs) == dict(m2.thimacs)
    assert m1.flows == m2.flows
