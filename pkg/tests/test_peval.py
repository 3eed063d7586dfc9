import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mixdialog.errors import ConflictError, UnknownSlotError
from mixdialog.peval import residual_slots, specialize
from mixdialog.policy import ConflictPolicy
from mixdialog.script import (
    Block,
    ClearSlots,
    ConfirmBranch,
    ConfirmStage,
    DialogScript,
    MixedForm,
    PromptTemplate,
    Say,
    SlotDecl,
    parse_script,
    render_script,
    validate,
)

FULL = {"size": "medium", "topping": "pepperoni", "crust": "deep dish"}


def test_specialize_removes_filled_guard(pizza_script):
    residual = specialize(pizza_script, {"topping": "sausage"})
    form = residual.stages[1]
    assert form.slot_names() == ("size", "crust")
    assert residual_slots(residual) == {"size", "crust"}


def test_specialize_empty_env_is_identity(pizza_script):
    assert specialize(pizza_script, {}) == pizza_script


def test_specialize_all_slots_removes_form(pizza_script):
    residual = specialize(pizza_script, FULL)
    assert [type(s) for s in residual.stages] == [Block, ConfirmStage]
    assert residual_slots(residual) == set()


def test_confirm_stage_passes_through_unchanged(pizza_script):
    residual = specialize(pizza_script, FULL)
    assert residual.stages[-1] == pizza_script.stages[-1]
    assert residual.stages[0] == pizza_script.stages[0]


def test_rebinding_specialized_slot_is_noop(pizza_script):
    # the confirm stage still mentions topping, so a later rebinding is legal
    once = specialize(pizza_script, {"topping": "sausage"})
    again = specialize(once, {"topping": "pepperoni"})
    assert again == once


def test_specialize_unknown_slot(pizza_script):
    with pytest.raises(UnknownSlotError):
        specialize(pizza_script, {"sauce": "bbq"})


def test_specialize_reject_duplicate(pizza_script):
    with pytest.raises(ConflictError):
        specialize(pizza_script, [("size", "small"), ("size", "large")], ConflictPolicy.REJECT)


def test_residual_render_reparses(pizza_script):
    for env in ({}, {"topping": "sausage"}, FULL):
        residual = specialize(pizza_script, env)
        assert parse_script(render_script(residual)) == residual


def test_residual_rendering_drops_filled_prompts(pizza_script):
    text = render_script(specialize(pizza_script, {"topping": "sausage"}))
    assert "What size pizza would you like?" in text
    assert "What type of crust do you want?" in text
    assert "What topping" not in text


def test_original_script_not_mutated(pizza_script):
    before = render_script(pizza_script)
    specialize(pizza_script, FULL)
    assert render_script(pizza_script) == before


# --- randomized structural properties ----------------------------------------

_WORDS = ["alpha", "beta", "gamma", "delta", "omega"]


@st.composite
def scripts(draw):
    """Random scripts: 1-3 forms over 1-5 slots, ending in a confirmation
    whose clear list covers every slot (the usual shape of these dialogs)."""
    n_slots = draw(st.integers(min_value=1, max_value=5))
    slots = [f"slot{i}" for i in range(n_slots)]
    n_forms = draw(st.integers(min_value=1, max_value=min(3, n_slots)))
    cuts = sorted(draw(st.sets(st.integers(1, n_slots - 1), max_size=n_forms - 1))) if n_slots > 1 else []
    bounds = [0] + cuts + [n_slots]
    stages = []
    if draw(st.booleans()):
        stages.append(Block("greet_0", ("hello",)))
    for i in range(len(bounds) - 1):
        decls = tuple(
            SlotDecl(name, PromptTemplate(f"value for {name}?"))
            for name in slots[bounds[i] : bounds[i + 1]]
        )
        if decls:
            stages.append(MixedForm(f"form{i}", "g.gram", decls))
    refs = " ".join("{%s}" % s for s in slots)
    stages.append(
        ConfirmStage(
            "verify",
            SlotDecl("verify", PromptTemplate(f"you said {refs}, ok?")),
            (
                ConfirmBranch("yes", (Say("done"),)),
                ConfirmBranch("no", (ClearSlots(tuple(slots + ["verify"])),)),
            ),
        )
    )
    return DialogScript("generated", tuple(stages))


@st.composite
def script_and_split(draw):
    script = draw(scripts())
    slots = list(script.form_slots())
    bound = draw(st.lists(st.sampled_from(slots), unique=True, max_size=len(slots))) if slots else []
    split = [(s, draw(st.sampled_from(_WORDS)), draw(st.booleans())) for s in bound]
    e1 = [(s, v) for s, v, first in split if first]
    e2 = [(s, v) for s, v, first in split if not first]
    return script, e1, e2


@given(script_and_split())
@settings(max_examples=300, deadline=None)
def test_split_specialization_composes(case):
    """Specializing in two disjoint steps equals specializing once."""
    script, e1, e2 = case
    assert validate(script) == []
    two_step = specialize(specialize(script, e1), e2)
    one_step = specialize(script, list(e1) + list(e2))
    assert two_step == one_step


@given(script_and_split())
@settings(max_examples=200, deadline=None)
def test_shrinking_and_prompt_preservation(case):
    script, e1, e2 = case
    env = list(e1) + list(e2)
    residual = specialize(script, env)
    assert residual_slots(residual) == residual_slots(script) - {s for s, _ in env}
    original_prompts = [d.prompt.text for f in script.forms() for d in f.slots]
    residual_prompts = [d.prompt.text for f in residual.forms() for d in f.slots]
    for prompt in residual_prompts:
        original_prompts.remove(prompt)  # raises if not a sub-multiset


@given(script_and_split())
@settings(max_examples=200, deadline=None)
def test_specialize_idempotent(case):
    # re-applying the same environment to the residual changes nothing: the
    # confirmation stage keeps the slots known, so the rebinding is a no-op
    script, e1, e2 = case
    env = list(e1) + list(e2)
    for policy in (ConflictPolicy.FIRST_WINS, ConflictPolicy.LAST_WINS):
        once = specialize(script, env, policy)
        assert specialize(once, env, policy) == once


@given(scripts(), st.data())
@settings(max_examples=200, deadline=None)
def test_last_wins_shadowing_matches_merged_env(script, data):
    """With overlapping domains, later bindings shadow earlier ones."""
    slots = list(script.form_slots())
    if not slots:
        return
    e1 = [(s, data.draw(st.sampled_from(_WORDS))) for s in data.draw(
        st.lists(st.sampled_from(slots), unique=True, min_size=1)
    )]
    e2 = [(s, data.draw(st.sampled_from(_WORDS))) for s in data.draw(
        st.lists(st.sampled_from(slots), unique=True, min_size=1)
    )]
    two_step = specialize(specialize(script, e1), e2)
    one_step = specialize(script, list(e1) + list(e2), ConflictPolicy.LAST_WINS)
    assert two_step == one_step
