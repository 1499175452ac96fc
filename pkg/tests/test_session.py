"""Session state mutations, invariants, and the checksummed store."""
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fieldseek.errors import CorruptState, NotFound, PreconditionFailed, UnknownEntity
from fieldseek.model import PaperRecord
from fieldseek.queries import QueryExpansion
from fieldseek.questions import EqDraft
from fieldseek.session import (
    Exploration,
    PaperAnnotation,
    SessionState,
    SessionStore,
    UNSORTED_COLLECTION,
)
from fieldseek.theming import Theme, ThemeSet


def make_state():
    return SessionState.create("s1", "misinformation awareness among older adults")


def make_paper(pid, disciplines=("Psychology",)):
    return PaperRecord(
        paper_id=pid,
        title=f"Paper {pid}",
        abstract=f"Abstract of {pid}.",
        disciplines=tuple(disciplines),
    )


def make_exploration(state, eq_id, theme_papers, loose_papers=()):
    """Record papers and attach a one-theme exploration to eq_id."""
    all_ids = list(theme_papers) + list(loose_papers)
    state.record_papers([make_paper(pid) for pid in all_ids])
    expansion = QueryExpansion(
        eq_id=eq_id,
        pseudo_answers=("An answer.",),
        terms=("a term",),
        queries=tuple(f"query {i}" for i in range(9)),
    )
    theme_set = ThemeSet(
        eq_id=eq_id,
        themes=[Theme(theme_id=f"{eq_id}-t1", title="A theme", paper_ids=list(theme_papers))],
        possibly_relevant=list(loose_papers),
    )
    exploration = Exploration(
        eq_id=eq_id,
        expansion=expansion,
        paper_ids=all_ids,
        theme_set=theme_set,
        annotations={pid: PaperAnnotation(paper_id=pid) for pid in all_ids},
    )
    state.set_exploration(exploration)
    return exploration


class TestQuestions:
    def test_ids_are_sequential(self):
        state = make_state()
        first = state.add_question(EqDraft(text="A?", discipline="Psychology"))
        second = state.add_question(EqDraft(text="B?", discipline="Education"))
        assert first.id == "eq-1"
        assert second.id == "eq-2"

    def test_get_unknown_question(self):
        with pytest.raises(UnknownEntity):
            make_state().get_question("eq-404")

    def test_edit_changes_origin_and_clears_flags(self):
        state = make_state()
        eq = state.add_question(
            EqDraft(text="Statement", discipline="Psychology", flags=("not_a_question",))
        )
        updated = state.update_question(eq.id, text="A real question?")
        assert updated.text == "A real question?"
        assert updated.origin == "user_edited"
        assert updated.flags == ()
        assert state.get_question(eq.id) == updated

    def test_selection_toggle_keeps_origin(self):
        state = make_state()
        eq = state.add_question(EqDraft(text="A?", discipline="Psychology"))
        selected = state.update_question(eq.id, selected=True)
        assert selected.selected
        assert selected.origin == "topic_seeded"
        unselected = state.update_question(eq.id, selected=False)
        assert not unselected.selected


class TestPapersAndExplorations:
    def test_record_papers_keeps_first_version(self):
        state = make_state()
        state.record_papers([make_paper("P1")])
        state.record_papers(
            [PaperRecord(paper_id="P1", title="Changed title"), make_paper("P2")]
        )
        assert state.get_paper("P1").title == "Paper P1"
        assert state.get_paper("P2").title == "Paper P2"

    def test_get_unknown_paper(self):
        with pytest.raises(UnknownEntity):
            make_state().get_paper("P404")

    def test_exploration_requires_known_question(self):
        state = make_state()
        state.record_papers([make_paper("P1")])
        with pytest.raises(UnknownEntity):
            make_exploration(state, "eq-404", ["P1"])

    def test_exploration_roundtrip(self):
        state = make_state()
        eq = state.add_question(EqDraft(text="A?", discipline="Psychology"))
        exploration = make_exploration(state, eq.id, ["P1", "P2"], ["P3"])
        assert state.get_exploration(eq.id) is exploration
        with pytest.raises(NotFound):
            state.get_exploration("eq-2")


class TestCollections:
    def test_create_and_find_by_name(self):
        state = make_state()
        collection = state.create_collection("  Reading list ")
        assert collection.collection_id == "col-1"
        assert collection.name == "Reading list"
        assert state.find_collection_by_name("Reading list") is collection
        assert state.find_collection_by_name("Other") is None

    def test_empty_name_rejected(self):
        with pytest.raises(PreconditionFailed):
            make_state().create_collection("   ")

    def test_collection_credits_engagement_once_per_paper(self):
        state = make_state()
        state.record_papers([make_paper("P1", disciplines=("Psychology", "Education"))])
        a = state.create_collection("A")
        b = state.create_collection("B")
        state._collect_paper(a, "P1")
        assert state.engagement.collected("Psychology") == 1
        assert state.engagement.collected("Education") == 1
        # Same paper into another collection: membership yes, credit no.
        state._collect_paper(b, "P1")
        assert state.engagement.collected("Psychology") == 1
        assert b.paper_ids == ["P1"]
        # And re-adding to the same collection is a no-op.
        assert state._collect_paper(a, "P1") is False
        assert a.paper_ids == ["P1"]


class TestEditOps:
    def seeded(self):
        state = make_state()
        eq = state.add_question(EqDraft(text="A?", discipline="Psychology"))
        state.update_question(eq.id, selected=True)
        make_exploration(state, eq.id, ["P1", "P2"], ["P3"])
        return state, eq

    def test_unknown_op_rejected(self):
        state, _ = self.seeded()
        with pytest.raises(PreconditionFailed):
            state.apply_edits([{"op": "sort_papers"}])

    def test_drop_theme_creates_collection_named_after_title(self):
        state, eq = self.seeded()
        summary = state.apply_edits([{"op": "drop_theme", "theme_id": f"{eq.id}-t1"}])
        assert summary["applied"] == 1
        collection = state.find_collection_by_name("A theme")
        assert collection is not None
        assert collection.paper_ids == ["P1", "P2"]
        assert collection.source_theme_id == f"{eq.id}-t1"

    def test_drop_theme_twice_is_idempotent(self):
        state, eq = self.seeded()
        edit = {"op": "drop_theme", "theme_id": f"{eq.id}-t1"}
        state.apply_edits([edit, edit])
        assert len(state.collections) == 1
        assert state.collections[0].paper_ids == ["P1", "P2"]

    def test_drop_paper_defaults_to_unsorted(self):
        state, _ = self.seeded()
        state.apply_edits([{"op": "drop_paper", "paper_id": "P3"}])
        collection = state.find_collection_by_name(UNSORTED_COLLECTION)
        assert collection.paper_ids == ["P3"]

    def test_drop_paper_into_named_collection(self):
        state, _ = self.seeded()
        target = state.create_collection("Keepers")
        state.apply_edits(
            [{"op": "drop_paper", "paper_id": "P1", "collection_id": target.collection_id}]
        )
        assert target.paper_ids == ["P1"]

    def test_move_paper(self):
        state, _ = self.seeded()
        a = state.create_collection("A")
        b = state.create_collection("B")
        state.apply_edits(
            [{"op": "drop_paper", "paper_id": "P1", "collection_id": a.collection_id}]
        )
        state.apply_edits(
            [
                {
                    "op": "move_paper",
                    "paper_id": "P1",
                    "from_collection": a.collection_id,
                    "to_collection": b.collection_id,
                }
            ]
        )
        assert a.paper_ids == []
        assert b.paper_ids == ["P1"]
        # Moving does not double-credit engagement.
        assert state.engagement.collected("Psychology") == 1

    def test_move_missing_paper_rejected(self):
        state, _ = self.seeded()
        a = state.create_collection("A")
        b = state.create_collection("B")
        with pytest.raises(UnknownEntity):
            state.apply_edits(
                [
                    {
                        "op": "move_paper",
                        "paper_id": "P1",
                        "from_collection": a.collection_id,
                        "to_collection": b.collection_id,
                    }
                ]
            )

    def test_remove_paper(self):
        state, _ = self.seeded()
        a = state.create_collection("A")
        state.apply_edits(
            [{"op": "drop_paper", "paper_id": "P1", "collection_id": a.collection_id}]
        )
        state.apply_edits(
            [{"op": "remove_paper", "paper_id": "P1", "collection_id": a.collection_id}]
        )
        assert a.paper_ids == []
        # Removal never un-credits engagement.
        assert state.engagement.collected("Psychology") == 1

    def test_rename_and_delete_collection(self):
        state, _ = self.seeded()
        a = state.create_collection("A")
        state.apply_edits([{"op": "rename_collection", "collection_id": a.collection_id, "name": "B"}])
        assert a.name == "B"
        with pytest.raises(PreconditionFailed):
            state.apply_edits(
                [{"op": "rename_collection", "collection_id": a.collection_id, "name": " "}]
            )
        state.apply_edits([{"op": "delete_collection", "collection_id": a.collection_id}])
        assert state.collections == []

    def test_bad_edit_keeps_earlier_ones(self):
        state, eq = self.seeded()
        with pytest.raises(UnknownEntity):
            state.apply_edits(
                [
                    {"op": "drop_paper", "paper_id": "P1"},
                    {"op": "drop_paper", "paper_id": "P404"},
                ]
            )
        assert state.find_collection_by_name(UNSORTED_COLLECTION).paper_ids == ["P1"]


class TestInvariants:
    def test_clean_state_passes(self):
        state, _ = TestEditOps().seeded()
        state.apply_edits([{"op": "drop_paper", "paper_id": "P1"}])
        state.check_invariants()

    def test_unknown_paper_in_collection_detected(self):
        state = make_state()
        collection = state.create_collection("A")
        collection.paper_ids.append("P404")
        with pytest.raises(AssertionError):
            state.check_invariants()

    def test_duplicate_in_collection_detected(self):
        state = make_state()
        state.record_papers([make_paper("P1")])
        collection = state.create_collection("A")
        state._collect_paper(collection, "P1")
        collection.paper_ids.append("P1")
        with pytest.raises(AssertionError):
            state.check_invariants()

    def test_collected_ever_tracking_detected(self):
        state = make_state()
        state.record_papers([make_paper("P1")])
        collection = state.create_collection("A")
        collection.paper_ids.append("P1")  # bypasses _collect_paper
        with pytest.raises(AssertionError):
            state.check_invariants()


class TestSerialization:
    def test_roundtrip_preserves_everything(self):
        state, eq = TestEditOps().seeded()
        state.apply_edits([{"op": "drop_theme", "theme_id": f"{eq.id}-t1"}])
        restored = SessionState.from_dict(state.to_dict())
        assert restored.to_dict() == state.to_dict()
        # Counters survive, so new ids do not collide with old ones.
        new_eq = restored.add_question(EqDraft(text="B?", discipline="Education"))
        assert new_eq.id == "eq-2"
        new_col = restored.create_collection("Another")
        assert new_col.collection_id == "col-2"

    def test_annotations_roundtrip(self):
        state, eq = TestEditOps().seeded()
        exploration = state.get_exploration(eq.id)
        exploration.annotations["P1"] = PaperAnnotation(
            paper_id="P1",
            key_sentence_index=1,
            key_sentence="A sentence.",
            covered_concepts=("older adults",),
            spans=((0, 4),),
            relevant_phrases=("cognitive strategies",),
        )
        restored = SessionState.from_dict(state.to_dict())
        annotation = restored.get_exploration(eq.id).annotations["P1"]
        assert annotation.key_sentence_index == 1
        assert annotation.spans == ((0, 4),)
        assert annotation.relevant_phrases == ("cognitive strategies",)


class TestStore:
    def test_save_load_roundtrip(self, tmp_path):
        store = SessionStore(tmp_path)
        state, eq = TestEditOps().seeded()
        state.apply_edits([{"op": "drop_theme", "theme_id": f"{eq.id}-t1"}])
        store.save(state)
        loaded = store.load("s1")
        assert loaded.to_dict() == state.to_dict()

    def test_load_missing_session(self, tmp_path):
        with pytest.raises(NotFound):
            SessionStore(tmp_path).load("ghost")

    def test_exists_and_list(self, tmp_path):
        store = SessionStore(tmp_path)
        store.save(make_state())
        assert store.exists("s1")
        assert not store.exists("s2")
        assert store.list_sessions() == ["s1"]

    def test_tampered_file_detected(self, tmp_path):
        store = SessionStore(tmp_path)
        store.save(make_state())
        path = tmp_path / "s1.json"
        document = json.loads(path.read_text(encoding="utf-8"))
        document["state"]["topic"]["text"] = "tampered"
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(CorruptState, match="checksum"):
            store.load("s1")

    def test_unreadable_file_detected(self, tmp_path):
        store = SessionStore(tmp_path)
        (tmp_path / "s1.json").write_text("{torn", encoding="utf-8")
        with pytest.raises(CorruptState):
            store.load("s1")

    def test_wrong_schema_version_detected(self, tmp_path):
        store = SessionStore(tmp_path)
        store.save(make_state())
        path = tmp_path / "s1.json"
        document = json.loads(path.read_text(encoding="utf-8"))
        document["schema_version"] = 99
        path.write_text(json.dumps(document), encoding="utf-8")
        with pytest.raises(CorruptState, match="schema"):
            store.load("s1")

    def test_save_validates_invariants_first(self, tmp_path):
        store = SessionStore(tmp_path)
        state = make_state()
        collection = state.create_collection("A")
        collection.paper_ids.append("P404")
        with pytest.raises(AssertionError):
            store.save(state)
        assert not store.exists("s1")

    def test_no_temp_file_left_behind(self, tmp_path):
        store = SessionStore(tmp_path)
        store.save(make_state())
        assert [p.name for p in tmp_path.iterdir()] == ["s1.json"]


@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_random_edit_sequences_preserve_invariants(tmp_path_factory, data):
    """Randomized edit batches never break invariants, and a save/load
    roundtrip reproduces the state exactly."""
    state = make_state()
    eq = state.add_question(EqDraft(text="A?", discipline="Psychology"))
    make_exploration(state, eq.id, ["P1", "P2", "P3"], ["P4", "P5"])
    paper_pool = ["P1", "P2", "P3", "P4", "P5", "P404"]

    for _ in range(data.draw(st.integers(1, 40))):
        op = data.draw(
            st.sampled_from(
                ["drop_theme", "drop_paper", "move_paper", "remove_paper", "rename_collection", "delete_collection"]
            )
        )
        collection_ids = [c.collection_id for c in state.collections]
        edit = {"op": op}
        if op == "drop_theme":
            edit["theme_id"] = data.draw(st.sampled_from([f"{eq.id}-t1", "ghost-theme"]))
        elif op == "drop_paper":
            edit["paper_id"] = data.draw(st.sampled_from(paper_pool))
            if collection_ids and data.draw(st.booleans()):
                edit["collection_id"] = data.draw(st.sampled_from(collection_ids))
        elif op in ("move_paper", "remove_paper"):
            if not collection_ids:
                continue
            edit["paper_id"] = data.draw(st.sampled_from(paper_pool))
            if op == "move_paper":
                edit["from_collection"] = data.draw(st.sampled_from(collection_ids))
                edit["to_collection"] = data.draw(st.sampled_from(collection_ids))
            else:
                edit["collection_id"] = data.draw(st.sampled_from(collection_ids))
        else:
            if not collection_ids:
                continue
            edit["collection_id"] = data.draw(st.sampled_from(collection_ids))
            if op == "rename_collection":
                edit["name"] = data.draw(st.sampled_from(["Renamed", "Other name", " "]))
        try:
            state.apply_edits([edit])
        except (UnknownEntity, PreconditionFailed):
            pass
        state.check_invariants()

    store = SessionStore(tmp_path_factory.mktemp("sessions"))
    store.save(state)
    assert store.load("s1").to_dict() == state.to_dict()
