"""Engagement counters and the exploitation/exploration discipline ranking."""
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fieldseek.gateway import scripted_embedding
from fieldseek.model import PaperRecord
from fieldseek.ranking import (
    DEFAULT_BETA,
    EngagementHistory,
    exploration_score,
    score_disciplines,
)

RANK_TABLE = Path(__file__).parent / "data" / "rank_table.json"


def scripted_embedder(texts):
    return [scripted_embedding(t) for t in texts]


class TestEngagementHistory:
    def test_counters_start_at_zero(self):
        history = EngagementHistory()
        assert history.usage("Psychology") == 0

    def test_queries_and_collections_both_count(self):
        history = EngagementHistory()
        history.record_query("Psychology")
        history.record_collection("Psychology")
        history.record_collection("Psychology")
        assert history.queried("Psychology") == 1
        assert history.collected("Psychology") == 2
        assert history.usage("Psychology") == 3
        assert history.usage("Education") == 0

    def test_dict_roundtrip(self):
        history = EngagementHistory()
        history.record_query("Sociology")
        history.record_collection("Education")
        restored = EngagementHistory.from_dict(history.to_dict())
        assert restored.usage("Sociology") == 1
        assert restored.usage("Education") == 1

    def test_to_dict_is_sorted(self):
        history = EngagementHistory(queried={"Sociology": 1, "Education": 2})
        assert list(history.to_dict()["queried"]) == ["Education", "Sociology"]


class TestExplorationScore:
    def test_known_values(self):
        assert exploration_score(0) == 1.0
        assert exploration_score(1) == 0.5
        assert exploration_score(9) == pytest.approx(0.1)

    def test_negative_usage_rejected(self):
        with pytest.raises(ValueError):
            exploration_score(-1)

    @given(st.integers(0, 10_000))
    def test_strictly_decreasing(self, usage):
        assert exploration_score(usage + 1) < exploration_score(usage)

    @given(st.integers(0, 10_000))
    def test_bounded_in_unit_interval(self, usage):
        assert 0.0 < exploration_score(usage) <= 1.0


def make_paper(pid, title, disciplines):
    return PaperRecord(paper_id=pid, title=title, disciplines=tuple(disciplines))


class TestScoreDisciplines:
    TOPIC = "misinformation awareness among older adults"

    def topic_vector(self):
        return scripted_embedding(self.TOPIC)

    def test_empty_input(self):
        groups = score_disciplines(
            [], EngagementHistory(), self.topic_vector(), embedder=scripted_embedder
        )
        assert groups == []

    def test_combined_is_beta_value_plus_exploration(self):
        papers = [make_paper("A", "Misinformation among older adults", ["Psychology"])]
        history = EngagementHistory(queried={"Psychology": 4})
        for beta in (0.5, 1.0, 2.0):
            groups = score_disciplines(
                papers, history, self.topic_vector(), embedder=scripted_embedder, beta=beta
            )
            group = groups[0]
            assert group.exploration == pytest.approx(1.0 / 5.0)
            assert group.combined == pytest.approx(beta * group.value_score + group.exploration)

    def test_value_score_is_mean_of_member_similarities(self):
        papers = [
            make_paper("A", "Misinformation among older adults", ["Psychology"]),
            make_paper("B", "Soil chemistry of alpine meadows", ["Psychology"]),
        ]
        groups = score_disciplines(
            papers, EngagementHistory(), self.topic_vector(), embedder=scripted_embedder
        )
        group = groups[0]
        sims = list(group.paper_similarities.values())
        assert group.value_score == pytest.approx(sum(sims) / len(sims))

    def test_multi_discipline_paper_appears_in_every_group(self):
        papers = [make_paper("A", "Learning and memory", ["Psychology", "Education"])]
        groups = score_disciplines(
            papers, EngagementHistory(), self.topic_vector(), embedder=scripted_embedder
        )
        assert sorted(g.discipline for g in groups) == ["Education", "Psychology"]
        assert all(g.papers[0].paper_id == "A" for g in groups)

    def test_untagged_paper_lands_in_unknown(self):
        papers = [make_paper("A", "Anything", [])]
        groups = score_disciplines(
            papers, EngagementHistory(), self.topic_vector(), embedder=scripted_embedder
        )
        assert [g.discipline for g in groups] == ["Unknown"]

    def test_engagement_demotes_a_discipline(self):
        # Same papers in two disciplines: the engaged one must rank lower.
        papers = [
            make_paper("A", "Misinformation among older adults", ["Psychology"]),
            make_paper("B", "Misinformation among older adults", ["Education"]),
        ]
        fresh = score_disciplines(
            papers, EngagementHistory(), self.topic_vector(), embedder=scripted_embedder
        )
        assert [g.discipline for g in fresh] == ["Education", "Psychology"]  # C_d tie, name order

        engaged = EngagementHistory(queried={"Education": 5})
        after = score_disciplines(
            papers, engaged, self.topic_vector(), embedder=scripted_embedder
        )
        assert [g.discipline for g in after] == ["Psychology", "Education"]

    def test_group_tie_breaks_by_name(self):
        papers = [
            make_paper("A", "Same title", ["Sociology"]),
            make_paper("B", "Same title", ["Education"]),
        ]
        groups = score_disciplines(
            papers, EngagementHistory(), self.topic_vector(), embedder=scripted_embedder
        )
        assert [g.discipline for g in groups] == ["Education", "Sociology"]

    def test_papers_sorted_by_similarity_then_id(self):
        papers = [
            make_paper("B", "Misinformation among older adults", ["Psychology"]),
            make_paper("A", "Misinformation among older adults", ["Psychology"]),
            make_paper("C", "Soil chemistry of alpine meadows", ["Psychology"]),
        ]
        groups = score_disciplines(
            papers, EngagementHistory(), self.topic_vector(), embedder=scripted_embedder
        )
        assert [p.paper_id for p in groups[0].papers] == ["A", "B", "C"]

    def test_each_paper_embedded_once(self):
        calls = []

        def counting_embedder(texts):
            calls.append(list(texts))
            return scripted_embedder(texts)

        papers = [
            make_paper("A", "Shared methods paper", ["Psychology", "Education", "Sociology"]),
            make_paper("B", "Another paper", ["Psychology"]),
        ]
        score_disciplines(
            papers, EngagementHistory(), self.topic_vector(), embedder=counting_embedder
        )
        assert len(calls) == 1
        assert len(calls[0]) == 2


class TestFrozenOracleTable:
    """score_disciplines must reproduce the independently computed table."""

    def load(self):
        return json.loads(RANK_TABLE.read_text(encoding="utf-8"))

    def test_table_reproduced_to_1e_9(self):
        from fieldseek.scholar import ScholarClient, ScholarConfig

        table = self.load()
        client = ScholarClient(ScholarConfig())
        topic_vec = scripted_embedding(table["topic"])
        for scenario in table["scenarios"]:
            linked = client.fetch_links(table["paper_id"], scenario["direction"])
            history = EngagementHistory.from_dict(scenario["history"])
            groups = score_disciplines(
                linked, history, topic_vec, embedder=scripted_embedder, beta=table["beta"]
            )
            assert [g.discipline for g in groups] == [
                row["discipline"] for row in scenario["groups"]
            ], scenario["name"]
            for group, row in zip(groups, scenario["groups"]):
                assert group.value_score == pytest.approx(row["value_score"], abs=1e-9)
                assert group.exploration == pytest.approx(row["exploration"], abs=1e-9)
                assert group.combined == pytest.approx(row["combined"], abs=1e-9)
                assert [p.paper_id for p in group.papers] == row["papers"]
                for pid, sim in zip(row["papers"], row["similarities"]):
                    assert group.paper_similarities[pid] == pytest.approx(sim, abs=1e-9)

    def test_engagement_scenario_moves_psychology_last(self):
        table = self.load()
        by_name = {s["name"]: s for s in table["scenarios"]}
        fresh = [g["discipline"] for g in by_name["fresh"]["groups"]]
        engaged = [g["discipline"] for g in by_name["psychology_engaged"]["groups"]]
        assert fresh.index("Psychology") < len(fresh) - 1
        assert engaged[-1] == "Psychology"
