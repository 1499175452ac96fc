"""Query expansion chain: pseudo answers, term mining, the 9-query contract."""
import pytest

from fieldseek.gateway import LlmGateway, ProviderConfig, fixture_key
from fieldseek.model import ExplorationContext, ExploratoryQuestion, normalize_topic
from fieldseek.queries import QUERY_COUNT, QueryExpansion, _clean_queries, expand_question

TOPIC = normalize_topic("misinformation awareness among older adults")


def make_context(question="How does recall fade with age?", discipline="Psychology"):
    eq = ExploratoryQuestion(id="eq-7", text=question, discipline=discipline)
    return ExplorationContext.build(TOPIC, eq)


class FakeGateway:
    def __init__(self, responses):
        self.responses = dict(responses)
        self.requests = []

    def complete(self, request):
        self.requests.append(request)
        return self.responses[request.template_id]


ANSWERS = "- Recall slows because encoding weakens.\n- Retrieval cues lose specificity."
TERMS = "- memory decline\n- retrieval cues\n- encoding strength\n- cognitive aging"


def numbered(queries):
    return "\n".join(f"{i + 1}. {q}" for i, q in enumerate(queries))


class TestQueryExpansionContract:
    def test_exactly_nine_enforced_by_type(self):
        with pytest.raises(ValueError):
            QueryExpansion(eq_id="eq-1", pseudo_answers=(), terms=(), queries=("a",) * 8)
        with pytest.raises(ValueError):
            QueryExpansion(eq_id="eq-1", pseudo_answers=(), terms=(), queries=("a",) * 10)

    def test_overshoot_truncated(self):
        gateway = FakeGateway(
            {
                "pseudo_answers": ANSWERS,
                "term_extraction": TERMS,
                "query_generation": numbered([f"memory query {i}" for i in range(12)]),
            }
        )
        expansion = expand_question(make_context(), gateway)
        assert len(expansion.queries) == QUERY_COUNT
        assert expansion.queries == tuple(f"memory query {i}" for i in range(9))
        assert expansion.padded == 0
        assert [r.template_id for r in gateway.requests] == [
            "pseudo_answers",
            "term_extraction",
            "query_generation",
        ]

    def test_intermediates_recorded(self):
        gateway = FakeGateway(
            {
                "pseudo_answers": ANSWERS,
                "term_extraction": TERMS,
                "query_generation": numbered([f"q{i}" for i in range(9)]),
            }
        )
        expansion = expand_question(make_context(), gateway)
        assert expansion.eq_id == "eq-7"
        assert expansion.pseudo_answers == (
            "Recall slows because encoding weakens.",
            "Retrieval cues lose specificity.",
        )
        assert expansion.terms == (
            "memory decline",
            "retrieval cues",
            "encoding strength",
            "cognitive aging",
        )

    def test_terms_feed_the_query_prompt(self):
        gateway = FakeGateway(
            {
                "pseudo_answers": ANSWERS,
                "term_extraction": TERMS,
                "query_generation": numbered([f"q{i}" for i in range(9)]),
            }
        )
        expand_question(make_context(), gateway)
        terms_block = gateway.requests[2].variables["terms"]
        assert terms_block.splitlines() == [
            "- memory decline",
            "- retrieval cues",
            "- encoding strength",
            "- cognitive aging",
        ]
        answers_block = gateway.requests[1].variables["answers"]
        assert "Recall slows because encoding weakens." in answers_block


class TestShortfallLadder:
    def test_retry_round_fills_gap(self):
        gateway = FakeGateway(
            {
                "pseudo_answers": ANSWERS,
                "term_extraction": TERMS,
                "query_generation": numbered([f"q{i}" for i in range(5)]),
                "query_generation_more": numbered([f"extra {i}" for i in range(4)]),
            }
        )
        expansion = expand_question(make_context(), gateway)
        assert expansion.queries == tuple(
            [f"q{i}" for i in range(5)] + [f"extra {i}" for i in range(4)]
        )
        assert expansion.padded == 0
        retry_vars = gateway.requests[3].variables
        assert "- q0" in retry_vars["existing"]

    def test_padding_after_exhausted_retry(self):
        gateway = FakeGateway(
            {
                "pseudo_answers": ANSWERS,
                "term_extraction": TERMS,
                "query_generation": numbered(["q0", "q1", "q2", "q3", "q4", "q5", "q6"]),
                "query_generation_more": "1. q6",  # duplicate, adds nothing
            }
        )
        expansion = expand_question(make_context(), gateway)
        assert len(expansion.queries) == QUERY_COUNT
        assert expansion.padded == 2
        # Deterministic padding starts with single mined terms.
        assert expansion.queries[7:] == ("memory decline", "retrieval cues")

    def test_padding_without_any_terms_or_queries(self):
        gateway = FakeGateway(
            {
                "pseudo_answers": "",
                "term_extraction": "",
                "query_generation": "",
                "query_generation_more": "",
            }
        )
        expansion = expand_question(make_context(), gateway)
        assert expansion.padded == QUERY_COUNT
        assert expansion.queries == tuple(
            f"how does recall fade aspect {i}" for i in range(1, 10)
        )

    def test_padding_is_deterministic(self):
        def run():
            gateway = FakeGateway(
                {
                    "pseudo_answers": ANSWERS,
                    "term_extraction": TERMS,
                    "query_generation": "",
                    "query_generation_more": "",
                }
            )
            return expand_question(make_context(), gateway).queries

        assert run() == run()

    def test_padding_skips_queries_already_present(self):
        gateway = FakeGateway(
            {
                "pseudo_answers": ANSWERS,
                "term_extraction": TERMS,
                # Eight queries, one of them colliding with the first padding
                # candidate, so padding must skip to the second term.
                "query_generation": numbered(
                    ["Memory Decline"] + [f"q{i}" for i in range(7)]
                ),
                "query_generation_more": "",
            }
        )
        expansion = expand_question(make_context(), gateway)
        assert expansion.queries[0] == "Memory Decline"
        assert expansion.queries[8] == "retrieval cues"


class TestCleanQueries:
    def test_quotes_stripped_and_order_kept(self):
        assert _clean_queries(['"quoted query"', "plain query"]) == [
            "quoted query",
            "plain query",
        ]

    def test_case_insensitive_dedupe(self):
        assert _clean_queries(["Memory Decline", "memory decline"]) == ["Memory Decline"]

    def test_empty_and_overlong_dropped(self):
        assert _clean_queries(["", "  ", "x" * 301, "ok"]) == ["ok"]

    def test_length_300_kept(self):
        assert _clean_queries(["x" * 300]) == ["x" * 300]


class TestScriptedFixtures:
    """The bundled fixture set must drive the chain without padding."""

    def test_bundled_expansion_for_a_stored_question(self):
        gateway = LlmGateway(ProviderConfig())
        context = make_context(
            "What cognitive strategies reduce belief in false information?", "Psychology"
        )
        expansion = expand_question(context, gateway)
        assert len(expansion.queries) == QUERY_COUNT
        assert expansion.padded == 0
        assert expansion.pseudo_answers
        assert expansion.terms

    def test_fixture_key_depends_only_on_template_and_variables(self):
        key_a = fixture_key("pseudo_answers", {"question": "Q?", "topic": "T"})
        key_b = fixture_key("pseudo_answers", {"topic": "T", "question": "Q?"})
        assert key_a == key_b
