"""Author the scripted completion fixtures for the bundled scenario.

Run from the repository root:

    python3 scripts/build_fixtures.py

The script replays the full pipeline against the bundled corpus using a
gateway that, whenever a fixture is missing, consults the authoring
tables below, writes the fixture file, and retries. It then replays
everything a second time with the plain gateway to prove the fixture set
is closed, and asserts the scenario invariants (retrieval sets, cluster
partitions, curated titles, annotations) so drift in corpus text or
prompt templates is caught here rather than in the test suite.
"""
from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fieldseek.errors import FixtureMissing
from fieldseek.gateway import LlmGateway, PromptRequest, ProviderConfig, fixture_key
from fieldseek.pipeline import Services, explore, generate_paper_questions, generate_topic_questions
from fieldseek.scholar import ScholarClient, ScholarConfig
from fieldseek.session import SessionState

TOPIC = "misinformation awareness among older adults"

FIELDS = """\
- Psychology: cognitive psychology
- Education: adult education
- Sociology: media sociology
"""

EQS_BY_FIELD = {
    "Psychology: cognitive psychology": """\
1. What cognitive strategies reduce belief in false information?
2. How does aging affect memory for corrected misinformation?
3. Does overconfidence make people more likely to share misinformation?
""",
    "Education: adult education": """\
1. How effective are peer-led education programs for seniors?
2. What motivates older adults to learn digital literacy skills?
3. Which teaching methods improve media literacy in later life?
""",
    "Sociology: media sociology": """\
1. How do social networks shape misinformation exposure among older adults?
2. What role does trust in institutions play in misinformation belief?
3. How does online community membership influence fact-checking habits?
""",
}

PAPER_EQS = """\
1. How do seniors assess health claims found on social media?
2. What platform features slow the spread of viral health misinformation?
3. Does health misinformation change care decisions in later life?
"""

PSEUDO_ANSWERS = {
    "What cognitive strategies reduce belief in false information?": """\
- Critical thinking training and lateral reading teach readers to interrogate sources before accepting claims, and skepticism practice transfers to everyday browsing.
- Psychological inoculation exposes people to weakened manipulation tactics in advance; prebunking games build recognition that lasts for months.
- Overconfidence undermines correction, so calibration feedback is often paired with these strategies.
""",
    "How does aging affect memory for corrected misinformation?": """\
- Corrected misinformation keeps influencing recall long after a retraction, and the continued influence grows as memory updating slows with age.
- Retraction timing matters: early corrections leave weaker traces, while repeated falsehoods gain a familiarity that older memories mistake for truth.
""",
    "Does overconfidence make people more likely to share misinformation?": """\
- Overconfident judges share dubious posts at higher rates and tend to dismiss corrective advice from fact checkers.
- Inoculation and calibration feedback temper sharing; prebunking clips at scale and short games both improve manipulation recognition.
""",
    "How effective are peer-led education programs for seniors?": """\
- Peer-led education programs keep seniors enrolled when peers set the pace and classes meet close to home.
- Mentoring models pair experienced volunteers with newcomers, and peer teaching builds confidence with new devices.
""",
    "What motivates older adults to learn digital literacy skills?": """\
- Retirement opens time to learn digital literacy skills, and family contact such as grandchildren photos motivates weekly practice.
- Small workshops with adapted materials build confidence, and peer-led programs carry those gains into daily use.
""",
    "Which teaching methods improve media literacy in later life?": """\
- Media literacy coaching helps retirees judge what they read online; coached readers pause before forwarding chain messages.
- Workshops on digital literacy skills adapt materials for later life, and peer-led education programs reinforce the habits.
""",
    "How do social networks shape misinformation exposure among older adults?": """\
- Tightly knit social networks narrow the feeds seniors meet, and network position decides which stories reach them first.
- Homophily concentrates exposure in friendship circles, while online groups amplify whatever members echo; coordinated posting campaigns exploit both.
""",
    "What role does trust in institutions play in misinformation belief?": """\
- Where institutional trust runs deep, credible outlets face less doubt, and local broadcasters hold distinctive sway with seniors.
- Declining trust tracks doubts about official guidance, while civic habits sustain trust in credible sources across generations.
""",
    "How does online community membership influence fact-checking habits?": """\
- Online groups amplify exposure when members echo one another, and moderated communities show flatter cascades.
- Network position matters: peripheral members meet fewer corrections, while bridging ties widen the viewpoints on offer.
""",
}

TERMS = {
    "What cognitive strategies reduce belief in false information?": """\
- critical thinking training
- lateral reading
- source verification
- skepticism practice
- psychological inoculation
- prebunking
- overconfidence calibration
- manipulation tactics
""",
    "How does aging affect memory for corrected misinformation?": """\
- continued influence effect
- memory updating
- retraction timing
- repeated falsehoods
- familiarity
- source memory
""",
    "Does overconfidence make people more likely to share misinformation?": """\
- overconfidence
- sharing behavior
- calibration feedback
- corrective advice
- psychological inoculation
- prebunking at scale
""",
    "How effective are peer-led education programs for seniors?": """\
- peer-led programs
- senior centers
- mentoring models
- enrollment persistence
- peer teaching
- curriculum design
""",
    "What motivates older adults to learn digital literacy skills?": """\
- digital literacy workshops
- motivation in retirement
- family contact
- adapted materials
- peer-led programs
- confidence building
""",
    "Which teaching methods improve media literacy in later life?": """\
- media literacy coaching
- digital literacy workshops
- adapted materials
- peer-led education
- later life learning
""",
    "How do social networks shape misinformation exposure among older adults?": """\
- social network structure
- exposure trajectories
- homophily
- bridging ties
- online groups
- network position
- coordinated posting
""",
    "What role does trust in institutions play in misinformation belief?": """\
- institutional trust
- credible reporting
- official guidance
- civic habits
- local broadcasters
""",
    "How does online community membership influence fact-checking habits?": """\
- online groups
- community moderation
- network position
- peripheral members
- bridging ties
""",
}

QUERIES = {
    "What cognitive strategies reduce belief in false information?": """\
1. "cognitive strategies counter false information"
2. "critical thinking training skepticism"
3. "lateral reading source verification"
4. "inoculation prebunking misinformation"
5. "overconfidence calibration misinformation sharing"
6. "psychological inoculation seniors overconfidence"
7. "health misinformation seniors screening"
8. "false information older adults"
9. "critical thinking reasoned judgment"
""",
    "How does aging affect memory for corrected misinformation?": """\
1. "corrected misinformation memory aging"
2. "continued influence retraction recall"
3. "memory updating later adulthood"
4. "retraction timing debunked stories"
5. "aging source memory familiarity"
6. "corrected misinformation lingers recall"
7. "memory traces debunked retractions"
8. "memory aging outdated accounts"
9. "repeated falsehoods familiarity retraction"
""",
    "Does overconfidence make people more likely to share misinformation?": """\
1. "overconfidence misinformation sharing seniors"
2. "inoculation resistance misleading content"
3. "psychological inoculation video advertisements"
4. "overconfident sharing calibration feedback"
5. "inoculation overconfidence spread misinformation"
6. "corrective advice dismiss fact checkers"
7. "manipulation recognition game inoculation"
8. "misinformation spread seniors overconfidence"
9. "humility interventions advice overconfidence"
""",
    "How effective are peer-led education programs for seniors?": """\
1. "peer-led education programs seniors"
2. "senior centers attendance pace"
3. "mentoring volunteers community education"
4. "enrollment persistence scheduling transportation"
5. "peer teaching devices confidence"
6. "evaluate education programs seniors"
7. "curriculum modules classrooms seniors"
8. "peer-led programs busy calendars"
9. "volunteer mentors mutual benefits"
""",
    "What motivates older adults to learn digital literacy skills?": """\
1. "digital literacy skills workshops"
2. "motivation learn digital literacy retirement"
3. "peer-led education programs digital platforms"
4. "grandchildren photos weekly logins"
5. "media literacy coaching retirees"
6. "digital literacy confidence adult learners"
7. "facilitators hearing vision needs"
8. "navigate digital platforms"
9. "workshops build confidence later life"
""",
    "Which teaching methods improve media literacy in later life?": """\
1. "media literacy coaching later life"
2. "teaching methods media literacy"
3. "digital literacy skills workshops retirees"
4. "peer-led education programs later life"
5. "coached readers chain messages"
6. "curriculum design adult learners"
7. "judge read online media"
8. "workshops adapted materials beginners"
9. "evaluate peer-led programs seniors"
""",
    "How do social networks shape misinformation exposure among older adults?": """\
1. "social networks exposure seniors"
2. "homophily friendship circles retiree"
3. "online groups echo moderated cascades"
4. "network position peripheral stories"
5. "social networks narrow feeds seniors"
6. "exposure trajectories seniors online"
7. "bridging ties viewpoints exposure"
8. "misinformation exposure social networks seniors"
9. "coordinated posting suspicious accounts"
""",
    "What role does trust in institutions play in misinformation belief?": """\
1. "institutional trust credible reporting"
2. "trust institutions official guidance"
3. "declining trust pension disputes"
4. "credible outlets local broadcasters"
5. "civic habits credible sources generations"
6. "trust credible reporting seniors"
7. "public institutions accountable reporting"
8. "doubt official guidance retirees"
9. "town meetings reporting civic"
""",
    "How does online community membership influence fact-checking habits?": """\
1. "online communities exposure seniors"
2. "moderated groups echo members"
3. "fact-checking seniors networks feeds"
4. "weak ties stories reach seniors"
5. "social networks trajectories online"
6. "friendship circles diverse contacts"
7. "corrections peripheral members network"
8. "online groups amplify seniors exposure"
9. "networks seniors viewpoints"
""",
}

TITLE_CRITICAL = "Critical Thinking and Cognitive Improvement"
TITLE_INOCULATION = "Inoculation and Overconfidence Strategies to Combat Misinformation"
TITLE_MEMORY = "Memory for Corrections in Later Adulthood"
TITLE_PEER = "Peer-Led Learning Programs for Seniors"
TITLE_LITERACY = "Digital Literacy Pathways in Later Life"
TITLE_NETWORKS = "Social Network Structure and Misinformation Exposure"
TITLE_COMMUNITIES = "Online Communities and Exposure Pathways"
TITLE_TRUST = "Institutional Trust and Credible Information"


def _title_for(question: str, papers_block: str) -> str:
    block = papers_block.lower()
    if "critical thinking" in block:
        return TITLE_CRITICAL
    if "inoculation" in block:
        return TITLE_INOCULATION
    if "corrected misinformation" in block:
        return TITLE_MEMORY
    if "peer-led" in block:
        return TITLE_PEER
    if "literacy" in block:
        return TITLE_LITERACY
    if "exposure" in block:
        if "fact-checking" in question.lower():
            return TITLE_COMMUNITIES
        return TITLE_NETWORKS
    if "trust" in block:
        return TITLE_TRUST
    raise KeyError(f"no title rule for papers under {question!r}:\n{papers_block}")


def _relatedness(question: str, papers_block: str) -> str:
    block = papers_block.lower()
    if "inoculation" in block and question.startswith("How do social networks"):
        return "No. These papers test message-level defenses and say nothing about network structure."
    return "Yes. The cluster speaks directly to the question."


DIVISIBILITY = "No. The cluster reads as one coherent line of work."


def author(request: PromptRequest) -> str:
    t = request.template_id
    v = request.variables
    if t == "identify_fields":
        return FIELDS
    if t == "eq_generation":
        return EQS_BY_FIELD[v["field"]]
    if t == "eq_from_paper":
        assert "Health misinformation" in v["title"], v["title"]
        return PAPER_EQS
    if t == "pseudo_answers":
        return PSEUDO_ANSWERS[v["question"]]
    if t == "term_extraction":
        return TERMS[v["question"]]
    if t == "query_generation":
        return QUERIES[v["question"]]
    if t == "cluster_relatedness":
        return _relatedness(v["question"], v["papers"])
    if t == "cluster_divisibility":
        return DIVISIBILITY
    if t == "theme_title":
        return _title_for(v["question"], v["papers"])
    raise KeyError(f"no authoring rule for template {t!r} with {sorted(v)}")


class AuthoringGateway(LlmGateway):
    """Writes a fixture from the authoring tables whenever one is missing."""

    def __init__(self, config: ProviderConfig):
        super().__init__(config)
        self.written: list[str] = []

    def complete(self, request: PromptRequest) -> str:
        try:
            return super().complete(request)
        except FixtureMissing:
            key = fixture_key(request.template_id, request.variables)
            path = self.config.fixture_dir / f"{key}.txt"
            path.write_text(author(request), encoding="utf-8")
            self.written.append(f"{request.template_id} -> {key[:12]}")
            return super().complete(request)


A = ["P001", "P002", "P003", "P004", "P005"]
B = ["P006", "P007", "P008", "P009", "P010"]
C = ["P011", "P012", "P013", "P014"]
D = ["P015", "P016", "P017", "P018", "P019"]
E = ["P020", "P021", "P022"]
F = ["P023", "P024", "P025", "P026"]
G = ["P027", "P028", "P029"]

# Per question: retrieved papers in order, curated themes, leftover pool.
EXPECTED = {
    "What cognitive strategies reduce belief in false information?": {
        "papers": A + B + ["P030"],
        "themes": [(TITLE_CRITICAL, A), (TITLE_INOCULATION, B)],
        "possibly": ["P030"],
    },
    "How does aging affect memory for corrected misinformation?": {
        "papers": C,
        "themes": [(TITLE_MEMORY, C)],
        "possibly": [],
    },
    "Does overconfidence make people more likely to share misinformation?": {
        "papers": B + ["P030"],
        "themes": [(TITLE_INOCULATION, B)],
        "possibly": ["P030"],
    },
    "How effective are peer-led education programs for seniors?": {
        "papers": D,
        "themes": [(TITLE_PEER, D)],
        "possibly": [],
    },
    "What motivates older adults to learn digital literacy skills?": {
        "papers": E + D,
        "themes": [(TITLE_LITERACY, E), (TITLE_PEER, D)],
        "possibly": [],
    },
    "Which teaching methods improve media literacy in later life?": {
        "papers": E + D,
        "themes": [(TITLE_LITERACY, E), (TITLE_PEER, D)],
        "possibly": [],
    },
    "How do social networks shape misinformation exposure among older adults?": {
        "papers": F + ["P030"] + B + ["P031"],
        "themes": [(TITLE_NETWORKS, F)],
        "possibly": ["P030", "P031"] + B,
    },
    "What role does trust in institutions play in misinformation belief?": {
        "papers": G,
        "themes": [(TITLE_TRUST, G)],
        "possibly": [],
    },
    "How does online community membership influence fact-checking habits?": {
        "papers": F,
        "themes": [(TITLE_COMMUNITIES, F)],
        "possibly": [],
    },
}


def run_scenario(services: Services) -> SessionState:
    state = SessionState.create(session_id="fixture-build", topic_text=TOPIC)
    eqs = generate_topic_questions(state, services, max_fields=6)
    assert len(eqs) == 9, [e.text for e in eqs]
    assert list(EXPECTED) == [e.text for e in eqs], [e.text for e in eqs]

    for eq in eqs:
        state.update_question(eq.id, selected=True)
        exploration = explore(state, services, eq.id)
        expect = EXPECTED[eq.text]
        got_papers = exploration.paper_ids
        if got_papers != expect["papers"]:
            raise AssertionError(
                f"{eq.text!r}: retrieved {got_papers}, expected {expect['papers']}"
            )
        got_themes = [(t.title, t.paper_ids) for t in exploration.theme_set.themes]
        want_themes = [(title, list(ids)) for title, ids in expect["themes"]]
        if got_themes != want_themes:
            raise AssertionError(
                f"{eq.text!r}: themes {got_themes}, expected {want_themes}"
            )
        if exploration.theme_set.possibly_relevant != expect["possibly"]:
            raise AssertionError(
                f"{eq.text!r}: pool {exploration.theme_set.possibly_relevant}, "
                f"expected {expect['possibly']}"
            )

    # Annotation spot checks on the first exploration: the shared anchor
    # sentence wins where it covers concepts, the fallback fires where
    # nothing is covered.
    first = state.get_exploration(eqs[0].id)
    ann = first.annotations["P001"]
    assert ann.key_sentence_index == 1, ann
    assert ann.covered_concepts == ("older adults", "false information"), ann
    assert ann.relevant_phrases == (
        "cognitive strategies",
        "counter false information",
        "older adults",
    ), ann
    fallback = first.annotations["P006"]
    assert fallback.key_sentence_index == 0, fallback
    assert fallback.covered_concepts == (), fallback

    seeded = generate_paper_questions(state, services, "P030")
    assert len(seeded) == 3, [q.text for q in seeded]
    assert all(q.origin == "paper_seeded" and q.text.endswith("?") for q in seeded)
    return state


def main() -> None:
    fixture_dir = ROOT / "src" / "fieldseek" / "assets" / "fixtures"
    fixture_dir.mkdir(parents=True, exist_ok=True)
    for stale in fixture_dir.glob("*.txt"):
        stale.unlink()

    provider = ProviderConfig(mode="scripted", fixture_dir=fixture_dir)
    scholar = ScholarClient(ScholarConfig())

    authoring = Services(gateway=AuthoringGateway(provider), scholar=scholar)
    run_scenario(authoring)
    print(f"authored {len(authoring.gateway.written)} fixtures")

    # Replay with the plain gateway: any FixtureMissing here means the
    # authoring pass produced a key the runtime flow does not reproduce.
    replay = Services(gateway=LlmGateway(provider), scholar=scholar)
    run_scenario(replay)
    count = len(list(fixture_dir.glob("*.txt")))
    print(f"replay clean, {count} fixtures on disk")


if __name__ == "__main__":
    main()
