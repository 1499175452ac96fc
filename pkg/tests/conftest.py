"""Shared fixtures: scripted services and a fully explored session."""
from __future__ import annotations

import pytest

from fieldseek.gateway import LlmGateway, ProviderConfig
from fieldseek.pipeline import Services, explore, generate_topic_questions
from fieldseek.scholar import ScholarClient, ScholarConfig
from fieldseek.session import SessionState

SCENARIO_TOPIC = "misinformation awareness among older adults"


@pytest.fixture(scope="session")
def services() -> Services:
    """Scripted gateway plus bundled corpus; no network involved."""
    return Services(
        gateway=LlmGateway(ProviderConfig(mode="scripted")),
        scholar=ScholarClient(ScholarConfig(mode="corpus")),
    )


def run_scenario(services: Services, session_id: str = "test") -> SessionState:
    """Generate and explore every bundled question; returns the state."""
    state = SessionState.create(session_id=session_id, topic_text=SCENARIO_TOPIC)
    for eq in generate_topic_questions(state, services):
        state.update_question(eq.id, selected=True)
        explore(state, services, eq.id)
    return state


@pytest.fixture(scope="session")
def explored_state(services: Services) -> SessionState:
    """One shared read-only scenario run; tests that mutate must copy."""
    return run_scenario(services)


@pytest.fixture()
def fresh_state(services: Services) -> SessionState:
    """A scenario run private to the test, safe to mutate."""
    return run_scenario(services)
