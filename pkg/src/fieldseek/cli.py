"""Headless end-to-end run: topic in, curated outline file out.

The command drives the same flows as the HTTP service, synchronously and
in memory: generate questions for the topic, explore every one, sweep all
resulting themes into collections, and export. With scripted providers
(the default) the run is fully deterministic, so repeated invocations
write identical bytes.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from .errors import FieldseekError
from .export import export_outline
from .gateway import LlmGateway, ProviderConfig
from .pipeline import Services, explore, generate_topic_questions
from .scholar import ScholarClient, ScholarConfig
from .session import SessionState


def _build_services(fixture_dir: Path | None) -> Services:
    if fixture_dir is not None:
        provider = ProviderConfig(mode="scripted", fixture_dir=fixture_dir)
    else:
        provider = ProviderConfig.from_env()
    return Services(
        gateway=LlmGateway(provider),
        scholar=ScholarClient(ScholarConfig.from_env()),
    )


@click.command()
@click.option("--topic", required=True, help="Research topic to explore.")
@click.option(
    "--max-fields",
    default=6,
    show_default=True,
    type=click.IntRange(1, 12),
    help="Cap on the number of fields to draft questions for.",
)
@click.option(
    "--out",
    "out_path",
    default="outline.md",
    show_default=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Output file; .json selects the JSON outline, anything else markdown.",
)
@click.option(
    "--scripted",
    "fixture_dir",
    default=None,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Force scripted completions from this fixture directory.",
)
def main(topic: str, max_fields: int, out_path: Path, fixture_dir: Path | None) -> None:
    """Explore TOPIC across fields and write a literature outline."""
    try:
        services = _build_services(fixture_dir)
        # The session id never reaches the outline, so a constant keeps the
        # whole run reproducible.
        state = SessionState.create(session_id="cli", topic_text=topic)

        eqs = generate_topic_questions(state, services, max_fields=max_fields)
        if not eqs:
            raise click.ClickException("no questions could be generated for this topic")
        click.echo(f"drafted {len(eqs)} questions", err=True)

        for eq in eqs:
            state.update_question(eq.id, selected=True)
            exploration = explore(state, services, eq.id)
            click.echo(
                f"explored {eq.id}: {len(exploration.paper_ids)} papers, "
                f"{len(exploration.theme_set.themes)} themes",
                err=True,
            )

        theme_edits = [
            {"op": "drop_theme", "theme_id": theme.theme_id}
            for eq in eqs
            for theme in state.get_exploration(eq.id).theme_set.themes
        ]
        if theme_edits:
            state.apply_edits(theme_edits)
        state.check_invariants()

        format = "json" if out_path.suffix.lower() == ".json" else "markdown"
        out_path.write_text(
            export_outline(state, services.embedder, format=format), encoding="utf-8"
        )
        click.echo(f"wrote {out_path}", err=True)
    except FieldseekError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
