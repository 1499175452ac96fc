/**
 * Paper cards: title with server-chosen phrase highlights, the single
 * key sentence collapsed by default, an expand control for the full
 * abstract, and a citation/reference drawer whose discipline groups
 * render in server order. All spans and orderings come from the API.
 */
import { LinksPayload, ThemePaper } from "./api.js";
import { el, fragmentWithMarks, highlightPhrases } from "./dom.js";
import { wireDragSource } from "./dragdrop.js";

export interface PaperCardHandlers {
  onLinks(paperId: string, direction: "citations" | "references"): Promise<LinksPayload>;
}

export function renderPaperCard(paper: ThemePaper, handlers: PaperCardHandlers): HTMLElement {
  const card = el("article", "paper-card");
  card.dataset.paperId = paper.paper_id;
  wireDragSource(card, () => ({ kind: "paper", paperId: paper.paper_id }));

  const phrases = paper.annotation?.relevant_phrases ?? [];
  const title = el("h4", "paper-title");
  title.appendChild(highlightPhrases(paper.title, phrases));
  card.appendChild(title);

  const metaParts = [paper.disciplines.join(", ")];
  if (paper.year !== null) metaParts.push(String(paper.year));
  if (paper.venue) metaParts.push(paper.venue);
  card.appendChild(el("div", "paper-meta", metaParts.join(" · ")));

  if (paper.abstract) {
    card.appendChild(renderSentenceSection(paper, phrases));
  }
  return card;
}

function renderSentenceSection(paper: ThemePaper, phrases: string[]): HTMLElement {
  const section = el("div", "paper-sentence-section");

  const sentence = el("p", "key-sentence");
  if (paper.annotation && paper.annotation.key_sentence) {
    sentence.appendChild(
      fragmentWithMarks(paper.annotation.key_sentence, paper.annotation.spans),
    );
  } else {
    sentence.textContent = paper.abstract.split(". ")[0] ?? paper.abstract;
  }
  section.appendChild(sentence);

  const abstract = el("p", "paper-abstract");
  abstract.hidden = true;
  abstract.appendChild(highlightPhrases(paper.abstract, phrases));
  section.appendChild(abstract);

  const toggle = el("button", "abstract-toggle", "Show abstract");
  toggle.addEventListener("click", () => {
    abstract.hidden = !abstract.hidden;
    sentence.hidden = !abstract.hidden;
    toggle.textContent = abstract.hidden ? "Show abstract" : "Hide abstract";
  });
  section.appendChild(toggle);
  return section;
}

/** Attach the links drawer to a card; fetches on first open per direction. */
export function attachLinksDrawer(card: HTMLElement, paperId: string, handlers: PaperCardHandlers): void {
  const drawer = el("div", "links-drawer");
  for (const direction of ["citations", "references"] as const) {
    const button = el("button", "links-toggle", direction);
    const host = el("div", "links-groups");
    host.hidden = true;
    button.addEventListener("click", async () => {
      if (host.hidden && host.childElementCount === 0) {
        try {
          renderLinkGroups(host, await handlers.onLinks(paperId, direction));
        } catch (error) {
          host.appendChild(
            el("div", "links-error", error instanceof Error ? error.message : "failed"),
          );
        }
      }
      host.hidden = !host.hidden;
    });
    drawer.appendChild(button);
    drawer.appendChild(host);
  }
  card.appendChild(drawer);
}

/** Discipline groups exactly in server order; no client re-sorting. */
export function renderLinkGroups(host: HTMLElement, payload: LinksPayload): void {
  if (payload.groups.length === 0) {
    host.appendChild(el("div", "links-empty", "no linked papers"));
    return;
  }
  for (const group of payload.groups) {
    const section = el("section", "link-group");
    section.dataset.discipline = group.discipline;
    section.appendChild(
      el(
        "h5",
        "link-group-title",
        `${group.discipline} (${group.combined.toFixed(3)})`,
      ),
    );
    const list = el("ul", "link-papers");
    for (const paper of group.papers) {
      const item = el("li", "link-paper", paper.title);
      item.dataset.paperId = paper.paper_id;
      list.appendChild(item);
    }
    section.appendChild(list);
    host.appendChild(section);
  }
}
