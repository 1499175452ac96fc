/**
 * Exploration view: per-question theme accordions with draggable theme
 * headers and paper cards, the possibly-relevant shelf, and the query
 * list that produced the retrieval.
 */
import { ThemesPayload } from "./api.js";
import { clear, el } from "./dom.js";
import { wireDragSource } from "./dragdrop.js";
import { PaperCardHandlers, attachLinksDrawer, renderPaperCard } from "./paperCard.js";

export function renderExploration(
  container: HTMLElement,
  explorations: Map<string, ThemesPayload>,
  eqTexts: Map<string, string>,
  handlers: PaperCardHandlers,
): void {
  clear(container);
  container.appendChild(el("h2", "view-title", "Exploration"));
  if (explorations.size === 0) {
    container.appendChild(
      el("p", "empty-hint", "Select a question and explore it to see themes here."),
    );
    return;
  }
  for (const [eqId, payload] of explorations) {
    container.appendChild(renderOneExploration(eqId, payload, eqTexts, handlers));
  }
}

function renderOneExploration(
  eqId: string,
  payload: ThemesPayload,
  eqTexts: Map<string, string>,
  handlers: PaperCardHandlers,
): HTMLElement {
  const block = el("section", "exploration-block");
  block.dataset.eqId = eqId;
  block.appendChild(el("h3", "exploration-question", eqTexts.get(eqId) ?? eqId));

  const queries = el("details", "query-list");
  queries.appendChild(el("summary", "", `${payload.queries.length} search queries`));
  const list = el("ul", "queries");
  for (const query of payload.queries) {
    list.appendChild(el("li", "query", query));
  }
  queries.appendChild(list);
  block.appendChild(queries);

  for (const theme of payload.themes) {
    const accordion = el("details", "theme-accordion");
    accordion.open = true;
    accordion.dataset.themeId = theme.theme_id;
    const summary = el("summary", "theme-title", `${theme.title} (${theme.papers.length})`);
    wireDragSource(summary, () => ({
      kind: "theme",
      themeId: theme.theme_id,
      title: theme.title,
    }));
    accordion.appendChild(summary);
    for (const paper of theme.papers) {
      const card = renderPaperCard(paper, handlers);
      attachLinksDrawer(card, paper.paper_id, handlers);
      accordion.appendChild(card);
    }
    block.appendChild(accordion);
  }

  if (payload.possibly_relevant.length > 0) {
    const shelf = el("section", "possibly-relevant");
    shelf.appendChild(
      el("h4", "shelf-title", `Possibly relevant (${payload.possibly_relevant.length})`),
    );
    for (const paper of payload.possibly_relevant) {
      const card = renderPaperCard(paper, handlers);
      attachLinksDrawer(card, paper.paper_id, handlers);
      shelf.appendChild(card);
    }
    block.appendChild(shelf);
  }
  return block;
}
