/**
 * Orientation view: the question list grouped by discipline, a filter
 * bar, in-place editing, selection toggles, and the confirmation block
 * for paper-suggested questions. Dropping a paper here asks the server
 * for new suggestions; anything else dropped here is rejected.
 */
import { Eq } from "./api.js";
import { clear, el } from "./dom.js";
import { DropActions, wireDropTarget } from "./dragdrop.js";

export interface OrientationHandlers {
  onToggleSelected(eqId: string, selected: boolean): void;
  onEditText(eqId: string, text: string): void;
  onExplore(eqId: string): void;
  onFilter(discipline: string | null): void;
  onAcceptSuggested(eqId: string): void;
}

export interface OrientationData {
  eqs: Eq[];
  filter: string | null;
  suggested: Eq[];
  exploredEqIds: Set<string>;
  busyEqIds: Set<string>;
}

/** Group questions by discipline, preserving first-seen order. */
export function groupByDiscipline(eqs: Eq[]): Map<string, Eq[]> {
  const groups = new Map<string, Eq[]>();
  for (const eq of eqs) {
    const bucket = groups.get(eq.discipline);
    if (bucket) {
      bucket.push(eq);
    } else {
      groups.set(eq.discipline, [eq]);
    }
  }
  return groups;
}

export function renderOrientation(
  container: HTMLElement,
  data: OrientationData,
  handlers: OrientationHandlers,
  dropActions: DropActions,
): void {
  clear(container);
  container.appendChild(el("h2", "view-title", "Orientation"));

  const groups = groupByDiscipline(data.eqs);
  container.appendChild(renderFilterBar(groups, data.filter, handlers));

  for (const [discipline, eqs] of groups) {
    if (data.filter && discipline !== data.filter) continue;
    const section = el("section", "discipline-group");
    section.dataset.discipline = discipline;
    section.appendChild(el("h3", "discipline-name", `${discipline} (${eqs.length})`));
    for (const eq of eqs) {
      section.appendChild(renderEqCard(eq, data, handlers, dropActions));
    }
    container.appendChild(section);
  }

  if (data.suggested.length > 0) {
    container.appendChild(renderSuggested(data.suggested, handlers));
  }
}

function renderFilterBar(
  groups: Map<string, Eq[]>,
  active: string | null,
  handlers: OrientationHandlers,
): HTMLElement {
  const bar = el("nav", "filter-bar");
  const all = el("button", active === null ? "filter active" : "filter", "All");
  all.addEventListener("click", () => handlers.onFilter(null));
  bar.appendChild(all);
  for (const [discipline, eqs] of groups) {
    const button = el(
      "button",
      active === discipline ? "filter active" : "filter",
      `${discipline} (${eqs.length})`,
    );
    button.addEventListener("click", () => handlers.onFilter(discipline));
    bar.appendChild(button);
  }
  return bar;
}

function renderEqCard(
  eq: Eq,
  data: OrientationData,
  handlers: OrientationHandlers,
  dropActions: DropActions,
): HTMLElement {
  const card = el("div", "eq-card");
  card.dataset.eqId = eq.id;
  // Papers cannot be dropped on a question card; the cue shows here.
  wireDropTarget(card, { kind: "eq-card", eqId: eq.id }, dropActions);

  const header = el("div", "eq-header");
  const checkbox = el("input", "eq-selected");
  checkbox.type = "checkbox";
  checkbox.checked = eq.selected;
  checkbox.addEventListener("change", () => {
    handlers.onToggleSelected(eq.id, checkbox.checked);
  });
  header.appendChild(checkbox);
  header.appendChild(el("span", "eq-text", eq.text));
  if (eq.origin === "user_edited") {
    header.appendChild(el("span", "origin-badge", "edited"));
  } else if (eq.origin === "paper_seeded") {
    header.appendChild(el("span", "origin-badge", "from paper"));
  }
  for (const flag of eq.flags) {
    header.appendChild(el("span", "flag-badge", flag.replace(/_/g, " ")));
  }
  card.appendChild(header);

  const meta = eq.subfield ? `${eq.discipline} / ${eq.subfield}` : eq.discipline;
  card.appendChild(el("div", "eq-meta", meta));

  const controls = el("div", "eq-controls");
  const edit = el("button", "eq-edit", "Edit");
  edit.addEventListener("click", () => startInlineEdit(card, eq, handlers));
  controls.appendChild(edit);

  if (eq.selected) {
    if (data.exploredEqIds.has(eq.id)) {
      controls.appendChild(el("span", "eq-status", "explored"));
    } else if (data.busyEqIds.has(eq.id)) {
      controls.appendChild(el("span", "eq-status", "exploring..."));
    } else {
      const explore = el("button", "eq-explore", "Explore");
      explore.addEventListener("click", () => handlers.onExplore(eq.id));
      controls.appendChild(explore);
    }
  }
  card.appendChild(controls);
  return card;
}

function startInlineEdit(card: HTMLElement, eq: Eq, handlers: OrientationHandlers): void {
  if (card.querySelector(".eq-edit-input")) return;
  const editor = el("div", "eq-editor");
  const input = el("input", "eq-edit-input");
  input.type = "text";
  input.value = eq.text;
  const save = el("button", "eq-save", "Save");
  save.addEventListener("click", () => {
    const text = input.value.trim();
    if (text && text !== eq.text) {
      handlers.onEditText(eq.id, text);
    }
    editor.remove();
  });
  editor.appendChild(input);
  editor.appendChild(save);
  card.appendChild(editor);
  input.focus();
}

function renderSuggested(suggested: Eq[], handlers: OrientationHandlers): HTMLElement {
  const block = el("section", "suggested-block");
  block.appendChild(el("h3", "suggested-title", "Suggested questions"));
  for (const eq of suggested) {
    const row = el("div", "suggested-card");
    row.dataset.eqId = eq.id;
    row.appendChild(el("span", "suggested-text", eq.text));
    row.appendChild(el("span", "eq-meta", eq.discipline));
    const accept = el("button", "suggested-accept", "Accept");
    accept.addEventListener("click", () => handlers.onAcceptSuggested(eq.id));
    row.appendChild(accept);
    block.appendChild(row);
  }
  return block;
}
