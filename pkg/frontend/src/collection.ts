/**
 * Collection view: the drop zone for themes and papers, listing every
 * collection with its papers. Dropping a theme anywhere in the view
 * creates a collection with the theme's title; dropping a paper on a
 * specific collection files it there.
 */
import { Collection, PaperInfo } from "./api.js";
import { clear, el } from "./dom.js";
import { DropActions, wireDropTarget } from "./dragdrop.js";

export function renderCollections(
  container: HTMLElement,
  collections: Collection[],
  papers: Record<string, PaperInfo>,
  dropActions: DropActions,
): void {
  clear(container);
  container.appendChild(el("h2", "view-title", "Collections"));
  if (collections.length === 0) {
    container.appendChild(
      el("p", "empty-hint", "Drag a theme or paper here to start a collection."),
    );
  }
  for (const collection of collections) {
    const card = el("section", "collection-card");
    card.dataset.collectionId = collection.collection_id;
    wireDropTarget(
      card,
      { kind: "collection", collectionId: collection.collection_id },
      dropActions,
    );
    card.appendChild(
      el("h3", "collection-name", `${collection.name} (${collection.paper_ids.length})`),
    );
    const list = el("ul", "collection-papers");
    for (const paperId of collection.paper_ids) {
      const title = papers[paperId]?.title ?? paperId;
      const item = el("li", "collection-paper", title);
      item.dataset.paperId = paperId;
      list.appendChild(item);
    }
    card.appendChild(list);
    container.appendChild(card);
  }
}
