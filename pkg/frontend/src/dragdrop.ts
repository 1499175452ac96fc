/**
 * Drag and drop between the three views.
 *
 * The allowed matrix: a theme drops on the collection view (creating a
 * collection with the theme's title), a paper drops on the collection
 * view or a specific collection, and a paper drops on the orientation
 * view (asking for suggested questions). Everything else is rejected
 * with a visual cue and no request.
 *
 * The payload lives in module state rather than DataTransfer because
 * DataTransfer contents are unreadable during dragover, exactly when the
 * matrix check has to run.
 */

export type DragPayload =
  | { kind: "theme"; themeId: string; title: string }
  | { kind: "paper"; paperId: string };

export type DropTarget =
  | { kind: "collection-view" }
  | { kind: "collection"; collectionId: string }
  | { kind: "orientation" }
  | { kind: "eq-card"; eqId: string };

export interface DropActions {
  dropTheme(themeId: string): Promise<void>;
  dropPaper(paperId: string, collectionId?: string): Promise<void>;
  suggestFromPaper(paperId: string): Promise<void>;
}

let current: DragPayload | null = null;

export function beginDrag(payload: DragPayload): void {
  current = payload;
}

export function endDrag(): void {
  current = null;
}

export function dragPayload(): DragPayload | null {
  return current;
}

export function allowedDrop(payload: DragPayload, target: DropTarget): boolean {
  if (payload.kind === "theme") {
    return target.kind === "collection-view";
  }
  return (
    target.kind === "collection-view" ||
    target.kind === "collection" ||
    target.kind === "orientation"
  );
}

/**
 * Route the current payload to the matching action. Returns false (and
 * issues no request) when there is no payload or the matrix rejects the
 * pair; the payload is consumed either way.
 */
export async function performDrop(target: DropTarget, actions: DropActions): Promise<boolean> {
  const payload = current;
  current = null;
  if (!payload || !allowedDrop(payload, target)) {
    return false;
  }
  if (payload.kind === "theme") {
    await actions.dropTheme(payload.themeId);
  } else if (target.kind === "orientation") {
    await actions.suggestFromPaper(payload.paperId);
  } else {
    await actions.dropPaper(
      payload.paperId,
      target.kind === "collection" ? target.collectionId : undefined,
    );
  }
  return true;
}

export function wireDragSource(node: HTMLElement, payload: () => DragPayload): void {
  node.draggable = true;
  node.addEventListener("dragstart", (event) => {
    event.stopPropagation();
    beginDrag(payload());
  });
  node.addEventListener("dragend", () => endDrag());
}

const REJECT_CLASS = "drop-rejected";
const REJECT_CUE_MS = 600;

export function flashRejection(node: HTMLElement): void {
  node.classList.add(REJECT_CLASS);
  setTimeout(() => node.classList.remove(REJECT_CLASS), REJECT_CUE_MS);
}

export function wireDropTarget(
  node: HTMLElement,
  target: DropTarget,
  actions: DropActions,
): void {
  node.addEventListener("dragover", (event) => {
    event.stopPropagation();
    const payload = current;
    if (payload && allowedDrop(payload, target)) {
      event.preventDefault();
    }
  });
  node.addEventListener("drop", (event) => {
    event.preventDefault();
    event.stopPropagation();
    void performDrop(target, actions).then(
      (accepted) => {
        if (!accepted) flashRejection(node);
      },
      // A drop the server refused gets the same cue as a rejected one.
      () => flashRejection(node),
    );
  });
}
