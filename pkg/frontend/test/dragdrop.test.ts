// @vitest-environment happy-dom
import { beforeEach, describe, expect, it, vi } from "vitest";

import {
  DragPayload,
  DropActions,
  DropTarget,
  allowedDrop,
  beginDrag,
  dragPayload,
  endDrag,
  performDrop,
  wireDragSource,
  wireDropTarget,
} from "../src/dragdrop.js";

const theme: DragPayload = { kind: "theme", themeId: "eq-1-t1", title: "Memory" };
const paper: DragPayload = { kind: "paper", paperId: "P030" };

function recordingActions(): { actions: DropActions; log: string[] } {
  const log: string[] = [];
  return {
    log,
    actions: {
      dropTheme: async (themeId) => void log.push(`theme:${themeId}`),
      dropPaper: async (paperId, collectionId) =>
        void log.push(`paper:${paperId}:${collectionId ?? "-"}`),
      suggestFromPaper: async (paperId) => void log.push(`suggest:${paperId}`),
    },
  };
}

beforeEach(() => endDrag());

describe("allowedDrop matrix", () => {
  const collectionView: DropTarget = { kind: "collection-view" };
  const collection: DropTarget = { kind: "collection", collectionId: "col-1" };
  const orientation: DropTarget = { kind: "orientation" };
  const eqCard: DropTarget = { kind: "eq-card", eqId: "eq-1" };

  it("routes themes only to the collection view", () => {
    expect(allowedDrop(theme, collectionView)).toBe(true);
    expect(allowedDrop(theme, collection)).toBe(false);
    expect(allowedDrop(theme, orientation)).toBe(false);
    expect(allowedDrop(theme, eqCard)).toBe(false);
  });

  it("routes papers to collections and orientation but never question cards", () => {
    expect(allowedDrop(paper, collectionView)).toBe(true);
    expect(allowedDrop(paper, collection)).toBe(true);
    expect(allowedDrop(paper, orientation)).toBe(true);
    expect(allowedDrop(paper, eqCard)).toBe(false);
  });
});

describe("performDrop", () => {
  it("dispatches a theme drop to dropTheme", async () => {
    const { actions, log } = recordingActions();
    beginDrag(theme);
    expect(await performDrop({ kind: "collection-view" }, actions)).toBe(true);
    expect(log).toEqual(["theme:eq-1-t1"]);
  });

  it("sends a paper on a collection card to that collection", async () => {
    const { actions, log } = recordingActions();
    beginDrag(paper);
    await performDrop({ kind: "collection", collectionId: "col-2" }, actions);
    expect(log).toEqual(["paper:P030:col-2"]);
  });

  it("sends a paper on the view to the default bucket", async () => {
    const { actions, log } = recordingActions();
    beginDrag(paper);
    await performDrop({ kind: "collection-view" }, actions);
    expect(log).toEqual(["paper:P030:-"]);
  });

  it("asks for suggestions when a paper lands on orientation", async () => {
    const { actions, log } = recordingActions();
    beginDrag(paper);
    await performDrop({ kind: "orientation" }, actions);
    expect(log).toEqual(["suggest:P030"]);
  });

  it("rejects disallowed pairs without issuing a request", async () => {
    const { actions, log } = recordingActions();
    beginDrag(paper);
    expect(await performDrop({ kind: "eq-card", eqId: "eq-1" }, actions)).toBe(false);
    expect(log).toEqual([]);
  });

  it("consumes the payload even on rejection", async () => {
    const { actions } = recordingActions();
    beginDrag(theme);
    await performDrop({ kind: "eq-card", eqId: "eq-1" }, actions);
    expect(dragPayload()).toBeNull();
  });
});

describe("DOM wiring", () => {
  it("dragstart on a source arms the payload and dragend clears it", () => {
    const node = document.createElement("div");
    wireDragSource(node, () => theme);
    expect(node.draggable).toBe(true);
    node.dispatchEvent(new Event("dragstart", { bubbles: true }));
    expect(dragPayload()).toEqual(theme);
    node.dispatchEvent(new Event("dragend", { bubbles: true }));
    expect(dragPayload()).toBeNull();
  });

  it("drop on a valid target runs the action", async () => {
    const { actions, log } = recordingActions();
    const zone = document.createElement("div");
    wireDropTarget(zone, { kind: "collection-view" }, actions);
    beginDrag(theme);
    zone.dispatchEvent(new Event("drop", { bubbles: true, cancelable: true }));
    await vi.waitFor(() => expect(log).toEqual(["theme:eq-1-t1"]));
    expect(zone.classList.contains("drop-rejected")).toBe(false);
  });

  it("drop on an invalid target flashes the rejection cue and stays silent", async () => {
    const { actions, log } = recordingActions();
    const card = document.createElement("div");
    wireDropTarget(card, { kind: "eq-card", eqId: "eq-3" }, actions);
    beginDrag(paper);
    card.dispatchEvent(new Event("drop", { bubbles: true, cancelable: true }));
    await vi.waitFor(() => expect(card.classList.contains("drop-rejected")).toBe(true));
    expect(log).toEqual([]);
  });

  it("nested drops do not bubble into outer targets", async () => {
    const { actions, log } = recordingActions();
    const outer = document.createElement("div");
    const inner = document.createElement("div");
    outer.appendChild(inner);
    wireDropTarget(outer, { kind: "collection-view" }, actions);
    wireDropTarget(inner, { kind: "collection", collectionId: "col-9" }, actions);
    beginDrag(paper);
    inner.dispatchEvent(new Event("drop", { bubbles: true, cancelable: true }));
    await vi.waitFor(() => expect(log).toEqual(["paper:P030:col-9"]));
  });
});
