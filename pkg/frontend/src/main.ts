/**
 * Single-page client for the co-exploration service. One App instance
 * owns the session snapshot plus fetched theme payloads and re-renders
 * the three views from that state after every server-confirmed change.
 * State-changing requests go through a queue so per-session edits reach
 * the server one at a time.
 */
import { ApiClient, Eq, LinksPayload, SessionSnapshot, ThemesPayload } from "./api.js";
import { el, clear } from "./dom.js";
import { DropActions, wireDropTarget } from "./dragdrop.js";
import { DEFAULT_POLL_DELAYS, pollJob } from "./jobs.js";
import { optimistic } from "./optimistic.js";
import { renderCollections } from "./collection.js";
import { renderExploration } from "./exploration.js";
import { OrientationHandlers, renderOrientation } from "./orientation.js";

export interface AppRoot {
  orientation: HTMLElement;
  exploration: HTMLElement;
  collections: HTMLElement;
  status: HTMLElement;
}

export class App {
  sessionId: string | null = null;
  snapshot: SessionSnapshot | null = null;
  readonly themes = new Map<string, ThemesPayload>();
  suggested: Eq[] = [];
  filter: string | null = null;
  readonly busyEqIds = new Set<string>();

  private queue: Promise<unknown> = Promise.resolve();
  private pending: Promise<void> = Promise.resolve();

  constructor(
    private readonly client: ApiClient,
    private readonly root: AppRoot,
    private readonly pollDelays: number[] = DEFAULT_POLL_DELAYS,
  ) {
    wireDropTarget(root.orientation, { kind: "orientation" }, this.dropActions);
    wireDropTarget(root.collections, { kind: "collection-view" }, this.dropActions);
  }

  // -- session lifecycle ---------------------------------------------------

  async createSession(topic: string): Promise<void> {
    const { session_id } = await this.client.createSession(topic);
    this.sessionId = session_id;
    this.themes.clear();
    this.suggested = [];
    this.filter = null;
    await this.refresh();
  }

  async generateQuestions(): Promise<void> {
    const sid = this.requireSession();
    await this.enqueue(() => this.client.generateFromTopic(sid));
    await this.refresh();
  }

  // -- orientation actions ---------------------------------------------------

  async toggleSelected(eqId: string, selected: boolean): Promise<void> {
    const sid = this.requireSession();
    const eq = this.snapshot?.eqs.find((q) => q.id === eqId);
    if (!eq) return;
    const ok = await optimistic({
      apply: () => {
        const before = eq.selected;
        eq.selected = selected;
        this.render();
        return before;
      },
      remote: async () => {
        await this.enqueue(() => this.client.patchQuestion(sid, eqId, { selected }));
      },
      revert: (before) => {
        eq.selected = before;
        this.render();
      },
      onError: (error) => this.setStatus(`selection failed: ${error.message}`),
    });
    if (ok) await this.refresh();
  }

  async editQuestion(eqId: string, text: string): Promise<void> {
    const sid = this.requireSession();
    await this.enqueue(() => this.client.patchQuestion(sid, eqId, { text }));
    await this.refresh();
  }

  async explore(eqId: string): Promise<void> {
    const sid = this.requireSession();
    this.busyEqIds.add(eqId);
    this.setStatus(`exploring ${eqId}...`);
    this.render();
    try {
      const job = await this.enqueue(() => this.client.startExplore(sid, eqId));
      await pollJob(this.client, sid, job.job_id, this.pollDelays);
      this.themes.set(eqId, await this.client.getThemes(sid, eqId));
      this.setStatus(`explored ${eqId}`);
    } catch (error) {
      this.setStatus(
        `exploration failed: ${error instanceof Error ? error.message : String(error)}`,
      );
      throw error;
    } finally {
      this.busyEqIds.delete(eqId);
      await this.refresh();
    }
  }

  async acceptSuggested(eqId: string): Promise<void> {
    const sid = this.requireSession();
    await this.enqueue(() => this.client.patchQuestion(sid, eqId, { selected: true }));
    this.suggested = this.suggested.filter((eq) => eq.id !== eqId);
    await this.refresh();
  }

  // -- drag and drop ---------------------------------------------------------

  readonly dropActions: DropActions = {
    dropTheme: (themeId) => this.tracked(this.dropTheme(themeId)),
    dropPaper: (paperId, collectionId) => this.tracked(this.dropPaper(paperId, collectionId)),
    suggestFromPaper: (paperId) => this.tracked(this.suggestFromPaper(paperId)),
  };

  async dropTheme(themeId: string): Promise<void> {
    const sid = this.requireSession();
    await this.enqueue(() =>
      this.client.applyEdits(sid, [{ op: "drop_theme", theme_id: themeId }]),
    );
    await this.refresh();
  }

  async dropPaper(paperId: string, collectionId?: string): Promise<void> {
    const sid = this.requireSession();
    await this.enqueue(() =>
      this.client.applyEdits(sid, [
        collectionId === undefined
          ? { op: "drop_paper", paper_id: paperId }
          : { op: "drop_paper", paper_id: paperId, collection_id: collectionId },
      ]),
    );
    await this.refresh();
  }

  async suggestFromPaper(paperId: string): Promise<void> {
    const sid = this.requireSession();
    const { eqs } = await this.enqueue(() => this.client.generateFromPaper(sid, paperId));
    this.suggested = eqs;
    await this.refresh();
  }

  // -- export ------------------------------------------------------------------

  exportOutline(format: "json" | "markdown"): Promise<string> {
    return this.client.exportOutline(this.requireSession(), format);
  }

  // -- state plumbing ------------------------------------------------------------

  /** Resolves once every in-flight fire-and-forget action has settled. */
  async settled(): Promise<void> {
    let current: Promise<void>;
    do {
      current = this.pending;
      await current;
    } while (current !== this.pending);
  }

  private tracked(task: Promise<void>): Promise<void> {
    this.pending = Promise.allSettled([this.pending, task]).then(() => undefined);
    return task;
  }

  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const result = this.queue.then(task, task);
    this.queue = result.then(
      () => undefined,
      () => undefined,
    );
    return result;
  }

  private requireSession(): string {
    if (!this.sessionId) throw new Error("no active session");
    return this.sessionId;
  }

  async refresh(): Promise<void> {
    const sid = this.requireSession();
    this.snapshot = await this.client.getSession(sid);
    // Rehydrate theme payloads for explorations fetched by earlier runs.
    for (const eqId of Object.keys(this.snapshot.explorations)) {
      if (!this.themes.has(eqId)) {
        this.themes.set(eqId, await this.client.getThemes(sid, eqId));
      }
    }
    this.render();
  }

  setStatus(text: string): void {
    this.root.status.textContent = text;
  }

  render(): void {
    if (!this.snapshot) return;
    const snapshot = this.snapshot;
    const handlers = this.orientationHandlers();
    this.boundary(this.root.orientation, () =>
      renderOrientation(
        this.root.orientation,
        {
          eqs: snapshot.eqs,
          filter: this.filter,
          suggested: this.suggested,
          exploredEqIds: new Set(Object.keys(snapshot.explorations)),
          busyEqIds: this.busyEqIds,
        },
        handlers,
        this.dropActions,
      ),
    );
    this.boundary(this.root.exploration, () =>
      renderExploration(
        this.root.exploration,
        this.themes,
        new Map(snapshot.eqs.map((eq) => [eq.id, eq.text])),
        {
          onLinks: (paperId, direction) => this.fetchLinks(paperId, direction),
        },
      ),
    );
    this.boundary(this.root.collections, () =>
      renderCollections(
        this.root.collections,
        snapshot.collections,
        snapshot.papers,
        this.dropActions,
      ),
    );
  }

  private fetchLinks(
    paperId: string,
    direction: "citations" | "references",
  ): Promise<LinksPayload> {
    return this.client.getLinks(paperId, direction, this.requireSession());
  }

  private orientationHandlers(): OrientationHandlers {
    return {
      onToggleSelected: (eqId, selected) => {
        void this.tracked(this.toggleSelected(eqId, selected));
      },
      onEditText: (eqId, text) => {
        void this.tracked(this.editQuestion(eqId, text));
      },
      onExplore: (eqId) => {
        void this.tracked(this.explore(eqId).catch(() => undefined));
      },
      onFilter: (discipline) => {
        this.filter = discipline;
        this.render();
      },
      onAcceptSuggested: (eqId) => {
        void this.tracked(this.acceptSuggested(eqId));
      },
    };
  }

  private boundary(container: HTMLElement, renderFn: () => void): void {
    try {
      renderFn();
    } catch (error) {
      clear(container);
      container.appendChild(
        el(
          "div",
          "error-boundary",
          `render failed: ${error instanceof Error ? error.message : String(error)}`,
        ),
      );
    }
  }
}

// -- page bootstrap ------------------------------------------------------------

export function boot(doc: Document): App | null {
  const orientation = doc.getElementById("orientation-view");
  const exploration = doc.getElementById("exploration-view");
  const collections = doc.getElementById("collection-view");
  const status = doc.getElementById("status-bar");
  if (!orientation || !exploration || !collections || !status) return null;

  const app = new App(new ApiClient(), { orientation, exploration, collections, status });

  const form = doc.getElementById("topic-form") as HTMLFormElement | null;
  const input = doc.getElementById("topic-input") as HTMLInputElement | null;
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const topic = input?.value.trim();
    if (!topic) return;
    app.setStatus("drafting questions...");
    void app
      .createSession(topic)
      .then(() => app.generateQuestions())
      .then(() => app.setStatus("questions ready"))
      .catch((error: Error) => app.setStatus(`error: ${error.message}`));
  });

  const output = doc.getElementById("export-output") as HTMLPreElement | null;
  for (const format of ["json", "markdown"] as const) {
    doc.getElementById(`export-${format}`)?.addEventListener("click", () => {
      void app
        .exportOutline(format)
        .then((text) => {
          if (output) output.textContent = text;
          app.setStatus(`${format} export ready`);
        })
        .catch((error: Error) => app.setStatus(`export failed: ${error.message}`));
    });
  }
  return app;
}

if (typeof document !== "undefined") {
  boot(document);
}
