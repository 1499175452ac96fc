/**
 * Typed client for the /api/v1 session service.
 *
 * Every UI action maps to exactly one of these calls; the client never
 * reorders or rescores anything the server sends back.
 */

export interface TopicInfo {
  text: string;
  concepts: string[];
}

export interface Eq {
  id: string;
  text: string;
  discipline: string;
  subfield: string | null;
  origin: string;
  selected: boolean;
  flags: string[];
}

export interface Annotation {
  paper_id: string;
  key_sentence_index: number;
  key_sentence: string;
  covered_concepts: string[];
  spans: [number, number][];
  relevant_phrases: string[];
}

export interface PaperInfo {
  paper_id: string;
  title: string;
  abstract: string;
  disciplines: string[];
  year: number | null;
  venue: string | null;
  authors: string[];
  citation_count: number;
}

export interface ThemePaper extends PaperInfo {
  annotation: Annotation | null;
}

export interface Theme {
  theme_id: string;
  title: string;
  papers: ThemePaper[];
}

export interface ThemesPayload {
  eq_id: string;
  queries: string[];
  themes: Theme[];
  possibly_relevant: ThemePaper[];
}

export interface LinkPaper extends PaperInfo {
  similarity: number;
}

export interface LinkGroup {
  discipline: string;
  value_score: number;
  exploration: number;
  combined: number;
  papers: LinkPaper[];
}

export interface LinksPayload {
  paper_id: string;
  direction: "citations" | "references";
  groups: LinkGroup[];
}

export interface Collection {
  collection_id: string;
  name: string;
  paper_ids: string[];
  source_theme_id: string | null;
}

export interface SessionSnapshot {
  session_id: string;
  created_at: string;
  updated_at: string;
  topic: TopicInfo;
  eqs: Eq[];
  papers: Record<string, PaperInfo>;
  explorations: Record<string, { eq_id: string }>;
  collections: Collection[];
}

export interface Job {
  job_id: string;
  eq_id: string;
  status: "expanding" | "searching" | "theming" | "done" | "failed" | string;
  error?: string | null;
}

export interface EditSummary {
  applied: number;
  collections: { collection_id: string; name: string; size: number }[];
}

export type EditOp =
  | { op: "drop_theme"; theme_id: string }
  | { op: "drop_paper"; paper_id: string; collection_id?: string }
  | { op: "move_paper"; paper_id: string; from_collection: string; to_collection: string }
  | { op: "remove_paper"; paper_id: string; collection_id: string }
  | { op: "rename_collection"; collection_id: string; name: string }
  | { op: "delete_collection"; collection_id: string };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string = "/api/v1",
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const data = (await response.json()) as { detail?: unknown };
        if (typeof data.detail === "string") detail = data.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createSession(topic: string): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions", { topic });
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  generateFromTopic(sessionId: string, maxFields?: number): Promise<{ eqs: Eq[] }> {
    const body: Record<string, unknown> = { mode: "topic" };
    if (maxFields !== undefined) body.max_fields = maxFields;
    return this.request("POST", `/sessions/${sessionId}/eqs/generate`, body);
  }

  generateFromPaper(sessionId: string, paperId: string): Promise<{ eqs: Eq[] }> {
    return this.request("POST", `/sessions/${sessionId}/eqs/generate`, {
      mode: "paper",
      paper_id: paperId,
    });
  }

  addQuestion(sessionId: string, text: string, discipline: string): Promise<Eq> {
    return this.request("POST", `/sessions/${sessionId}/eqs`, { text, discipline });
  }

  patchQuestion(
    sessionId: string,
    eqId: string,
    patch: { text?: string; selected?: boolean },
  ): Promise<Eq> {
    return this.request("PATCH", `/sessions/${sessionId}/eqs/${eqId}`, patch);
  }

  startExplore(sessionId: string, eqId: string): Promise<Job> {
    return this.request("POST", `/sessions/${sessionId}/eqs/${eqId}/explore`);
  }

  getJob(sessionId: string, jobId: string): Promise<Job> {
    return this.request("GET", `/sessions/${sessionId}/jobs/${jobId}`);
  }

  getThemes(sessionId: string, eqId: string): Promise<ThemesPayload> {
    return this.request("GET", `/sessions/${sessionId}/themes/${eqId}`);
  }

  getLinks(
    paperId: string,
    direction: "citations" | "references",
    sessionId: string,
  ): Promise<LinksPayload> {
    return this.request(
      "GET",
      `/papers/${paperId}/links?direction=${direction}&session=${sessionId}`,
    );
  }

  applyEdits(sessionId: string, edits: EditOp[]): Promise<EditSummary> {
    return this.request("POST", `/sessions/${sessionId}/collections/edits`, { edits });
  }

  async exportOutline(sessionId: string, format: "json" | "markdown"): Promise<string> {
    const response = await this.fetchFn(
      `${this.base}/sessions/${sessionId}/export?format=${format}`,
      { method: "GET" },
    );
    if (!response.ok) {
      throw new ApiError(response.status, response.statusText);
    }
    return response.text();
  }
}
