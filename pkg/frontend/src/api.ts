// Client for the capture service. Every request and response passes through
// one tap (the trace), which is how tests prove that any identifier shown on
// screen came from the server rather than being composed client-side.

import type {
  ArticleListing,
  AuthorInput,
  CreateArticleResult,
  FinalizeResult,
  PageAction,
  PageActionResult,
  ScanListing,
  VolumeInfo,
} from "./types.js";

export interface TraceEntry {
  method: string;
  path: string;
  status: number;
  body: unknown;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
    readonly details: Record<string, unknown>,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

const BIBCODE_SHAPE = /\b\d{4}[A-Za-z&+.-]{5}[A-Za-z0-9.]{4}[A-Z.][A-Za-z0-9.:]{4}[A-Z.]\b/g;

function harvestBibcodes(value: unknown, into: Set<string>): void {
  if (typeof value === "string") {
    for (const hit of value.match(BIBCODE_SHAPE) ?? []) into.add(hit);
  } else if (Array.isArray(value)) {
    for (const item of value) harvestBibcodes(item, into);
  } else if (value && typeof value === "object") {
    for (const item of Object.values(value)) harvestBibcodes(item, into);
  }
}

export class ApiClient {
  readonly trace: TraceEntry[] = [];

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const isText = (response.headers.get("content-type") ?? "").startsWith("text/plain");
    const payload: unknown = isText ? await response.text() : await response.json();
    this.trace.push({ method, path, status: response.status, body: payload });
    if (!response.ok) {
      const envelope = (payload as { error?: Record<string, unknown> }).error ?? {};
      const { code, message, ...details } = envelope;
      throw new ApiError(
        typeof code === "string" ? code : "Unknown",
        typeof message === "string" ? message : response.statusText,
        response.status,
        details,
      );
    }
    return payload as T;
  }

  /** Every identifier the server has sent this session, in any payload. */
  bibcodesSeen(): Set<string> {
    const seen = new Set<string>();
    for (const entry of this.trace) harvestBibcodes(entry.body, seen);
    return seen;
  }

  requestCount(method: string, pathSuffix: string): number {
    return this.trace.filter(
      (e) => e.method === method && e.path.endsWith(pathSuffix),
    ).length;
  }

  listVolumes(): Promise<{ volumes: VolumeInfo[] }> {
    return this.request("GET", "/volumes");
  }

  getVolume(volumeId: string): Promise<VolumeInfo> {
    return this.request("GET", `/volumes/${volumeId}`);
  }

  listScans(volumeId: string): Promise<ScanListing> {
    return this.request("GET", `/volumes/${volumeId}/scans`);
  }

  imageUrl(imagePath: string): string {
    return this.baseUrl + imagePath;
  }

  pageAction(
    volumeId: string,
    action: PageAction,
    expectedVersion: number,
    operator: string,
  ): Promise<PageActionResult> {
    return this.request("POST", `/volumes/${volumeId}/pages`, {
      ...action,
      expected_version: expectedVersion,
      operator,
    });
  }

  transition(
    volumeId: string,
    target: "page_numbering" | "article_entry",
    expectedVersion: number,
    operator: string,
  ): Promise<VolumeInfo> {
    return this.request("POST", `/volumes/${volumeId}/transition`, {
      target,
      expected_version: expectedVersion,
      operator,
    });
  }

  listArticles(volumeId: string): Promise<ArticleListing> {
    return this.request("GET", `/volumes/${volumeId}/articles`);
  }

  createArticle(
    volumeId: string,
    fields: {
      title: string;
      authors: AuthorInput[];
      first_page: string;
      last_page: string;
      abstract: string | null;
    },
    expectedVersion: number,
    operator: string,
  ): Promise<CreateArticleResult> {
    return this.request("POST", `/volumes/${volumeId}/articles`, {
      ...fields,
      expected_version: expectedVersion,
      operator,
    });
  }

  finalize(volumeId: string, expectedVersion: number, operator: string): Promise<FinalizeResult> {
    return this.request("POST", `/volumes/${volumeId}/finalize`, {
      expected_version: expectedVersion,
      operator,
    });
  }

  exportText(volumeId: string): Promise<string> {
    return this.request("GET", `/volumes/${volumeId}/export`);
  }
}
