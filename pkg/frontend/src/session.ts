// One operator working one volume. The session never decides what mode it is
// in: mode is always the server-reported volume state, and every mutation
// carries the latest version the server told us. A 409 freezes mutations
// until the operator refreshes.

import { ApiClient, ApiError } from "./api.js";
import type {
  ArticleInfo,
  AuthorInput,
  FinalizeResult,
  ScanInfo,
  VolumeInfo,
  VolumeStateName,
} from "./types.js";

export class StaleSessionError extends Error {
  constructor() {
    super("a version conflict occurred; refresh before the next change");
    this.name = "StaleSessionError";
  }
}

export class Session {
  volume: VolumeInfo | null = null;
  scans: ScanInfo[] = [];
  articles: ArticleInfo[] = [];
  scanIndex = 0;
  needsRefresh = false;
  onChange: () => void = () => {};

  constructor(
    readonly api: ApiClient,
    readonly operator: string,
  ) {}

  get mode(): VolumeStateName {
    if (!this.volume) throw new Error("no volume open");
    return this.volume.state;
  }

  get version(): number {
    if (!this.volume) throw new Error("no volume open");
    return this.volume.version;
  }

  get currentScan(): ScanInfo | null {
    return this.scans[this.scanIndex] ?? null;
  }

  async open(volumeId: string): Promise<void> {
    this.volume = await this.api.getVolume(volumeId);
    await this.reload();
    this.scanIndex = 0;
    this.onChange();
  }

  /** Refetch volume, scans, and articles; clears any conflict freeze. */
  async refresh(): Promise<void> {
    if (!this.volume) throw new Error("no volume open");
    this.volume = await this.api.getVolume(this.volume.volume_id);
    await this.reload();
    this.needsRefresh = false;
    this.onChange();
  }

  private async reload(): Promise<void> {
    if (!this.volume) return;
    const listing = await this.api.listScans(this.volume.volume_id);
    this.scans = listing.scans;
    if (this.scanIndex >= this.scans.length) {
      this.scanIndex = Math.max(0, this.scans.length - 1);
    }
    if (this.volume.state !== "page_numbering") {
      this.articles = (await this.api.listArticles(this.volume.volume_id)).articles;
    }
  }

  private async mutate<T>(call: () => Promise<T>): Promise<T> {
    if (!this.volume) throw new Error("no volume open");
    if (this.needsRefresh) throw new StaleSessionError();
    try {
      return await call();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.needsRefresh = true;
        this.onChange();
      }
      throw err;
    }
  }

  private applyPageResult(result: { version: number; state: VolumeStateName; scan: ScanInfo }): void {
    if (!this.volume) return;
    this.volume.version = result.version;
    this.volume.state = result.state;
    const at = this.scans.findIndex((s) => s.scan_id === result.scan.scan_id);
    if (at >= 0) this.scans[at] = result.scan;
  }

  // After any label change, neighbouring suggestions and the pagination
  // report served earlier are stale, so refetch both; completeness stays a
  // server verdict rather than a local recount.
  private async reloadScans(): Promise<void> {
    if (!this.volume) return;
    this.volume = await this.api.getVolume(this.volume.volume_id);
    const listing = await this.api.listScans(this.volume.volume_id);
    this.scans = listing.scans;
  }

  async assignLabel(label: string): Promise<void> {
    const scan = this.currentScan;
    if (!scan) throw new Error("no scan selected");
    await this.mutate(async () => {
      const result = await this.api.pageAction(
        this.volume!.volume_id,
        { action: "assign", scan_id: scan.scan_id, label },
        this.version,
        this.operator,
      );
      this.applyPageResult(result);
      await this.reloadScans();
    });
    this.onChange();
  }

  async setOverride(label: string, note: string): Promise<void> {
    const scan = this.currentScan;
    if (!scan) throw new Error("no scan selected");
    await this.mutate(async () => {
      const result = await this.api.pageAction(
        this.volume!.volume_id,
        { action: "override", scan_id: scan.scan_id, label, note },
        this.version,
        this.operator,
      );
      this.applyPageResult(result);
      await this.reloadScans();
    });
    this.onChange();
  }

  async toggleDuplicate(): Promise<void> {
    const scan = this.currentScan;
    if (!scan) throw new Error("no scan selected");
    const action = scan.status === "active" ? "mark_duplicate" : "unmark_duplicate";
    await this.mutate(async () => {
      const result = await this.api.pageAction(
        this.volume!.volume_id,
        { action, scan_id: scan.scan_id },
        this.version,
        this.operator,
      );
      this.applyPageResult(result);
      await this.reloadScans();
    });
    this.onChange();
  }

  async transitionTo(target: "page_numbering" | "article_entry"): Promise<void> {
    await this.mutate(async () => {
      this.volume = await this.api.transition(
        this.volume!.volume_id,
        target,
        this.version,
        this.operator,
      );
      await this.reload();
    });
    this.scanIndex = 0;
    this.onChange();
  }

  async submitArticle(fields: {
    title: string;
    authors: AuthorInput[];
    first_page: string;
    last_page: string;
    abstract: string | null;
  }): Promise<ArticleInfo> {
    const result = await this.mutate(() =>
      this.api.createArticle(this.volume!.volume_id, fields, this.version, this.operator),
    );
    this.volume!.version = result.version;
    this.articles.push(result.article);
    this.onChange();
    return result.article;
  }

  async finalizeVolume(): Promise<FinalizeResult> {
    const result = await this.mutate(() =>
      this.api.finalize(this.volume!.volume_id, this.version, this.operator),
    );
    this.volume!.version = result.version;
    this.volume!.state = result.state;
    this.onChange();
    return result;
  }

  moveScan(delta: number): void {
    const next = this.scanIndex + delta;
    if (next >= 0 && next < this.scans.length) {
      this.scanIndex = next;
      this.onChange();
    }
  }

  /** Effective label text -> film position, for client-side form checks. */
  labelPositions(): Map<string, number> {
    const positions = new Map<string, number>();
    for (const scan of this.scans) {
      if (scan.status === "active" && scan.effective_label) {
        positions.set(scan.effective_label.text, scan.sequence_index);
      }
    }
    return positions;
  }
}
