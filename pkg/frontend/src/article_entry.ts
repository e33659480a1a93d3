// Second capture pass: the numbered scans sit beside a metadata form.
// First/last page fields are checked against the volume's own label set
// before anything is sent; the identifier shown after submit is exactly
// what the server returned, never composed here.

import { ApiError } from "./api.js";
import { Session, StaleSessionError } from "./session.js";
import type { ArticleInfo, AuthorInput } from "./types.js";

export function bibcodeElement(code: string): HTMLElement {
  const el = document.createElement("span");
  el.className = "bibcode";
  el.dataset.bibcode = code;
  el.textContent = code;
  return el;
}

function parseAuthors(block: string): AuthorInput[] {
  const authors: AuthorInput[] = [];
  for (const raw of block.split("\n")) {
    const line = raw.trim();
    if (!line) continue;
    const comma = line.indexOf(",");
    if (comma < 0) {
      authors.push({ last_name: line, rest: "" });
    } else {
      authors.push({
        last_name: line.slice(0, comma).trim(),
        rest: line.slice(comma + 1).trim(),
      });
    }
  }
  return authors;
}

const FIELDS = [
  { id: "title", label: "Title", kind: "input" },
  { id: "authors", label: "Authors (one per line, Last, Rest)", kind: "textarea" },
  { id: "first-page", label: "First page", kind: "input" },
  { id: "last-page", label: "Last page", kind: "input" },
  { id: "abstract", label: "Abstract", kind: "textarea" },
] as const;

export class ArticleEntryScreen {
  private zoom = 1.0;

  constructor(private readonly session: Session) {}

  render(root: HTMLElement): void {
    const session = this.session;
    const volume = session.volume!;
    const scan = session.currentScan;
    root.innerHTML = "";

    const heading = document.createElement("h2");
    heading.textContent = `${volume.full_title} (vol. ${volume.volume_number}): article entry`;
    root.appendChild(heading);

    const viewer = document.createElement("div");
    viewer.className = "viewer";
    if (scan) {
      const img = document.createElement("img");
      img.id = "scan-image";
      img.src = session.api.imageUrl(scan.image_url);
      img.alt = scan.scan_id;
      img.style.transform = `scale(${this.zoom})`;
      viewer.appendChild(img);
      const badge = document.createElement("p");
      badge.id = "scan-caption";
      badge.textContent = scan.effective_label
        ? `page ${scan.effective_label.text}`
        : scan.scan_id;
      viewer.appendChild(badge);
    }
    root.appendChild(viewer);

    const form = document.createElement("form");
    form.id = "article-form";
    for (const field of FIELDS) {
      const row = document.createElement("div");
      row.className = "field";
      const label = document.createElement("label");
      label.htmlFor = field.id;
      label.textContent = field.label;
      const widget = document.createElement(field.kind);
      widget.id = field.id;
      const problem = document.createElement("span");
      problem.className = "field-error";
      problem.id = `${field.id}-error`;
      row.append(label, widget, problem);
      form.appendChild(row);
    }
    root.appendChild(form);

    const status = document.createElement("p");
    status.id = "status";
    status.setAttribute("role", "alert");
    if (session.needsRefresh) {
      status.textContent = "another change landed first; press r to refresh";
    }
    root.appendChild(status);

    const list = document.createElement("ol");
    list.id = "article-list";
    for (const article of session.articles) {
      list.appendChild(this.articleRow(article));
    }
    root.appendChild(list);

    const hints = document.createElement("p");
    hints.className = "hints";
    hints.textContent =
      "Ctrl+Enter submit article · Esc leave box · j/k move scans · f finalize · r refresh · +/- zoom";
    root.appendChild(hints);

    (root.querySelector("#title") as HTMLInputElement).focus();
  }

  private articleRow(article: ArticleInfo): HTMLElement {
    const item = document.createElement("li");
    const who = article.authors.map((a) => a.display).join("; ") || "author unknown";
    item.append(`${article.title} (${who}), pp. ${article.first_page}-${article.last_page}: `);
    if (article.bibcode) item.appendChild(bibcodeElement(article.bibcode));
    return item;
  }

  private setFieldError(root: HTMLElement, fieldId: string, message: string): void {
    const el = root.querySelector(`#${fieldId}-error`);
    if (el) el.textContent = message;
  }

  private clearFieldErrors(root: HTMLElement): void {
    for (const el of root.querySelectorAll(".field-error")) el.textContent = "";
    const status = root.querySelector("#status");
    if (status) status.textContent = "";
  }

  private value(root: HTMLElement, id: string): string {
    return (root.querySelector(`#${id}`) as HTMLInputElement | HTMLTextAreaElement).value;
  }

  /** Local checks against the scans we already hold; no request on failure. */
  private validate(root: HTMLElement, first: string, last: string, title: string): boolean {
    const positions = this.session.labelPositions();
    let ok = true;
    if (!title.trim()) {
      this.setFieldError(root, "title", "title is required");
      ok = false;
    }
    for (const [id, text] of [["first-page", first], ["last-page", last]] as const) {
      if (!text) {
        this.setFieldError(root, id, "required");
        ok = false;
      } else if (!positions.has(text)) {
        this.setFieldError(root, id, `no page in this volume is labeled "${text}"`);
        ok = false;
      }
    }
    if (ok && positions.get(last)! < positions.get(first)!) {
      this.setFieldError(root, "last-page", "last page comes before the first page");
      ok = false;
    }
    return ok;
  }

  private async submit(root: HTMLElement): Promise<void> {
    this.clearFieldErrors(root);
    const title = this.value(root, "title");
    const first = this.value(root, "first-page").trim();
    const last = this.value(root, "last-page").trim();
    if (!this.validate(root, first, last, title)) return;
    const abstract = this.value(root, "abstract").trim();
    try {
      await this.session.submitArticle({
        title: title.trim(),
        authors: parseAuthors(this.value(root, "authors")),
        first_page: first,
        last_page: last,
        abstract: abstract || null,
      });
    } catch (err) {
      this.describeFailure(root, err);
    }
  }

  private describeFailure(root: HTMLElement, err: unknown): void {
    const status = root.querySelector("#status");
    if (err instanceof ApiError) {
      if (err.code === "UnknownPageLabel") {
        const bad = String(err.details.label ?? "");
        const field = bad && bad === this.value(root, "last-page").trim() ? "last-page" : "first-page";
        this.setFieldError(root, field, err.message);
      } else if (err.code === "PageOrderViolation") {
        this.setFieldError(root, "last-page", err.message);
      } else if (err.status === 409) {
        if (status) status.textContent = "another change landed first; press r to refresh";
      } else if (status) {
        status.textContent = `${err.code}: ${err.message}`;
      }
    } else if (err instanceof StaleSessionError) {
      if (status) status.textContent = err.message;
    } else {
      throw err;
    }
  }

  handleKey(ev: KeyboardEvent, root: HTMLElement): boolean {
    const target = ev.target as HTMLElement | null;
    const typing = target instanceof HTMLInputElement || target instanceof HTMLTextAreaElement;

    if (typing) {
      if (ev.key === "Enter" && ev.ctrlKey) {
        void this.submit(root);
        return true;
      }
      if (ev.key === "Escape") {
        (target as HTMLInputElement).blur();
        return true;
      }
      return false;
    }

    switch (ev.key) {
      case "j":
      case "ArrowDown":
        this.session.moveScan(1);
        return true;
      case "k":
      case "ArrowUp":
        this.session.moveScan(-1);
        return true;
      case "i":
      case "Enter":
        (root.querySelector("#title") as HTMLInputElement | null)?.focus();
        return true;
      case "f":
        void this.session
          .finalizeVolume()
          .catch((err) => this.describeFailure(root, err));
        return true;
      case "r":
        void this.session.refresh();
        return true;
      case "+":
        this.zoom = Math.min(4, this.zoom + 0.25);
        this.session.onChange();
        return true;
      case "-":
        this.zoom = Math.max(0.25, this.zoom - 0.25);
        this.session.onChange();
        return true;
      default:
        return false;
    }
  }
}
