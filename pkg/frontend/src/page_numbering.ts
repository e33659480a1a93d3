// First capture pass: one scan at a time, assign the printed page label,
// mark duplicate frames, record overrides with a note. The label box is
// pre-filled with the server's suggestion so the common case is Enter,
// Enter, Enter down the reel.

import { ApiError } from "./api.js";
import { Session, StaleSessionError } from "./session.js";

export class PageNumberingScreen {
  private zoom = 1.0;
  private overrideOpen = false;

  constructor(private readonly session: Session) {}

  render(root: HTMLElement): void {
    const session = this.session;
    const volume = session.volume!;
    const scan = session.currentScan;
    root.innerHTML = "";

    const heading = document.createElement("h2");
    heading.textContent = `${volume.full_title} (vol. ${volume.volume_number}): page numbering`;
    root.appendChild(heading);

    const progress = document.createElement("p");
    progress.id = "progress";
    const report = volume.pagination;
    progress.textContent =
      `scan ${session.scanIndex + 1} of ${session.scans.length}` +
      (report.complete ? "; all scans labeled, press t to continue" : "");
    root.appendChild(progress);

    if (!scan) {
      const empty = document.createElement("p");
      empty.textContent = "no scans in this volume";
      root.appendChild(empty);
      return;
    }

    const viewer = document.createElement("div");
    viewer.className = "viewer";
    const img = document.createElement("img");
    img.id = "scan-image";
    img.src = session.api.imageUrl(scan.image_url);
    img.alt = scan.scan_id;
    img.style.transform = `scale(${this.zoom})`;
    viewer.appendChild(img);
    root.appendChild(viewer);

    const caption = document.createElement("p");
    caption.id = "scan-caption";
    const labelText = scan.effective_label ? `label ${scan.effective_label.text}` : "unlabeled";
    const dup = scan.status === "marked_duplicate" ? " [marked duplicate]" : "";
    caption.textContent = `${scan.scan_id}: ${labelText}${dup}`;
    root.appendChild(caption);

    const form = document.createElement("div");
    form.className = "label-form";
    const input = document.createElement("input");
    input.id = "label-input";
    input.autocomplete = "off";
    input.value = scan.effective_label?.text ?? scan.suggested_label?.text ?? "";
    form.appendChild(input);
    root.appendChild(form);

    if (this.overrideOpen) {
      const panel = document.createElement("div");
      panel.id = "override-panel";
      const overrideLabel = document.createElement("input");
      overrideLabel.id = "override-label";
      overrideLabel.placeholder = "corrected label";
      overrideLabel.value = scan.override?.label.text ?? "";
      const overrideNote = document.createElement("input");
      overrideNote.id = "override-note";
      overrideNote.placeholder = "note (required)";
      overrideNote.value = scan.override?.note ?? "";
      panel.append(overrideLabel, overrideNote);
      root.appendChild(panel);
    }

    const status = document.createElement("p");
    status.id = "status";
    status.setAttribute("role", "alert");
    if (session.needsRefresh) {
      status.textContent = "another change landed first; press r to refresh";
    }
    root.appendChild(status);

    const hints = document.createElement("p");
    hints.className = "hints";
    hints.textContent =
      "Enter label · Esc leave box · j/k move · d duplicate · o override · t done · r refresh · +/- zoom";
    root.appendChild(hints);

    if (this.overrideOpen) {
      (root.querySelector("#override-label") as HTMLInputElement).focus();
    } else {
      input.focus();
      input.select();
    }
  }

  private status(root: HTMLElement, message: string): void {
    const el = root.querySelector("#status");
    if (el) el.textContent = message;
  }

  private async submitLabel(root: HTMLElement): Promise<void> {
    const input = root.querySelector("#label-input") as HTMLInputElement;
    const label = input.value.trim();
    if (!label) {
      this.status(root, "enter the printed page label");
      return;
    }
    try {
      await this.session.assignLabel(label);
      this.session.moveScan(1);
    } catch (err) {
      this.describeFailure(root, err);
    }
  }

  private async submitOverride(root: HTMLElement): Promise<void> {
    const label = (root.querySelector("#override-label") as HTMLInputElement).value.trim();
    const note = (root.querySelector("#override-note") as HTMLInputElement).value.trim();
    if (!note) {
      this.status(root, "an override needs a note explaining the correction");
      return;
    }
    try {
      await this.session.setOverride(label, note);
      this.overrideOpen = false;
      this.session.onChange();
    } catch (err) {
      this.describeFailure(root, err);
    }
  }

  private describeFailure(root: HTMLElement, err: unknown): void {
    if (err instanceof ApiError) {
      if (err.code === "DuplicateLabel") {
        this.status(root, `that label is already on scan ${err.details.conflicting_scan}`);
      } else if (err.status === 409) {
        this.status(root, "another change landed first; press r to refresh");
      } else {
        this.status(root, `${err.code}: ${err.message}`);
      }
    } else if (err instanceof StaleSessionError) {
      this.status(root, err.message);
    } else {
      throw err;
    }
  }

  /** Returns true when the key was handled. */
  handleKey(ev: KeyboardEvent, root: HTMLElement): boolean {
    const target = ev.target as HTMLElement | null;
    const typing = target instanceof HTMLInputElement || target instanceof HTMLTextAreaElement;

    if (typing) {
      if (ev.key === "Enter") {
        if (this.overrideOpen && target.id.startsWith("override")) {
          void this.submitOverride(root);
        } else {
          void this.submitLabel(root);
        }
        return true;
      }
      if (ev.key === "Escape") {
        if (this.overrideOpen) {
          this.overrideOpen = false;
          this.session.onChange();
        } else {
          (target as HTMLInputElement).blur();
        }
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
      case "Enter":
      case "i":
        (root.querySelector("#label-input") as HTMLInputElement | null)?.focus();
        return true;
      case "d":
        void this.session
          .toggleDuplicate()
          .then(() => {
            // marking removes the scan from the numbering pass; move along
            if (this.session.currentScan?.status === "marked_duplicate") {
              this.session.moveScan(1);
            }
          })
          .catch((err) => this.describeFailure(root, err));
        return true;
      case "o":
        this.overrideOpen = !this.overrideOpen;
        this.session.onChange();
        return true;
      case "t":
        void this.session
          .transitionTo("article_entry")
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
