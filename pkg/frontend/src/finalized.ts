// Read-only view of a sealed volume: the export block and its identifiers.
// Shown because a session may open a volume that is already finalized; the
// text comes from the export endpoint verbatim.

import { Session } from "./session.js";
import { bibcodeElement } from "./article_entry.js";

export class FinalizedScreen {
  private exportText: string | null = null;

  constructor(private readonly session: Session) {}

  render(root: HTMLElement): void {
    const volume = this.session.volume!;
    root.innerHTML = "";

    const heading = document.createElement("h2");
    heading.textContent = `${volume.full_title} (vol. ${volume.volume_number}): finalized`;
    root.appendChild(heading);

    const list = document.createElement("ul");
    list.id = "code-list";
    for (const article of this.session.articles) {
      if (!article.bibcode) continue;
      const item = document.createElement("li");
      item.appendChild(bibcodeElement(article.bibcode));
      item.append(` ${article.title}`);
      list.appendChild(item);
    }
    root.appendChild(list);

    const pre = document.createElement("pre");
    pre.id = "export-block";
    pre.textContent = this.exportText ?? "loading export…";
    root.appendChild(pre);

    if (this.exportText === null) {
      void this.session.api.exportText(volume.volume_id).then((text) => {
        this.exportText = text;
        this.session.onChange();
      });
    }
  }

  handleKey(): boolean {
    return false;
  }
}
