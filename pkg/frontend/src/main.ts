// Bootstrap: volume picker, then whichever screen matches the volume's
// server-reported state. Everything is reachable from the keyboard.

import { ApiClient } from "./api.js";
import { Session } from "./session.js";
import { PageNumberingScreen } from "./page_numbering.js";
import { ArticleEntryScreen } from "./article_entry.js";
import { FinalizedScreen } from "./finalized.js";
import { attachKeyboard, KeyTarget } from "./keyboard.js";
import type { VolumeInfo } from "./types.js";

class VolumePicker implements KeyTarget {
  private volumes: VolumeInfo[] = [];
  private cursor = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly onPick: (volumeId: string) => void,
    private readonly repaint: () => void,
  ) {}

  async load(): Promise<void> {
    this.volumes = (await this.api.listVolumes()).volumes;
    this.cursor = 0;
    this.repaint();
  }

  render(root: HTMLElement): void {
    root.innerHTML = "";
    const heading = document.createElement("h2");
    heading.textContent = "Volumes";
    root.appendChild(heading);
    const list = document.createElement("ol");
    list.id = "volume-list";
    this.volumes.forEach((volume, index) => {
      const item = document.createElement("li");
      item.textContent =
        `${volume.volume_id}: ${volume.full_title} vol. ${volume.volume_number}` +
        ` [${volume.state}]` + (index === this.cursor ? "  ←" : "");
      if (index === this.cursor) item.className = "selected";
      list.appendChild(item);
    });
    root.appendChild(list);
    const hints = document.createElement("p");
    hints.className = "hints";
    hints.textContent = "j/k choose · Enter open";
    root.appendChild(hints);
  }

  handleKey(ev: KeyboardEvent): boolean {
    switch (ev.key) {
      case "j":
      case "ArrowDown":
        this.cursor = Math.min(this.volumes.length - 1, this.cursor + 1);
        this.repaint();
        return true;
      case "k":
      case "ArrowUp":
        this.cursor = Math.max(0, this.cursor - 1);
        this.repaint();
        return true;
      case "Enter": {
        const chosen = this.volumes[this.cursor];
        if (chosen) this.onPick(chosen.volume_id);
        return true;
      }
      default:
        return false;
    }
  }
}

export class App {
  readonly session: Session;
  private readonly picker: VolumePicker;
  private pageScreen: PageNumberingScreen;
  private articleScreen: ArticleEntryScreen;
  private finalScreen: FinalizedScreen;
  private detachKeys: () => void = () => {};

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
    operator: string,
  ) {
    this.session = new Session(api, operator);
    this.session.onChange = () => this.renderCurrent();
    this.picker = new VolumePicker(
      api,
      (volumeId) => void this.session.open(volumeId),
      () => this.renderCurrent(),
    );
    this.pageScreen = new PageNumberingScreen(this.session);
    this.articleScreen = new ArticleEntryScreen(this.session);
    this.finalScreen = new FinalizedScreen(this.session);
  }

  private activeScreen(): KeyTarget {
    if (!this.session.volume) return this.picker;
    switch (this.session.mode) {
      case "page_numbering":
        return this.pageScreen;
      case "article_entry":
        return this.articleScreen;
      case "finalized":
        return this.finalScreen;
    }
  }

  private renderCurrent(): void {
    const screen = this.activeScreen();
    if (screen === this.picker) {
      this.picker.render(this.root);
    } else if (screen === this.pageScreen) {
      this.pageScreen.render(this.root);
    } else if (screen === this.articleScreen) {
      this.articleScreen.render(this.root);
    } else {
      this.finalScreen.render(this.root);
    }
  }

  async start(): Promise<void> {
    this.detachKeys = attachKeyboard(this.root.ownerDocument, this.root, () =>
      this.activeScreen(),
    );
    await this.picker.load();
  }

  stop(): void {
    this.detachKeys();
  }
}

export function mount(root: HTMLElement, baseUrl: string, operator: string): App {
  const app = new App(root, new ApiClient(baseUrl), operator);
  void app.start();
  return app;
}

declare global {
  interface Window {
    CAPTURE_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const base = window.CAPTURE_API_BASE ?? "";
  const operator = new URLSearchParams(window.location.search).get("operator") ?? "anonymous";
  mount(document.getElementById("app")!, base, operator);
}
