// Single keydown dispatcher. The active screen gets first claim on a key;
// anything it handles is consumed so the browser never double-acts.

export interface KeyTarget {
  handleKey(ev: KeyboardEvent, root: HTMLElement): boolean;
}

export function attachKeyboard(
  doc: Document,
  root: HTMLElement,
  active: () => KeyTarget | null,
): () => void {
  const listener = (ev: KeyboardEvent) => {
    const screen = active();
    if (screen && screen.handleKey(ev, root)) {
      ev.preventDefault();
      ev.stopPropagation();
    }
  };
  doc.addEventListener("keydown", listener);
  return () => doc.removeEventListener("keydown", listener);
}
