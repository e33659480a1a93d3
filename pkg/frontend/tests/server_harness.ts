// Spawns a real capture service for the browser tests. Each caller gets its
// own data directory seeded with one ten-scan volume, and a server bound to
// an ephemeral port so parallel test files never collide.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const HERE = dirname(fileURLToPath(import.meta.url));
const PY_FIXTURES = join(HERE, "..", "..", "tests");

// Reuses the Python test fixtures (registry rows, the 1x1 PNG) so both test
// suites describe the same volume: yale-1, ten scans, publication year 1910.
const SEED_SCRIPT = `
import sys
from pathlib import Path

sys.path.insert(0, sys.argv[2])
from conftest import REGISTRY_TSV, TINY_PNG, YALE_JOURNAL_TITLE

from bibcap import CaptureStore

data = Path(sys.argv[1])
data.mkdir(parents=True, exist_ok=True)
(data / "registry.tsv").write_text(REGISTRY_TSV, encoding="utf-8")
store = CaptureStore(data)
volume = store.create_volume(
    full_title=YALE_JOURNAL_TITLE, volume_number=1,
    publication_year=1910, publication_month=0, volume_id="yale-1")
scans = [(f"yale-1-s{i:02d}", TINY_PNG, "image/png") for i in range(10)]
store.ingest_scans("yale-1", scans, expected_version=volume.version)
`;

export interface CaptureServer {
  baseUrl: string;
  dataDir: string;
  stop(): Promise<void>;
}

function seedData(): string {
  const dataDir = mkdtempSync(join(tmpdir(), "capture-ui-"));
  const seeded = spawnSync("python3", ["-c", SEED_SCRIPT, dataDir, PY_FIXTURES], {
    encoding: "utf8",
  });
  if (seeded.status !== 0) {
    throw new Error(`seeding the test volume failed:\n${seeded.stderr}`);
  }
  return dataDir;
}

function waitForPort(proc: ChildProcess): Promise<number> {
  return new Promise((resolve, reject) => {
    let log = "";
    const onChunk = (chunk: Buffer) => {
      log += chunk.toString();
      const bound = log.match(/http:\/\/127\.0\.0\.1:(\d+)/);
      if (bound) resolve(Number(bound[1]));
    };
    proc.stdout?.on("data", onChunk);
    proc.stderr?.on("data", onChunk);
    proc.on("exit", (code) => reject(new Error(`server exited early (${code}):\n${log}`)));
    setTimeout(() => reject(new Error(`server never reported its port:\n${log}`)), 30_000);
  });
}

export async function startSeededServer(): Promise<CaptureServer> {
  const dataDir = seedData();
  const proc = spawn(
    "bibcap",
    ["serve", "--data", dataDir, "--listen", "127.0.0.1:0"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const port = await waitForPort(proc);
  const baseUrl = `http://127.0.0.1:${port}`;

  const deadline = Date.now() + 15_000;
  for (;;) {
    try {
      const res = await fetch(`${baseUrl}/volumes`);
      if (res.ok) break;
    } catch {
      // not accepting connections yet
    }
    if (Date.now() > deadline) {
      proc.kill();
      throw new Error("server never answered /volumes");
    }
    await new Promise((r) => setTimeout(r, 50));
  }

  return {
    baseUrl,
    dataDir,
    stop: () =>
      new Promise<void>((resolve) => {
        proc.on("exit", () => {
          rmSync(dataDir, { recursive: true, force: true });
          resolve();
        });
        proc.kill("SIGTERM");
      }),
  };
}

/** Polls until `check` passes; the failure message names what never happened. */
export async function until(check: () => boolean, what: string, timeoutMs = 10_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((r) => setTimeout(r, 15));
  }
  throw new Error(`timed out waiting for ${what}`);
}

/** Sends a keydown the way a browser would: to the focused element. */
export function press(key: string, init: KeyboardEventInit = {}): void {
  const target = document.activeElement ?? document.body;
  target.dispatchEvent(
    new KeyboardEvent("keydown", { key, bubbles: true, cancelable: true, ...init }),
  );
}

export function setValue(id: string, text: string): void {
  const el = document.getElementById(id) as HTMLInputElement | HTMLTextAreaElement | null;
  if (!el) throw new Error(`no field #${id} on screen`);
  el.value = text;
}

export function textOf(selector: string): string {
  return document.querySelector(selector)?.textContent ?? "";
}
