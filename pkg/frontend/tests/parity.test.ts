/** End-to-end checks against a real `tracepart serve` process:
 *
 * 1. After a scripted sequence of 20 random moves, the metrics the board
 *    displays equal `tracepart metrics` run on the exported partition
 *    file — exactly, no tolerance.
 * 2. Moves followed by reset restore the initial board state (deep
 *    equality of /api/state, modulo the monotonic revision counter).
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { buildColumns, exportPartitionFile, formatValue } from "../src/board";
import { BoardController } from "../src/controller";
import { METRIC_NAMES, type BoardState } from "../src/types";

const PYTHON = process.env.TRACEPART_PYTHON ?? "python3";
const HOOK_TIMEOUT = 120_000;
const TEST_TIMEOUT = 120_000;

const CORPUS_SCRIPT = `
import sys
from tracepart import synth

corpus = synth.block_corpus(num_classes=16, num_use_cases=3, walks_per_use_case=6, seed=5)
synth.write_corpus(sys.argv[1], corpus)
`;

/** Two tight class blocks with a single cross-block call (B1 -> A1), so
 * the 2-way cut separates the blocks and A1 is the sole externally
 * called class of its partition. */
const BLOCKS_SCRIPT = `
import sys
from tracepart import synth

corpus = {
    "browse": [("A2", "A1"), ("A3", "A1"), ("A2", "A3"), ("A3", "A2")],
    "checkout": [("B1", "B2"), ("B2", "B3"), ("B3", "B1"), ("B1", "A1")],
}
synth.write_corpus(sys.argv[1], corpus)
`;

let workDir: string;
let manifestPath: string;
let runDir: string;
let server: ServerHandle;

interface ServerHandle {
  proc: ChildProcess;
  baseUrl: string;
}

function runPython(args: string[]): string {
  const result = spawnSync(PYTHON, args, { encoding: "utf-8" });
  if (result.status !== 0) {
    throw new Error(
      `${PYTHON} ${args.join(" ")} failed (${result.status}):\n${result.stderr}`,
    );
  }
  return result.stdout;
}

/** Start `tracepart serve` on a free port and wait for its address line. */
function startServer(outDir: string): Promise<ServerHandle> {
  const proc = spawn(PYTHON, ["-m", "tracepart", "serve", "--out", outDir, "--port", "0"], {
    env: { ...process.env, PYTHONUNBUFFERED: "1" },
  });
  return new Promise((resolve, reject) => {
    let output = "";
    const timer = setTimeout(() => {
      proc.kill();
      reject(new Error(`server never announced its port; output:\n${output}`));
    }, 30_000);
    const scan = (chunk: unknown) => {
      output += String(chunk);
      const match = output.match(/serving on (http:\/\/127\.0\.0\.1:\d+)\//);
      if (match) {
        clearTimeout(timer);
        resolve({ proc, baseUrl: match[1]! });
      }
    };
    proc.stdout!.on("data", scan);
    proc.stderr!.on("data", scan);
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early (${code}); output:\n${output}`));
    });
  });
}

function stopServer(handle: ServerHandle | undefined): void {
  handle?.proc.removeAllListeners("exit");
  handle?.proc.kill("SIGTERM");
}

/** Deterministic RNG so the "random" move script is reproducible. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Apply `count` random cross-column moves through the controller.
 *
 * The class is drawn uniformly over all classes, restricted to moves that
 * leave at least two live columns, so a 20-move script exists for any
 * seed; the target column is drawn uniformly among the others. */
async function scriptedMoves(
  controller: BoardController,
  count: number,
  seed: number,
): Promise<void> {
  const rand = mulberry32(seed);
  const pick = <T>(items: readonly T[]): T => items[Math.floor(rand() * items.length)]!;
  for (let i = 0; i < count; i += 1) {
    const state = controller.state;
    if (state === null) throw new Error("controller lost its state mid-script");
    const movable = state.partitions.flatMap((home) =>
      state.partitions.length > 2 || home.classes.length > 1
        ? home.classes.map((cls) => ({ cls, homeId: home.id }))
        : [],
    );
    const chosen = pick(movable);
    const targets = state.partitions.filter((p) => p.id !== chosen.homeId);
    const editsBefore = state.edit_count;
    await controller.moveClass(chosen.cls, pick(targets).id);
    if (controller.notice !== null) {
      throw new Error(`move ${i} was rejected: ${controller.notice}`);
    }
    expect(controller.state!.edit_count).toBe(editsBefore + 1);
  }
}

/** Export the board and re-score it with the metrics command. */
function scoreExported(
  state: BoardState,
  fileName: string,
  manifest: string,
): Record<string, number> {
  const partPath = join(workDir, fileName);
  writeFileSync(partPath, JSON.stringify(exportPartitionFile(state), null, 2) + "\n");
  const stdout = runPython([
    "-m", "tracepart", "metrics",
    "--partitions", partPath,
    "--manifest", manifest,
  ]);
  return JSON.parse(stdout) as Record<string, number>;
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "tracepart-board-"));
  const corpusDir = join(workDir, "corpus");
  runPython(["-c", CORPUS_SCRIPT, corpusDir]);
  manifestPath = join(corpusDir, "manifest.json");
  runDir = join(workDir, "run");
  runPython([
    "-m", "tracepart", "partition",
    "--manifest", manifestPath,
    "--n", "4",
    "--out", runDir,
  ]);
  server = await startServer(runDir);
}, HOOK_TIMEOUT);

afterAll(() => {
  stopServer(server);
  rmSync(workDir, { recursive: true, force: true });
});

describe("board/service parity", () => {
  it(
    "displays metrics equal to the scoring command after 20 random moves",
    async () => {
      const controller = new BoardController(new ApiClient(server.baseUrl));
      await controller.load();
      expect(controller.status).toEqual({ kind: "ready" });

      await scriptedMoves(controller, 20, 0xa11ce);
      expect(controller.state!.edit_count).toBe(20);

      expect(controller.state!.partitions.length).toBeGreaterThan(1);
      const scored = scoreExported(controller.state!, "edited-partitions.json", manifestPath);

      const displayed = controller.displayedMetrics();
      expect(displayed).not.toBeNull();
      for (const name of METRIC_NAMES) {
        // Exact equality: the board never recomputes, it shows what the
        // service served, and the scorer must agree to the last bit.
        expect(displayed![name]).toBe(scored[name]);
        expect(formatValue(displayed![name])).toBe(formatValue(scored[name]!));
      }
    },
    TEST_TIMEOUT,
  );

  it(
    "restores the initial board after moves followed by reset",
    async () => {
      // Fresh server so "initial" really is the untouched session.
      const own = await startServer(runDir);
      try {
        const api = new ApiClient(own.baseUrl);
        const initial = await api.getState();
        expect(initial.edit_count).toBe(0);

        const controller = new BoardController(api);
        await controller.load();
        await scriptedMoves(controller, 7, 0xbead);
        expect(controller.state!.edit_count).toBe(7);

        await controller.reset();
        expect(controller.notice).toBeNull();
        const final = await api.getState();

        // The revision counter only ever grows; everything else must be
        // exactly the state the session started with.
        expect(final.revision).toBeGreaterThan(initial.revision);
        const stripRevision = ({ revision, ...rest }: BoardState) => rest;
        expect(stripRevision(final)).toEqual(stripRevision(initial));

        // And the panel shows an unedited board: zero deltas everywhere.
        expect(controller.metricPanel().every((r) => r.delta === "+0.000000")).toBe(true);
      } finally {
        stopServer(own);
      }
    },
    TEST_TIMEOUT,
  );

  it(
    "shows a non-positive ifn delta when a sole interface class joins its caller",
    async () => {
      const corpusDir = join(workDir, "blocks");
      runPython(["-c", BLOCKS_SCRIPT, corpusDir]);
      const blocksManifest = join(corpusDir, "manifest.json");
      const blocksRun = join(workDir, "blocks-run");
      runPython([
        "-m", "tracepart", "partition",
        "--manifest", blocksManifest,
        "--n", "2",
        "--out", blocksRun,
      ]);
      const own = await startServer(blocksRun);
      try {
        const controller = new BoardController(new ApiClient(own.baseUrl));
        await controller.load();
        const initial = controller.state!;

        // Chip interface markers reproduce the report's interface lists.
        const report = JSON.parse(readFileSync(join(blocksRun, "report-n2.json"), "utf-8")) as {
          partitions: Array<{ interfaces: string[] }>;
        };
        const columns = buildColumns(initial);
        expect(columns.length).toBe(2);
        columns.forEach((column, i) => {
          const marked = column.chips.filter((c) => c.isInterface).map((c) => c.name);
          expect([...marked].sort()).toEqual([...report.partitions[i]!.interfaces].sort());
        });

        // A1 is the sole externally called class of its partition; its
        // caller B1 lives in the other one.
        const home = initial.partitions.find((p) => p.interfaces.length === 1);
        expect(home).toBeDefined();
        expect(home!.interfaces).toEqual(["A1"]);
        const caller = initial.partitions.find((p) => p.classes.includes("B1"));
        expect(caller).toBeDefined();
        expect(caller!.id).not.toBe(home!.id);

        const ifnBefore = initial.metrics.ifn;
        await controller.moveClass("A1", caller!.id);
        expect(controller.notice).toBeNull();
        const after = controller.state!;

        // Joining the caller never adds interface pressure here, and the
        // displayed delta says so.
        expect(after.metrics.ifn).toBeLessThanOrEqual(ifnBefore);
        const ifnRow = controller.metricPanel().find((r) => r.name === "ifn")!;
        expect(ifnRow.delta === "+0.000000" || ifnRow.delta.startsWith("-")).toBe(true);

        // The number on screen is exactly what re-scoring the exported
        // board computes.
        const scored = scoreExported(after, "blocks-edited.json", blocksManifest);
        expect(after.metrics.ifn).toBe(scored.ifn);
      } finally {
        stopServer(own);
      }
    },
    TEST_TIMEOUT,
  );
});
