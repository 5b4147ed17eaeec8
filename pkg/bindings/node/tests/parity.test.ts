import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { openGenerator, VERSION, type AugmentedElement, type BoundGenerator } from "../src/index.js";

const CORPUS_LINES = [
  '{"id":"s1","task":"classify","tokens":["it","is","very","cold"],"label":"weather"}',
  '{"id":"s2","task":"classify","tokens":["rain","and","wind"],"label":"weather"}',
  '{"id":"s3","task":"tag_and_classify","tokens":["cold","rain","tonight"],"tags":["B-w","B-w","O"],"label":"weather"}',
  '{"id":"s4","task":"pair_classify","tokens":["very","cold"],"tokens2":["warm","sun"],"label":"contrast"}',
  '{"id":"s5","task":"classify","tokens":["sun","after","rain"],"label":"weather"}',
  '{"id":"s6","task":"classify","tokens":["wind","cold","sun","rain"],"label":"weather"}',
  '{"id":"s7","task":"classify","tokens":["warm","morning"],"label":"weather"}',
];

const DE_LINES = [
  "cold kalt", "rain regen", "sun sonne", "wind wind_de", "very sehr", "warm warm_de", "morning morgen",
];
const FR_LINES = [
  "cold froid", "rain pluie", "sun soleil", "wind vent", "very tres", "warm chaud", "morning matin",
];

let dir: string;
let corpusPath: string;
let dicts: Array<{ lang: string; path: string }>;

beforeAll(() => {
  dir = mkdtempSync(join(tmpdir(), "csaug-node-"));
  corpusPath = join(dir, "corpus.jsonl");
  writeFileSync(corpusPath, CORPUS_LINES.join("\n") + "\n");
  writeFileSync(join(dir, "en-de.txt"), DE_LINES.join("\n") + "\n");
  writeFileSync(join(dir, "en-fr.txt"), FR_LINES.join("\n") + "\n");
  dicts = [
    { lang: "de", path: join(dir, "en-de.txt") },
    { lang: "fr", path: join(dir, "en-fr.txt") },
  ];
});

afterAll(() => {
  rmSync(dir, { recursive: true, force: true });
});

function runCliAugment(out: string, extra: string[]): string[] {
  execFileSync("python3", [
    "-m", "csaug", "augment",
    "--corpus", corpusPath,
    "--dict", `de=${dicts[0].path}`,
    "--dict", `fr=${dicts[1].path}`,
    "--out", out,
    ...extra,
  ]);
  return readFileSync(out, "utf-8").trim().split("\n");
}

describe("one-epoch CLI parity", () => {
  let gen: BoundGenerator;

  afterAll(() => gen?.close());

  it("yields elements field-identical to the CLI JSONL for the same seed", async () => {
    const cliLines = runCliAugment(join(dir, "cli.jsonl"), [
      "--alpha", "1.0", "--beta", "0.9", "--seed", "7", "--batch-size", "3",
    ]);
    const expected = cliLines.map((line) => JSON.parse(line) as AugmentedElement);

    gen = await openGenerator(corpusPath, dicts, { alpha: 1.0, beta: 0.9, seed: 7, batchSize: 3 });
    expect(gen.meta.nInstances).toBe(7);
    expect(gen.meta.batchesPerEpoch).toBe(3);
    expect(gen.meta.languages).toEqual(["de", "fr"]);

    const delivered: AugmentedElement[] = [];
    for (let i = 0; i < gen.meta.batchesPerEpoch; i++) {
      const batch = await gen.nextBatch();
      expect(batch.epoch).toBe(0);
      expect(batch.batchIndex).toBe(i);
      expect(batch.tokens).toEqual(batch.elements.map((e) => e.tokens));
      expect(batch.traces).toEqual(batch.elements.map((e) => e.trace));
      delivered.push(...batch.elements);
    }

    expect(delivered).toEqual(expected);
    expect(gen.cursor).toEqual({ epoch: 1, batchIndex: 0 });
  }, 30000);

  it("reports the core library version", () => {
    expect(gen.meta.version).toBe(VERSION);
  });
});

describe("epoch semantics", () => {
  it("static mode repeats augmentations across the epoch boundary", async () => {
    const gen = await openGenerator(corpusPath, dicts, {
      alpha: 1.0, beta: 0.5, seed: 11, batchSize: 10, mode: "static",
    });
    try {
      const byId = (elements: AugmentedElement[]) =>
        new Map(elements.map((e) => [e.id, e.tokens]));
      const epoch0 = byId((await gen.nextBatch()).elements);
      const epoch1 = byId((await gen.nextBatch()).elements);
      expect(gen.cursor.epoch).toBe(2);
      expect(epoch1).toEqual(epoch0);
    } finally {
      gen.close();
    }
  }, 30000);
});

describe("lifecycle and errors", () => {
  it("rejects on a missing corpus", async () => {
    await expect(openGenerator(join(dir, "nope.jsonl"), dicts)).rejects.toThrow(/exited with code 2/);
  }, 30000);

  it("rejects on an out-of-range alpha", async () => {
    await expect(openGenerator(corpusPath, dicts, { alpha: 3 })).rejects.toThrow(/alpha/);
  }, 30000);

  it("fails after close", async () => {
    const gen = await openGenerator(corpusPath, dicts, { seed: 1 });
    gen.close();
    gen.close(); // idempotent
    await expect(gen.nextBatch()).rejects.toThrow(/closed/);
  }, 30000);
});
