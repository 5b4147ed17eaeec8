import { spawn, type ChildProcess } from "node:child_process";

/** Must track the core package version; checked against /meta at open time. */
export const VERSION = "0.1.0";

export interface DictSpec {
  lang: string;
  path: string;
}

export interface GeneratorConfig {
  alpha?: number;
  beta?: number;
  seed?: number;
  mode?: "dynamic" | "static";
  languages?: string[];
  batchSize?: number;
  sourceLang?: string;
  oov?: string;
  multiword?: "single" | "split";
  noShuffle?: boolean;
  /** Interpreter used to launch the service (default "python3"). */
  pythonBin?: string;
  startupTimeoutMs?: number;
}

export interface TraceRecord {
  seg: number;
  idx: number;
  src: string;
  lang: string;
  tr: string;
  ti: number;
}

export interface TraceMiss {
  seg: number;
  idx: number;
  langs: string[];
}

export interface Trace {
  selected: boolean;
  records: TraceRecord[];
  misses: TraceMiss[];
}

export interface AugmentedElement {
  id: string;
  task: string;
  tokens: string[];
  tokens2?: string[];
  tags?: string[];
  label?: string;
  trace: Trace;
  encoding?: Record<string, unknown>;
}

export interface Batch {
  epoch: number;
  batchIndex: number;
  ids: string[];
  tokens: string[][];
  tags: Array<string[] | null>;
  labels: Array<string | null>;
  traces: Trace[];
  /** The raw service elements, field-identical to the CLI's JSONL lines. */
  elements: AugmentedElement[];
}

export interface GeneratorMeta {
  version: string;
  nInstances: number;
  batchSize: number;
  batchesPerEpoch: number;
  sourceLang: string;
  languages: string[];
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

function buildArgv(corpusPath: string, dicts: DictSpec[], config: GeneratorConfig, port: number): string[] {
  const argv = ["-m", "csaug", "serve", "--corpus", corpusPath, "--host", "127.0.0.1", "--port", String(port)];
  for (const { lang, path } of dicts) {
    argv.push("--dict", `${lang}=${path}`);
  }
  if (config.alpha !== undefined) argv.push("--alpha", String(config.alpha));
  if (config.beta !== undefined) argv.push("--beta", String(config.beta));
  if (config.seed !== undefined) argv.push("--seed", String(config.seed));
  if (config.mode !== undefined) argv.push("--mode", config.mode);
  if (config.languages !== undefined) argv.push("--languages", config.languages.join(","));
  if (config.batchSize !== undefined) argv.push("--batch-size", String(config.batchSize));
  if (config.sourceLang !== undefined) argv.push("--source-lang", config.sourceLang);
  if (config.oov !== undefined) argv.push("--oov", config.oov);
  if (config.multiword !== undefined) argv.push("--multiword", config.multiword);
  if (config.noShuffle) argv.push("--no-shuffle");
  return argv;
}

/**
 * One running csaug service plus an epoch/batch cursor over its stream.
 *
 * The generator is single-consumer: call nextBatch() repeatedly to walk
 * batches in plan order; the cursor rolls to the next epoch automatically.
 * Independent generators may coexist (each owns its own process and port).
 */
export class BoundGenerator {
  readonly meta: GeneratorMeta;
  private readonly baseUrl: string;
  private readonly child: ChildProcess;
  private epoch = 0;
  private batchIndex = 0;
  private closed = false;

  /** @internal Use openGenerator(). */
  constructor(child: ChildProcess, baseUrl: string, meta: GeneratorMeta) {
    this.child = child;
    this.baseUrl = baseUrl;
    this.meta = meta;
  }

  get cursor(): { epoch: number; batchIndex: number } {
    return { epoch: this.epoch, batchIndex: this.batchIndex };
  }

  async nextBatch(): Promise<Batch> {
    if (this.closed) {
      throw new Error("generator is closed");
    }
    const { epoch, batchIndex } = this;
    const response = await fetch(`${this.baseUrl}/epochs/${epoch}/batches/${batchIndex}`);
    if (!response.ok) {
      throw new Error(`batch request failed (${response.status}): ${await response.text()}`);
    }
    const elements = (await response.json()) as AugmentedElement[];
    this.batchIndex += 1;
    if (this.batchIndex >= this.meta.batchesPerEpoch) {
      this.batchIndex = 0;
      this.epoch += 1;
    }
    return {
      epoch,
      batchIndex,
      ids: elements.map((e) => e.id),
      tokens: elements.map((e) => e.tokens),
      tags: elements.map((e) => e.tags ?? null),
      labels: elements.map((e) => e.label ?? null),
      traces: elements.map((e) => e.trace),
      elements,
    };
  }

  close(): void {
    if (!this.closed) {
      this.closed = true;
      this.child.kill("SIGTERM");
    }
  }
}

/**
 * Launch the service over the given corpus and dictionaries and wait for
 * it to become healthy. Startup failures (bad paths, invalid ratios)
 * reject with the service's own stderr message.
 */
export async function openGenerator(
  corpusPath: string,
  dicts: DictSpec[],
  config: GeneratorConfig = {},
): Promise<BoundGenerator> {
  const pythonBin = config.pythonBin ?? "python3";
  const timeoutMs = config.startupTimeoutMs ?? 15000;
  // ephemeral-ish port; collisions just fail startup and surface clearly
  const port = 20000 + Math.floor(Math.random() * 20000);
  const baseUrl = `http://127.0.0.1:${port}`;

  const child = spawn(pythonBin, buildArgv(corpusPath, dicts, config, port), {
    stdio: ["ignore", "pipe", "pipe"],
  });
  let stderr = "";
  child.stderr!.on("data", (chunk: Buffer) => {
    stderr += chunk.toString("utf-8");
  });
  let exited: number | null = null;
  child.on("exit", (code) => {
    exited = code ?? -1;
  });

  const deadline = Date.now() + timeoutMs;
  while (true) {
    if (exited !== null) {
      throw new Error(`csaug serve exited with code ${exited}: ${stderr.trim()}`);
    }
    try {
      const response = await fetch(`${baseUrl}/healthz`);
      if (response.status === 200) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      child.kill("SIGTERM");
      throw new Error(`csaug serve did not become healthy within ${timeoutMs} ms: ${stderr.trim()}`);
    }
    await sleep(50);
  }

  const raw = (await (await fetch(`${baseUrl}/meta`)).json()) as Record<string, any>;
  const meta: GeneratorMeta = {
    version: raw.version,
    nInstances: raw.n_instances,
    batchSize: raw.batch_size,
    batchesPerEpoch: raw.batches_per_epoch,
    sourceLang: raw.source_lang,
    languages: raw.languages,
  };
  if (meta.version !== VERSION) {
    child.kill("SIGTERM");
    throw new Error(`version mismatch: service ${meta.version}, bindings ${VERSION}`);
  }
  return new BoundGenerator(child, baseUrl, meta);
}

export function closeGenerator(generator: BoundGenerator): void {
  generator.close();
}
