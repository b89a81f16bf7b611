import { execFile } from 'node:child_process';
import { constants, existsSync } from 'node:fs';
import { access, mkdir, readFile, rename, writeFile } from 'node:fs/promises';
import { tmpdir } from 'node:os';
import { delimiter, isAbsolute, join, sep } from 'node:path';
import { promisify } from 'node:util';

import { canonicalJson, requestHash } from './canonical.js';
import { ProtocolError, SolverExecutionError, SolverNotFoundError } from './errors.js';

const execFileAsync = promisify(execFile);

/** One solver result document, as emitted by `genopt solve`. */
export interface ResultRecord {
  problem: string;
  instance: string;
  seed: number;
  objectives: number[];
  penalty: number;
  feasible: boolean;
  gap_pct: number | null;
  generations: number;
  elapsed_s: number;
  gens_per_sec: number;
  final_weights: Record<string, unknown>;
  profile: Record<string, unknown>;
  config: Record<string, unknown>;
  tool_version: string;
}

const REQUIRED_FIELDS: (keyof ResultRecord)[] = [
  'problem', 'instance', 'seed', 'objectives', 'penalty', 'feasible',
  'gap_pct', 'generations', 'elapsed_s', 'gens_per_sec', 'final_weights',
  'profile', 'config', 'tool_version',
];

export interface SolveOptions {
  /** Explicit solver executable; falls back to $GENOPT_BIN, then PATH lookup. */
  bin?: string;
  seed?: number;
  seeds?: number[];
  generations?: number;
  timeLimitSeconds?: number;
  population?: number;
  teamSize?: number;
  replicas?: number;
  bestKnown?: number;
  target?: number;
  /** Directory for hash-named request files (default: <tmp>/genopt-bridge). */
  cacheDir?: string;
}

export interface SolveOutcome {
  record: ResultRecord;
  raw: string;
  requestPath: string;
}

export function resolveExecutable(options: SolveOptions = {}): string {
  // an explicit pin (option or GENOPT_BIN) is exclusive: no silent fallback
  const pinned = options.bin ?? process.env.GENOPT_BIN;
  const candidate = pinned ?? 'genopt';
  if (candidate.includes(sep) || isAbsolute(candidate)) {
    if (existsSync(candidate)) return candidate;
    throw new SolverNotFoundError([candidate]);
  }
  const searched: string[] = [];
  for (const dir of (process.env.PATH ?? '').split(delimiter)) {
    if (!dir) continue;
    const full = join(dir, candidate);
    if (existsSync(full)) return full;
  }
  searched.push(`${candidate} (on PATH)`);
  throw new SolverNotFoundError(searched);
}

async function writeRequestFile(request: Record<string, unknown>,
                                cacheDir: string): Promise<string> {
  const hash = requestHash(request);
  const finalPath = join(cacheDir, `genopt-req-${hash}.json`);
  try {
    await access(finalPath, constants.R_OK);
    return finalPath; // identical request already materialized
  } catch {
    // fall through and write it
  }
  await mkdir(cacheDir, { recursive: true });
  const payload = request['payload'] as Record<string, unknown>;
  const tmpPath = `${finalPath}.${process.pid}.${Date.now()}.tmp`;
  await writeFile(tmpPath, canonicalJson(payload));
  await rename(tmpPath, finalPath); // atomic publish
  return finalPath;
}

function cliArgs(requestPath: string, options: SolveOptions, seed: number): string[] {
  const args = ['solve', '--instance', requestPath, '--seed', String(seed)];
  if (options.generations !== undefined) args.push('--generations', String(options.generations));
  if (options.timeLimitSeconds !== undefined) args.push('--time-limit', String(options.timeLimitSeconds));
  if (options.population !== undefined) args.push('--pop', String(options.population));
  if (options.teamSize !== undefined) args.push('--team-size', String(options.teamSize));
  if (options.replicas !== undefined) args.push('--replicas', String(options.replicas));
  if (options.bestKnown !== undefined) args.push('--best-known', String(options.bestKnown));
  if (options.target !== undefined) args.push('--target', String(options.target));
  return args;
}

async function runCli(bin: string, args: string[]): Promise<string> {
  try {
    const { stdout } = await execFileAsync(bin, args, {
      maxBuffer: 16 * 1024 * 1024,
      encoding: 'utf8',
    });
    return stdout;
  } catch (err) {
    const e = err as NodeJS.ErrnoException & { code?: unknown; stderr?: string; stdout?: string };
    if (e.code === 'ENOENT') {
      throw new SolverNotFoundError([bin]);
    }
    if (typeof e.code === 'number') {
      throw new SolverExecutionError(e.code, e.stderr ?? '');
    }
    throw err;
  }
}

function parseRecord(raw: string): ResultRecord {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    throw new ProtocolError('solver output is not valid JSON', raw);
  }
  if (typeof parsed !== 'object' || parsed === null || Array.isArray(parsed)) {
    throw new ProtocolError('solver output is not a result document', raw);
  }
  const record = parsed as Record<string, unknown>;
  for (const field of REQUIRED_FIELDS) {
    if (!(field in record)) {
      throw new ProtocolError(`result document is missing field "${field}"`, raw);
    }
  }
  return record as unknown as ResultRecord;
}

/**
 * Serialize a request, invoke the solver CLI on it, and parse the emitted
 * document. Identical requests (any field order) map to the same
 * hash-named request file, which is written once and reused.
 */
export async function solveRequest(problem: string,
                                   payload: Record<string, unknown>,
                                   options: SolveOptions = {}): Promise<SolveOutcome> {
  const bin = resolveExecutable(options);
  const seed = options.seed ?? 42;
  const request = {
    problem,
    payload: { problem, ...payload },
    seed,
    seeds: options.seeds,
    generations: options.generations,
    time_limit: options.timeLimitSeconds,
    population: options.population,
    team_size: options.teamSize,
    replicas: options.replicas,
  };
  const cacheDir = options.cacheDir ?? join(tmpdir(), 'genopt-bridge');
  const requestPath = await writeRequestFile(request, cacheDir);
  const raw = await runCli(bin, cliArgs(requestPath, options, seed));
  return { record: parseRecord(raw), raw, requestPath };
}

/** Solve a symmetric TSP given a full distance matrix. */
export async function solveTsp(distMatrix: number[][],
                               options: SolveOptions = {}): Promise<ResultRecord> {
  const outcome = await solveRequest('tsp', { dist: distMatrix }, options);
  return outcome.record;
}

/** Solve a 0/1 knapsack instance. */
export async function solveKnapsack(weights: number[], values: number[],
                                    capacity: number,
                                    options: SolveOptions = {}): Promise<ResultRecord> {
  const outcome = await solveRequest(
    'knapsack', { weights, values, capacity }, options);
  return outcome.record;
}

/** Solve any built-in problem from its JSON payload fields. */
export async function solveCustom(problem: string,
                                  payload: Record<string, unknown>,
                                  options: SolveOptions = {}): Promise<ResultRecord> {
  const outcome = await solveRequest(problem, payload, options);
  return outcome.record;
}
