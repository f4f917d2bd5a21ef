/**
 * Cross-runtime check: run the source tfjs model and the exported document
 * (through the Python engine's CLI) on the same random inputs and compare
 * class probabilities. The engine is driven exactly the way a user would
 * drive it, via `python3 -m convstream.cli run`.
 */

import { spawnSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import * as tf from "@tensorflow/tfjs";

export interface VerifyResult {
  trials: number;
  maxDeviation: number;
  warnings: string[];
}

export interface VerifyOptions {
  python?: string; // interpreter to launch, default "python3"
  seed?: number;
  mode?: "streaming" | "batch";
}

/** Deterministic uniform(-1, 1) samples; avoids dragging in an RNG dep. */
function* lcg(seed: number): Generator<number> {
  let state = (seed >>> 0) || 1;
  for (;;) {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    yield (state / 0x80000000) - 1.0;
  }
}

function writeTraceCsv(file: string, rows: Float32Array[], channels: number): void {
  const lines: string[] = [];
  for (const row of rows) {
    const cells: string[] = [];
    for (let c = 0; c < channels; c++) cells.push(String(row[c]));
    lines.push(cells.join(","));
  }
  fs.writeFileSync(file, lines.join("\n") + "\n");
}

function runEngine(python: string, modelPath: string, csvPath: string,
                   mode: string): number[] {
  const result = spawnSync(
    python, ["-m", "convstream.cli", "run", "--model", modelPath,
             "--csv", csvPath, "--mode", mode],
    { encoding: "utf8" });
  if (result.error) throw result.error;
  if (result.status !== 0) {
    throw new Error(
      `engine exited ${result.status}: ${result.stderr.trim()}`);
  }
  return JSON.parse(result.stdout).probabilities as number[];
}

/** Max absolute per-class probability deviation over `trials` random inputs. */
export function verifyRoundtrip(
  model: tf.LayersModel, exportedPath: string, trials: number,
  options: VerifyOptions = {}): VerifyResult {
  const warnings: string[] = [];
  if (trials <= 0) {
    warnings.push("verification skipped: zero trials requested");
    return { trials: 0, maxDeviation: 0, warnings };
  }
  const shape = model.inputs[0].shape; // [batch, length, channels]
  const length = shape[1] as number;
  const channels = shape[2] as number;
  const python = options.python ?? "python3";
  const mode = options.mode ?? "streaming";
  const rand = lcg(options.seed ?? 1);

  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "convstream-verify-"));
  let worst = 0;
  try {
    for (let t = 0; t < trials; t++) {
      const rows: Float32Array[] = [];
      for (let i = 0; i < length; i++) {
        const row = new Float32Array(channels);
        for (let c = 0; c < channels; c++) {
          row[c] = Math.fround(rand.next().value);
        }
        rows.push(row);
      }
      const csvPath = path.join(dir, `trial${t}.csv`);
      writeTraceCsv(csvPath, rows, channels);

      const flat = new Float32Array(length * channels);
      rows.forEach((row, i) => flat.set(row, i * channels));
      const input = tf.tensor3d(flat, [1, length, channels]);
      const output = model.predict(input) as tf.Tensor;
      const ours = output.dataSync();
      input.dispose();
      output.dispose();

      const theirs = runEngine(python, exportedPath, csvPath, mode);
      if (theirs.length !== ours.length) {
        throw new Error(
          `class count mismatch: engine ${theirs.length}, source ${ours.length}`);
      }
      for (let k = 0; k < theirs.length; k++) {
        worst = Math.max(worst, Math.abs(theirs[k] - ours[k]));
      }
    }
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
  return { trials, maxDeviation: worst, warnings };
}
