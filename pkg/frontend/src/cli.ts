#!/usr/bin/env node
/**
 * convstream-export export --in SAVED_MODEL --out model.json [--verify N]
 *
 * SAVED_MODEL is a tfjs Layers model directory (model.json + weight shards)
 * or a direct path to its model.json. Exit codes: 0 success, 2 bad usage or
 * unsupported/malformed model, 1 unexpected failure.
 */

import * as tf from "@tensorflow/tfjs";

import { ShapeError, UnsupportedLayerError, exportModel } from "./export";
import { loadLayersModelFromDir } from "./load";
import { verifyRoundtrip } from "./verify";

const USAGE =
  "usage: convstream-export export --in SAVED_MODEL --out model.json [--verify N]";

interface Args {
  input: string;
  output: string;
  verify: number;
}

function parseArgs(argv: string[]): Args | null {
  if (argv[0] !== "export") return null;
  const args: Partial<Args> = { verify: 0 };
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) return null;
    if (flag === "--in") args.input = value;
    else if (flag === "--out") args.output = value;
    else if (flag === "--verify") {
      args.verify = Number(value);
      if (!Number.isInteger(args.verify) || args.verify < 0) return null;
    } else return null;
  }
  if (!args.input || !args.output) return null;
  return args as Args;
}

export async function main(argv: string[]): Promise<number> {
  const args = parseArgs(argv);
  if (args === null) {
    console.error(USAGE);
    return 2;
  }
  try {
    await tf.setBackend("cpu");
    const model = await loadLayersModelFromDir(args.input);
    const manifest = exportModel(model, args.output);
    if (args.verify > 0) {
      const result = verifyRoundtrip(model, args.output, args.verify);
      manifest.warnings.push(...result.warnings);
      console.error(
        `verified ${result.trials} trial(s), max deviation ${result.maxDeviation.toExponential(3)}`);
      if (result.maxDeviation > 1e-4) {
        console.error("error: cross-runtime deviation exceeds 1e-4");
        return 1;
      }
    }
    console.log(JSON.stringify(manifest, null, 2));
    return 0;
  } catch (err) {
    if (err instanceof UnsupportedLayerError || err instanceof ShapeError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof SyntaxError ||
        (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).stack ?? err}`);
    return 1;
  }
}

if (require.main === module) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
