import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";

import {
  ShapeError,
  UnsupportedLayerError,
  exportModel,
  permuteConvKernel,
  toDocument,
  transposeDenseKernel,
  unpermuteConvKernel,
} from "../src/export";
import { countParams } from "../src/format";
import { buildReferenceModel, ensureBackend } from "./helpers";

beforeAll(() => ensureBackend());

function tmpFile(name: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "convstream-export-"));
  return path.join(dir, name);
}

function randomNested(taps: number, channels: number, filters: number): number[][][] {
  return Array.from({ length: taps }, () =>
    Array.from({ length: channels }, () =>
      Array.from({ length: filters }, () => Math.fround(Math.random() * 2 - 1))));
}

describe("axis permutation", () => {
  it("is self-inverse on conv kernels", () => {
    for (let trial = 0; trial < 20; trial++) {
      const taps = 1 + Math.floor(Math.random() * 8);
      const channels = 1 + Math.floor(Math.random() * 6);
      const filters = 1 + Math.floor(Math.random() * 6);
      const kernel = randomNested(taps, channels, filters);
      expect(unpermuteConvKernel(permuteConvKernel(kernel))).toEqual(kernel);
    }
  });

  it("moves single entries to the right place", () => {
    const kernel = randomNested(3, 2, 4);
    const permuted = permuteConvKernel(kernel);
    expect(permuted[3][1][2]).toBe(kernel[2][1][3]);
    expect(permuted.length).toBe(4); // filters first
    expect(permuted[0].length).toBe(2); // then channels
    expect(permuted[0][0].length).toBe(3); // then taps
  });

  it("transposes dense kernels", () => {
    const kernel = [[1, 2, 3], [4, 5, 6]]; // [in=2][out=3]
    expect(transposeDenseKernel(kernel)).toEqual([[1, 4], [2, 5], [3, 6]]);
    expect(transposeDenseKernel(transposeDenseKernel(kernel))).toEqual(kernel);
  });
});

describe("toDocument", () => {
  it("maps the reference pipeline with its shapes intact", () => {
    const model = buildReferenceModel();
    const { doc, mapping } = toDocument(model);
    expect(doc.format_version).toBe(1);
    expect(doc.input).toEqual({ length: 460, channels: 3 });
    expect(doc.layers.map((l) => l.kind)).toEqual([
      "conv1d", "maxpool", "conv1d", "maxpool", "conv1d", "maxpool",
      "conv1d", "maxpool", "flatten", "dense", "dense", "softmax",
    ]);
    expect(mapping.map((m) => m.target)).toEqual(doc.layers.map((l) => l.kind));
    expect(mapping[0].source).toContain("Conv1D");
    const flatten = doc.layers[8] as { size: number };
    expect(flatten.size).toBe(16);
    expect(countParams(doc)).toBe(2338);
  });

  it("round-trips every weight exactly", () => {
    const model = buildReferenceModel();
    const { doc } = toDocument(model);
    const conv = doc.layers[0] as { weights: number[][][]; bias: number[] };
    const [kernel, bias] = model.layers[0].getWeights();
    expect(unpermuteConvKernel(conv.weights)).toEqual(kernel.arraySync());
    expect(conv.bias).toEqual(bias.arraySync());
  });

  it("rejects unsupported layer kinds by name", () => {
    const model = tf.sequential();
    model.add(tf.layers.lstm({ units: 4, inputShape: [20, 2] }));
    model.add(tf.layers.dense({ units: 2, activation: "softmax" }));
    expect(() => toDocument(model)).toThrowError(UnsupportedLayerError);
    try {
      toDocument(model);
    } catch (err) {
      expect((err as Error).message).toContain("lstm");
      expect((err as Error).message).toContain("LSTM");
    }
  });

  it("rejects same padding", () => {
    const model = tf.sequential();
    model.add(tf.layers.conv1d({
      filters: 2, kernelSize: 3, padding: "same",
      activation: "relu", inputShape: [20, 2],
    }));
    model.add(tf.layers.flatten());
    model.add(tf.layers.dense({ units: 2, activation: "softmax" }));
    expect(() => toDocument(model)).toThrowError(ShapeError);
    expect(() => toDocument(model)).toThrowError(/padding/);
  });

  it("rejects unsupported activations", () => {
    const model = tf.sequential();
    model.add(tf.layers.conv1d({
      filters: 2, kernelSize: 3, activation: "tanh", inputShape: [20, 2],
    }));
    model.add(tf.layers.flatten());
    model.add(tf.layers.dense({ units: 2, activation: "softmax" }));
    expect(() => toDocument(model)).toThrowError(/tanh/);
  });

  it("requires a softmax tail", () => {
    const model = tf.sequential();
    model.add(tf.layers.conv1d({
      filters: 2, kernelSize: 3, activation: "relu", inputShape: [20, 2],
    }));
    model.add(tf.layers.flatten());
    model.add(tf.layers.dense({ units: 2, activation: "relu" }));
    expect(() => toDocument(model)).toThrowError(/softmax/);
  });

  it("rejects dense layers before flatten", () => {
    const model = tf.sequential();
    model.add(tf.layers.dense({ units: 4, inputShape: [20, 2] }));
    model.add(tf.layers.flatten());
    model.add(tf.layers.dense({ units: 2, activation: "softmax" }));
    expect(() => toDocument(model)).toThrowError(/flatten/);
  });
});

describe("exportModel", () => {
  it("writes the manifest it promises", () => {
    const model = buildReferenceModel();
    const out = tmpFile("ref.json");
    const manifest = exportModel(model, out);
    expect(manifest.parameterCount).toBe(model.countParams());
    expect(manifest.parameterCount).toBe(2338);
    expect(manifest.outputPath).toBe(out);
    expect(manifest.warnings).toEqual([]);
    expect(manifest.mapping.length).toBe(12);
    const onDisk = JSON.parse(fs.readFileSync(out, "utf8"));
    expect(countParams(onDisk)).toBe(2338);
  });
});
