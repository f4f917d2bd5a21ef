/**
 * Convert a trained tfjs Layers model into the neutral document format.
 *
 * Supported pipeline: Conv1D (valid padding, relu/linear) and max/average
 * pooling stages, then Flatten, Dense (relu/linear), and a final softmax
 * Dense. Weight axes are permuted from the tfjs layouts (conv kernels
 * [tap][channel][filter], dense kernels [in][out]) into the document's
 * [filter][channel][tap] / [out][in] order.
 */

import * as fs from "fs";
import * as tf from "@tensorflow/tfjs";

import {
  ConvLayerDoc,
  DenseLayerDoc,
  LayerDoc,
  ModelDocument,
  PoolLayerDoc,
  SoftmaxLayerDoc,
  countParams,
  documentToJson,
} from "./format";

export class UnsupportedLayerError extends Error {
  constructor(layerName: string, why: string) {
    super(`layer ${layerName}: ${why}`);
    this.name = "UnsupportedLayerError";
  }
}

export class ShapeError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ShapeError";
  }
}

export interface LayerMapping {
  source: string; // "conv1d_Conv1D1 (Conv1D)"
  target: string; // document layer kind
}

export interface ExportManifest {
  source: string;
  mapping: LayerMapping[];
  parameterCount: number;
  outputPath: string;
  warnings: string[];
}

/** tfjs conv kernels are [tap][channel][filter]; the document wants
 * [filter][channel][tap]. */
export function permuteConvKernel(kernel: number[][][]): number[][][] {
  const taps = kernel.length;
  const channels = kernel[0].length;
  const filters = kernel[0][0].length;
  const out: number[][][] = [];
  for (let f = 0; f < filters; f++) {
    const perFilter: number[][] = [];
    for (let c = 0; c < channels; c++) {
      const row: number[] = [];
      for (let j = 0; j < taps; j++) {
        row.push(kernel[j][c][f]);
      }
      perFilter.push(row);
    }
    out.push(perFilter);
  }
  return out;
}

/** Inverse of permuteConvKernel: back to [tap][channel][filter]. */
export function unpermuteConvKernel(weights: number[][][]): number[][][] {
  const filters = weights.length;
  const channels = weights[0].length;
  const taps = weights[0][0].length;
  const out: number[][][] = [];
  for (let j = 0; j < taps; j++) {
    const perTap: number[][] = [];
    for (let c = 0; c < channels; c++) {
      const row: number[] = [];
      for (let f = 0; f < filters; f++) {
        row.push(weights[f][c][j]);
      }
      perTap.push(row);
    }
    out.push(perTap);
  }
  return out;
}

/** tfjs dense kernels are [in][out]; the document wants [out][in]. */
export function transposeDenseKernel(kernel: number[][]): number[][] {
  return kernel[0].map((_, o) => kernel.map((row) => row[o]));
}

function scalar(v: number | number[] | undefined, fallback?: number): number {
  if (Array.isArray(v)) return v[0];
  if (v === undefined) {
    if (fallback === undefined) throw new Error("missing config value");
    return fallback;
  }
  return v;
}

function mapActivation(layer: tf.layers.Layer, act: unknown): "relu" | "identity" {
  if (act === "relu") return "relu";
  if (act === "linear" || act === undefined || act === null) return "identity";
  throw new UnsupportedLayerError(describe(layer), `activation ${String(act)}`);
}

function describe(layer: tf.layers.Layer): string {
  return `${layer.name} (${layer.getClassName()})`;
}

function requireValidPadding(layer: tf.layers.Layer, padding: unknown): void {
  if (padding !== undefined && padding !== "valid") {
    throw new ShapeError(
      `layer ${describe(layer)}: only valid padding is supported, got ${String(padding)}`);
  }
}

function convertConv(layer: tf.layers.Layer): ConvLayerDoc {
  const cfg = layer.getConfig() as Record<string, unknown>;
  requireValidPadding(layer, cfg.padding);
  const [kernel, bias] = layer.getWeights();
  if (bias === undefined) {
    throw new UnsupportedLayerError(describe(layer), "bias-free conv layers");
  }
  return {
    kind: "conv1d",
    filters: scalar(cfg.filters as number),
    kernel: scalar(cfg.kernelSize as number | number[]),
    stride: scalar(cfg.strides as number | number[], 1),
    activation: mapActivation(layer, cfg.activation),
    weights: permuteConvKernel(kernel.arraySync() as number[][][]),
    bias: bias.arraySync() as number[],
  };
}

function convertPool(layer: tf.layers.Layer, kind: "maxpool" | "avgpool"): PoolLayerDoc {
  const cfg = layer.getConfig() as Record<string, unknown>;
  requireValidPadding(layer, cfg.padding);
  const window = scalar(cfg.poolSize as number | number[]);
  return {
    kind,
    window,
    stride: scalar(cfg.strides as number | number[], window),
  };
}

function convertDense(layer: tf.layers.Layer, isLast: boolean): DenseLayerDoc | SoftmaxLayerDoc {
  const cfg = layer.getConfig() as Record<string, unknown>;
  const [kernel, bias] = layer.getWeights();
  if (bias === undefined) {
    throw new UnsupportedLayerError(describe(layer), "bias-free dense layers");
  }
  const weights = transposeDenseKernel(kernel.arraySync() as number[][]);
  const biasArr = bias.arraySync() as number[];
  if (cfg.activation === "softmax") {
    if (!isLast) {
      throw new UnsupportedLayerError(
        describe(layer), "softmax before the final layer");
    }
    return {
      kind: "softmax",
      classes: scalar(cfg.units as number),
      weights,
      bias: biasArr,
    };
  }
  if (isLast) {
    throw new UnsupportedLayerError(
      describe(layer), "final dense layer must have softmax activation");
  }
  return {
    kind: "dense",
    units: scalar(cfg.units as number),
    activation: mapActivation(layer, cfg.activation),
    weights,
    bias: biasArr,
  };
}

/** Build the neutral document for a supported tfjs model. */
export function toDocument(model: tf.LayersModel): {
  doc: ModelDocument;
  mapping: LayerMapping[];
} {
  const inputShape = model.inputs[0].shape; // [batch, length, channels]
  if (inputShape.length !== 3 || inputShape[1] == null || inputShape[2] == null) {
    throw new ShapeError(
      `expected a (length, channels) time-series input, got [${inputShape}]`);
  }
  const layers: LayerDoc[] = [];
  const mapping: LayerMapping[] = [];
  const real = model.layers.filter((l) => l.getClassName() !== "InputLayer");
  let flattenSeen = false;
  real.forEach((layer, i) => {
    const cls = layer.getClassName();
    const isLast = i === real.length - 1;
    let doc: LayerDoc;
    if (cls === "Conv1D") {
      doc = convertConv(layer);
    } else if (cls === "MaxPooling1D") {
      doc = convertPool(layer, "maxpool");
    } else if (cls === "AveragePooling1D") {
      doc = convertPool(layer, "avgpool");
    } else if (cls === "Flatten") {
      flattenSeen = true;
      const size = (layer.outputShape as number[])[1];
      doc = { kind: "flatten", size };
    } else if (cls === "Dense") {
      if (!flattenSeen) {
        throw new UnsupportedLayerError(describe(layer), "dense before flatten");
      }
      doc = convertDense(layer, isLast);
    } else {
      throw new UnsupportedLayerError(describe(layer), `unsupported kind ${cls}`);
    }
    layers.push(doc);
    mapping.push({ source: describe(layer), target: doc.kind });
  });
  return {
    doc: {
      format_version: 1,
      input: { length: inputShape[1], channels: inputShape[2] },
      layers,
    },
    mapping,
  };
}

/** Export `model` to `outPath` and return the manifest. */
export function exportModel(model: tf.LayersModel, outPath: string): ExportManifest {
  const { doc, mapping } = toDocument(model);
  const params = countParams(doc);
  const warnings: string[] = [];
  if (params !== model.countParams()) {
    // the engine has no notion of non-trainable weights; flag, do not hide
    warnings.push(
      `exported ${params} parameters but the source model reports ${model.countParams()}`);
  }
  fs.writeFileSync(outPath, documentToJson(doc) + "\n");
  return {
    source: model.name,
    mapping,
    parameterCount: params,
    outputPath: outPath,
    warnings,
  };
}
