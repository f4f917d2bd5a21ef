/**
 * The neutral model document consumed by the convstream engine
 * (format_version 1). Conv weights are [filter][channel][tap], dense and
 * softmax weights [out][in]; pooling strides default to the window but are
 * always written explicitly here.
 */

export interface InputShape {
  length: number;
  channels: number;
}

export interface ConvLayerDoc {
  kind: "conv1d";
  filters: number;
  kernel: number;
  stride: number;
  activation: "relu" | "identity";
  weights: number[][][];
  bias: number[];
}

export interface PoolLayerDoc {
  kind: "maxpool" | "avgpool";
  window: number;
  stride: number;
}

export interface FlattenLayerDoc {
  kind: "flatten";
  size: number;
}

export interface DenseLayerDoc {
  kind: "dense";
  units: number;
  activation: "relu" | "identity";
  weights: number[][];
  bias: number[];
}

export interface SoftmaxLayerDoc {
  kind: "softmax";
  classes: number;
  weights: number[][];
  bias: number[];
}

export type LayerDoc =
  | ConvLayerDoc
  | PoolLayerDoc
  | FlattenLayerDoc
  | DenseLayerDoc
  | SoftmaxLayerDoc;

export interface ModelDocument {
  format_version: 1;
  input: InputShape;
  layers: LayerDoc[];
}

function arraySize(a: unknown): number {
  if (Array.isArray(a)) {
    return a.length === 0 ? 0 : a.length * arraySize(a[0]);
  }
  return 1;
}

/** Trainable parameters: every weight and bias entry in the document. */
export function countParams(doc: ModelDocument): number {
  let total = 0;
  for (const layer of doc.layers) {
    if ("weights" in layer) {
      total += arraySize(layer.weights) + arraySize(layer.bias);
    }
  }
  return total;
}

/** Serialize with stable key order; JS number formatting round-trips. */
export function documentToJson(doc: ModelDocument): string {
  return JSON.stringify(doc, null, 1);
}
