export {
  countParams,
  documentToJson,
} from "./format";
export type {
  ConvLayerDoc,
  DenseLayerDoc,
  FlattenLayerDoc,
  LayerDoc,
  ModelDocument,
  PoolLayerDoc,
  SoftmaxLayerDoc,
} from "./format";
export {
  ExportManifest,
  LayerMapping,
  ShapeError,
  UnsupportedLayerError,
  exportModel,
  permuteConvKernel,
  toDocument,
  transposeDenseKernel,
  unpermuteConvKernel,
} from "./export";
export { loadLayersModelFromDir, saveLayersModelToDir } from "./load";
export { VerifyOptions, VerifyResult, verifyRoundtrip } from "./verify";
export { main } from "./cli";
