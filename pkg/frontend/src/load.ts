/**
 * Load a tfjs Layers model saved to disk (model.json plus binary weight
 * shards) without the native node bindings: read the files ourselves and
 * hand tf.loadLayersModel an in-memory artifact.
 */

import * as fs from "fs";
import * as path from "path";
import * as tf from "@tensorflow/tfjs";

export async function loadLayersModelFromDir(dir: string): Promise<tf.LayersModel> {
  const modelPath = fs.statSync(dir).isDirectory()
    ? path.join(dir, "model.json")
    : dir;
  const modelJSON = JSON.parse(fs.readFileSync(modelPath, "utf8")) as tf.io.ModelJSON;
  const artifacts: tf.io.ModelArtifacts = {
    modelTopology: modelJSON.modelTopology,
    format: modelJSON.format,
    generatedBy: modelJSON.generatedBy,
    convertedBy: modelJSON.convertedBy,
  };
  if (modelJSON.weightsManifest != null) {
    const dirName = path.dirname(modelPath);
    const buffers: Buffer[] = [];
    const specs: tf.io.WeightsManifestEntry[] = [];
    for (const group of modelJSON.weightsManifest) {
      for (const shard of group.paths) {
        buffers.push(fs.readFileSync(path.join(dirName, shard)));
      }
      specs.push(...group.weights);
    }
    const blob = Buffer.concat(buffers);
    artifacts.weightSpecs = specs;
    artifacts.weightData = blob.buffer.slice(
      blob.byteOffset, blob.byteOffset + blob.byteLength);
  }
  return tf.loadLayersModel(tf.io.fromMemory(artifacts));
}

/** Save a model into `dir` in the same layout (model.json + weights.bin). */
export async function saveLayersModelToDir(
  model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(tf.io.withSaveHandler(async (artifacts) => {
    const manifest: tf.io.WeightsManifestConfig = [{
      paths: ["weights.bin"],
      weights: artifacts.weightSpecs ?? [],
    }];
    const modelJSON = {
      modelTopology: artifacts.modelTopology,
      format: artifacts.format,
      generatedBy: artifacts.generatedBy,
      convertedBy: artifacts.convertedBy,
      weightsManifest: manifest,
    };
    fs.writeFileSync(path.join(dir, "model.json"), JSON.stringify(modelJSON));
    const data = artifacts.weightData as ArrayBuffer;
    fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(data));
    return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" } };
  }));
}
