import * as tf from "@tensorflow/tfjs";

let ready: Promise<void> | null = null;

export function ensureBackend(): Promise<void> {
  if (ready === null) {
    ready = tf.setBackend("cpu").then(() => undefined);
  }
  return ready;
}

/** The stock 460x3 four-stage classifier: 2338 trainable parameters. */
export function buildReferenceModel(): tf.LayersModel {
  const model = tf.sequential();
  model.add(tf.layers.conv1d({
    filters: 8, kernelSize: 8, strides: 1, padding: "valid",
    activation: "relu", inputShape: [460, 3],
  }));
  model.add(tf.layers.maxPooling1d({ poolSize: 3, strides: 3 }));
  for (let i = 0; i < 3; i++) {
    model.add(tf.layers.conv1d({ filters: 8, kernelSize: 8, activation: "relu" }));
    model.add(tf.layers.maxPooling1d({ poolSize: 3 }));
  }
  model.add(tf.layers.flatten());
  model.add(tf.layers.dense({ units: 16, activation: "relu" }));
  model.add(tf.layers.dense({ units: 16, activation: "relu" }));
  model.add(tf.layers.dense({ units: 2, activation: "softmax" }));
  return model;
}

/** Small pipeline with every weight zero: both runtimes must emit an exactly
 * uniform distribution. */
export function buildZeroModel(): tf.LayersModel {
  const zeros = { kernelInitializer: "zeros", biasInitializer: "zeros" } as const;
  const model = tf.sequential();
  model.add(tf.layers.conv1d({
    filters: 4, kernelSize: 3, activation: "relu", inputShape: [20, 2], ...zeros,
  }));
  model.add(tf.layers.maxPooling1d({ poolSize: 2 }));
  model.add(tf.layers.flatten());
  model.add(tf.layers.dense({ units: 8, activation: "relu", ...zeros }));
  model.add(tf.layers.dense({ units: 2, activation: "softmax", ...zeros }));
  return model;
}

export function buildSmallModel(): tf.LayersModel {
  const model = tf.sequential();
  model.add(tf.layers.conv1d({
    filters: 4, kernelSize: 5, strides: 2, activation: "relu", inputShape: [40, 2],
  }));
  model.add(tf.layers.avgPooling1d({ poolSize: 2 }));
  model.add(tf.layers.flatten());
  model.add(tf.layers.dense({ units: 6, activation: "relu" }));
  model.add(tf.layers.dense({ units: 2, activation: "softmax" }));
  return model;
}
