// Toy-scale training smoke test.
//
// This is an ecosystem-compatibility check, not a detector: a small dense
// network learns to classify ground-truth boxes from their normalized
// geometry, which is enough to prove that a generated corpus feeds a
// standard training loop (tensors in, decreasing loss out) and that the
// resulting predictions are consumable by the primary evaluation CLI.

import * as fs from "fs";
import * as tf from "@tensorflow/tfjs";
import { CLASS_LABELS, Manifest } from "./manifest";

export interface PredictionRecord {
  image_id: number;
  category_id: number;
  bbox: [number, number, number, number];
  score: number;
}

export interface SmokeTrainResult {
  losses: number[];
  predictions: PredictionRecord[];
}

export const MAX_PAGES = 100;

function features(manifest: Manifest) {
  const dims = new Map(manifest.images.map((im) => [im.id, im]));
  const xs: number[][] = [];
  const ys: number[] = [];
  for (const a of manifest.annotations) {
    const im = dims.get(a.image_id)!;
    const [x, y, w, h] = a.bbox;
    const nw = w / im.width;
    const nh = h / im.height;
    xs.push([
      (x + w / 2) / im.width,
      (y + h / 2) / im.height,
      nw,
      nh,
      nw * nh,
      Math.log(Math.max(1e-6, nw / nh)),
    ]);
    ys.push(a.category_id);
  }
  return { xs, ys };
}

export async function smokeTrain(
  manifest: Manifest,
  epochs: number
): Promise<SmokeTrainResult> {
  if (epochs === 0) {
    return { losses: [], predictions: [] };
  }
  if (manifest.images.length > MAX_PAGES) {
    throw new Error(
      `smoke train is capped at ${MAX_PAGES} pages, got ${manifest.images.length}`
    );
  }
  await tf.setBackend("cpu");

  const { xs, ys } = features(manifest);
  const x = tf.tensor2d(xs);
  const y = tf.oneHot(tf.tensor1d(ys, "int32"), CLASS_LABELS.length);

  // seeded initializers keep the loss curve reproducible
  const model = tf.sequential({
    layers: [
      tf.layers.dense({
        inputShape: [xs[0].length],
        units: 32,
        activation: "relu",
        kernelInitializer: tf.initializers.glorotUniform({ seed: 7 }),
      }),
      tf.layers.dense({
        units: CLASS_LABELS.length,
        activation: "softmax",
        kernelInitializer: tf.initializers.glorotUniform({ seed: 8 }),
      }),
    ],
  });
  model.compile({ optimizer: tf.train.adam(0.01), loss: "categoricalCrossentropy" });

  const losses: number[] = [];
  await model.fit(x, y, {
    epochs,
    batchSize: 64,
    shuffle: false,
    verbose: 0,
    callbacks: {
      onEpochEnd: (_epoch, logs) => {
        losses.push(logs!.loss as number);
      },
    },
  });

  // predictions: one detection per ground-truth box, classified by the model
  const probs = (model.predict(x) as tf.Tensor2D).arraySync();
  const predictions: PredictionRecord[] = manifest.annotations.map((a, i) => {
    const row = probs[i];
    let best = 0;
    for (let c = 1; c < row.length; c++) if (row[c] > row[best]) best = c;
    return {
      image_id: a.image_id,
      category_id: best,
      bbox: a.bbox as [number, number, number, number],
      score: Math.min(0.999, Math.max(0.001, row[best])),
    };
  });

  tf.dispose([x, y]);
  return { losses, predictions };
}

export function writePredictions(records: PredictionRecord[], path: string) {
  const lines = records.map((r) => JSON.stringify(r));
  fs.writeFileSync(path, lines.join("\n") + (lines.length ? "\n" : ""));
}
