// Entry points:
//   validate <manifest.json>
//   smoke-train <manifest.json> [--epochs N] [--out predictions.jsonl]

import { loadManifest, validateManifest } from "./manifest";
import { smokeTrain, writePredictions } from "./train";

function usage(): never {
  console.error(
    "usage: validate <manifest.json>\n" +
      "       smoke-train <manifest.json> [--epochs N] [--out preds.jsonl]"
  );
  process.exit(2);
}

async function main() {
  const [command, manifestPath, ...rest] = process.argv.slice(2);
  if (!command || !manifestPath) usage();

  const manifest = loadManifest(manifestPath);

  if (command === "validate") {
    const report = validateManifest(manifest);
    for (const r of report.rules) {
      console.log(`${r.pass ? "PASS" : "FAIL"}  ${r.id}: ${r.detail}`);
    }
    process.exit(report.pass ? 0 : 1);
  } else if (command === "smoke-train") {
    let epochs = 3;
    let out = "predictions.jsonl";
    for (let i = 0; i < rest.length; i += 2) {
      if (rest[i] === "--epochs") epochs = parseInt(rest[i + 1], 10);
      else if (rest[i] === "--out") out = rest[i + 1];
      else usage();
    }
    if (!Number.isInteger(epochs) || epochs < 0) usage();

    const report = validateManifest(manifest);
    if (!report.pass) {
      console.error("manifest failed validation; refusing to train");
      process.exit(1);
    }
    const result = await smokeTrain(manifest, epochs);
    result.losses.forEach((loss, i) =>
      console.log(`epoch ${i + 1}: loss ${loss.toFixed(4)}`)
    );
    if (epochs > 0) {
      writePredictions(result.predictions, out);
      console.log(`${result.predictions.length} predictions -> ${out}`);
    } else {
      console.log("0 epochs requested: nothing trained, nothing written");
    }
  } else {
    usage();
  }
}

main().catch((err) => {
  console.error(`error: ${err.message ?? err}`);
  process.exit(1);
});
