#!/usr/bin/env node
/**
 * External-learner protocol entry point.
 *
 *   cli.js train   --train FILE --dev FILE --model DIR [--epochs N] [--seed N]
 *   cli.js predict --model DIR --input FILE --beam N --output FILE
 *
 * Exit codes: 0 success, 1 failure (message on stderr).  Training and dev
 * files are lemma<TAB>tags<TAB>form; predict input is id<TAB>lemma<TAB>tags;
 * the output dump follows the driver's six-column prediction format.
 */

import * as fs from "node:fs";
import yargs, { Argv } from "yargs";
import { hideBin } from "yargs/helpers";

import { formatDump, parsePredictTsv, parseTrainTsv } from "./data.js";
import { DEFAULT_HYPER, InflectionModel } from "./model.js";

async function runTrain(args: {
  train: string;
  dev: string;
  model: string;
  epochs: number;
  seed: number;
  verbose: boolean;
}): Promise<void> {
  const examples = parseTrainTsv(fs.readFileSync(args.train, "utf-8"));
  const dev = parseTrainTsv(fs.readFileSync(args.dev, "utf-8"));
  const log = args.verbose ? (m: string) => console.error(m) : () => {};
  const model = await InflectionModel.train(
    examples,
    { ...DEFAULT_HYPER, epochs: args.epochs, seed: args.seed },
    log
  );
  await model.save(args.model, {
    nTrain: examples.length,
    nDev: dev.length,
    epochs: args.epochs,
    seed: args.seed,
  });
}

function runPredict(args: {
  model: string;
  input: string;
  beam: number;
  output: string;
}): void {
  const items = parsePredictTsv(fs.readFileSync(args.input, "utf-8"));
  const model = InflectionModel.load(args.model);
  const hypotheses = items.map((item) => model.predict(item, args.beam));
  fs.writeFileSync(args.output, formatDump(items, hypotheses));
}

async function main(): Promise<number> {
  const argv = yargs(hideBin(process.argv))
    .command("train", "train a model", (y: Argv) =>
      y
        .option("train", { type: "string", demandOption: true })
        .option("dev", { type: "string", demandOption: true })
        .option("model", { type: "string", demandOption: true })
        .option("epochs", { type: "number", default: DEFAULT_HYPER.epochs })
        .option("seed", { type: "number", default: DEFAULT_HYPER.seed })
        .option("verbose", { type: "boolean", default: false })
    )
    .command("predict", "emit an n-best prediction dump", (y: Argv) =>
      y
        .option("model", { type: "string", demandOption: true })
        .option("input", { type: "string", demandOption: true })
        .option("beam", { type: "number", demandOption: true })
        .option("output", { type: "string", demandOption: true })
    )
    .demandCommand(1)
    .strict()
    .fail((msg: string | null, err: Error | undefined) => {
      throw err ?? new Error(msg ?? "invalid arguments");
    })
    .parseSync();

  const command = argv._[0];
  if (command === "train") {
    await runTrain(argv as never);
  } else if (command === "predict") {
    if (!Number.isInteger(argv.beam) || (argv.beam as number) < 1) {
      throw new Error(`--beam must be a positive integer, got ${argv.beam}`);
    }
    runPredict(argv as never);
  } else {
    throw new Error(`unknown command ${command}`);
  }
  return 0;
}

main()
  .then((code) => process.exit(code))
  .catch((err) => {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    process.exit(1);
  });
