/**
 * Character-level encoder-decoder with dot-product attention, built on
 * tfjs layers.  The encoder reads lemma characters plus tag tokens; the
 * decoder emits form characters with teacher forcing during training and
 * batched beam search at prediction time.
 *
 * Models persist to a self-contained directory: manifest.json carries the
 * hyperparameters and vocabularies needed to rebuild the graph, and
 * weights.json carries the parameters as plain float arrays, so a model
 * directory can be relocated freely and reloaded without tfjs IO handlers.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import * as tf from "@tensorflow/tfjs";

import { beamSearch } from "./beam.js";
import { Hypothesis, PredictItem } from "./data.js";
import {
  buildInputVocab,
  buildOutputVocab,
  encodeInput,
  EOS,
  Example,
  padTo,
  SOS,
  Vocab,
} from "./vocab.js";

export interface Hyper {
  embedDim: number;
  hiddenDim: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  maxInLen: number;
  maxOutLen: number;
}

export const DEFAULT_HYPER: Omit<Hyper, "maxInLen" | "maxOutLen"> = {
  embedDim: 32,
  hiddenDim: 64,
  epochs: 60,
  batchSize: 32,
  learningRate: 0.01,
  seed: 0,
};

interface Graph {
  trainModel: tf.LayersModel;
  encoderModel: tf.LayersModel;
  decoderStep: tf.LayersModel;
}

function buildGraph(hyper: Hyper, inVocabSize: number, outVocabSize: number): Graph {
  const init = (offset: number) => tf.initializers.glorotUniform({ seed: hyper.seed + offset });

  const encEmbed = tf.layers.embedding({
    inputDim: inVocabSize,
    outputDim: hyper.embedDim,
    embeddingsInitializer: init(1),
    name: "enc_embed",
  });
  const encLstm = tf.layers.lstm({
    units: hyper.hiddenDim,
    returnSequences: true,
    returnState: true,
    kernelInitializer: init(2),
    recurrentInitializer: init(3),
    name: "enc_lstm",
  });
  const decEmbed = tf.layers.embedding({
    inputDim: outVocabSize,
    outputDim: hyper.embedDim,
    embeddingsInitializer: init(4),
    name: "dec_embed",
  });
  const decLstm = tf.layers.lstm({
    units: hyper.hiddenDim,
    returnSequences: true,
    returnState: true,
    kernelInitializer: init(5),
    recurrentInitializer: init(6),
    name: "dec_lstm",
  });
  const attnScores = tf.layers.dot({ axes: [2, 2], name: "attn_scores" });
  const attnWeights = tf.layers.activation({ activation: "softmax", name: "attn_weights" });
  const attnContext = tf.layers.dot({ axes: [2, 1], name: "attn_context" });
  const concat = tf.layers.concatenate({ name: "attn_concat" });
  const output = tf.layers.dense({
    units: outVocabSize,
    activation: "softmax",
    kernelInitializer: init(7),
    name: "out_dense",
  });

  // training graph (teacher forcing over full sequences)
  const encIn = tf.input({ shape: [hyper.maxInLen], name: "enc_in" });
  const decIn = tf.input({ shape: [hyper.maxOutLen], name: "dec_in" });
  const encStates = encLstm.apply(encEmbed.apply(encIn)) as tf.SymbolicTensor[];
  const [encSeq, encH, encC] = encStates;
  const decStates = decLstm.apply(decEmbed.apply(decIn), {
    initialState: [encH, encC],
  }) as tf.SymbolicTensor[];
  const decSeq = decStates[0];
  const scores = attnScores.apply([decSeq, encSeq]) as tf.SymbolicTensor;
  const weights = attnWeights.apply(scores) as tf.SymbolicTensor;
  const context = attnContext.apply([weights, encSeq]) as tf.SymbolicTensor;
  const probs = output.apply(concat.apply([decSeq, context])) as tf.SymbolicTensor;
  const trainModel = tf.model({ inputs: [encIn, decIn], outputs: probs, name: "train" });

  // inference graphs sharing the same layers
  const encoderModel = tf.model({
    inputs: encIn,
    outputs: [encSeq, encH, encC],
    name: "encoder",
  });

  const stepTok = tf.input({ shape: [1], name: "step_tok" });
  const stepH = tf.input({ shape: [hyper.hiddenDim], name: "step_h" });
  const stepC = tf.input({ shape: [hyper.hiddenDim], name: "step_c" });
  const stepEnc = tf.input({ shape: [hyper.maxInLen, hyper.hiddenDim], name: "step_enc" });
  const stepOut = decLstm.apply(decEmbed.apply(stepTok), {
    initialState: [stepH, stepC],
  }) as tf.SymbolicTensor[];
  const [stepSeq, stepH2, stepC2] = stepOut;
  const stepScores = attnScores.apply([stepSeq, stepEnc]) as tf.SymbolicTensor;
  const stepWeights = attnWeights.apply(stepScores) as tf.SymbolicTensor;
  const stepContext = attnContext.apply([stepWeights, stepEnc]) as tf.SymbolicTensor;
  const stepProbs = output.apply(concat.apply([stepSeq, stepContext])) as tf.SymbolicTensor;
  const decoderStep = tf.model({
    inputs: [stepTok, stepH, stepC, stepEnc],
    outputs: [stepProbs, stepH2, stepC2],
    name: "decoder_step",
  });

  return { trainModel, encoderModel, decoderStep };
}

export class InflectionModel {
  private constructor(
    readonly hyper: Hyper,
    readonly inVocab: Vocab,
    readonly outVocab: Vocab,
    private readonly graph: Graph
  ) {}

  static async train(
    examples: Example[],
    hyper: Omit<Hyper, "maxInLen" | "maxOutLen"> = DEFAULT_HYPER,
    log: (msg: string) => void = () => {}
  ): Promise<InflectionModel> {
    if (examples.length === 0) {
      throw new Error("training file contains no examples");
    }
    const inVocab = buildInputVocab(examples);
    const outVocab = buildOutputVocab(examples);
    const maxInLen =
      Math.max(...examples.map((e) => e.lemma.length + 1 + e.tags.length)) + 2;
    const maxOutLen = Math.max(...examples.map((e) => e.form.length)) + 3;
    const full: Hyper = { ...hyper, maxInLen, maxOutLen };
    const graph = buildGraph(full, inVocab.size, outVocab.size);

    const encRows = examples.map((e) =>
      padTo(encodeInput(inVocab, e.lemma, e.tags), maxInLen)
    );
    const sos = outVocab.id(SOS);
    const eos = outVocab.id(EOS);
    const decRows = examples.map((e) =>
      padTo([sos, ...[...e.form].map((ch) => outVocab.id(ch))], maxOutLen)
    );
    const targetRows = examples.map((e) =>
      padTo([...[...e.form].map((ch) => outVocab.id(ch)), eos], maxOutLen)
    );

    graph.trainModel.compile({
      optimizer: tf.train.adam(full.learningRate),
      loss: "sparseCategoricalCrossentropy",
    });
    const encT = tf.tensor2d(encRows, [examples.length, maxInLen]);
    const decT = tf.tensor2d(decRows, [examples.length, maxOutLen]);
    // Sparse targets need an explicit trailing axis to match the 3-D output.
    const tgtT = tf.tensor3d(
      targetRows.map((row) => row.map((v) => [v])),
      [examples.length, maxOutLen, 1]
    );
    try {
      await graph.trainModel.fit([encT, decT], tgtT, {
        epochs: full.epochs,
        batchSize: full.batchSize,
        shuffle: false, // keep training order fixed for reproducibility
        verbose: 0,
        callbacks: {
          onEpochEnd: async (epoch, logs) => {
            if ((epoch + 1) % 10 === 0) {
              log(`epoch ${epoch + 1}/${full.epochs} loss=${logs?.loss?.toFixed(4)}`);
            }
          },
        },
      });
    } finally {
      encT.dispose();
      decT.dispose();
      tgtT.dispose();
    }
    return new InflectionModel(full, inVocab, outVocab, graph);
  }

  /** Beam-search the n best forms for one item; scores are summed log p. */
  predict(item: PredictItem, beamWidth: number): Hypothesis[] {
    const encRow = padTo(
      encodeInput(this.inVocab, item.lemma, item.tags),
      this.hyper.maxInLen
    );
    const encT = tf.tensor2d([encRow], [1, this.hyper.maxInLen]);
    const [encSeqT, encHT, encCT] = this.graph.encoderModel.predict(encT) as tf.Tensor[];
    const encSeq = encSeqT.dataSync() as Float32Array;
    const h0 = Array.from(encHT.dataSync());
    const c0 = Array.from(encCT.dataSync());
    tf.dispose([encT, encSeqT, encHT, encCT]);

    const hidden = this.hyper.hiddenDim;
    const eos = this.outVocab.id(EOS);
    const sos = this.outVocab.id(SOS);
    type State = { h: number[]; c: number[] };

    const step = (lastTokens: number[], states: State[]) => {
      const n = lastTokens.length;
      return tf.tidy(() => {
        const tok = tf.tensor2d(lastTokens.map((t) => [t]), [n, 1]);
        const h = tf.tensor2d(states.map((s) => s.h), [n, hidden]);
        const c = tf.tensor2d(states.map((s) => s.c), [n, hidden]);
        const enc = tf
          .tensor3d(encSeq, [1, this.hyper.maxInLen, hidden])
          .tile([n, 1, 1]);
        const [probsT, h2T, c2T] = this.graph.decoderStep.predict([
          tok,
          h,
          c,
          enc,
        ]) as tf.Tensor[];
        const logProbsFlat = probsT.log().dataSync() as Float32Array;
        const vocab = this.outVocab.size;
        const h2 = h2T.dataSync() as Float32Array;
        const c2 = c2T.dataSync() as Float32Array;
        const logProbs: number[][] = [];
        const nextStates: State[] = [];
        for (let b = 0; b < n; b++) {
          logProbs.push(Array.from(logProbsFlat.subarray(b * vocab, (b + 1) * vocab)));
          nextStates.push({
            h: Array.from(h2.subarray(b * hidden, (b + 1) * hidden)),
            c: Array.from(c2.subarray(b * hidden, (b + 1) * hidden)),
          });
        }
        return { logProbs, nextStates };
      });
    };

    const raw = beamSearch(
      { h: h0, c: c0 },
      sos,
      eos,
      beamWidth,
      this.hyper.maxOutLen,
      step
    );

    // decode, drop specials/empties, dedupe by surface form (best score wins)
    const best = new Map<string, number>();
    for (const hyp of raw) {
      const form = hyp.tokenIds
        .filter((t) => t >= 4) // skip PAD/SOS/EOS/UNK
        .map((t) => this.outVocab.token(t))
        .join("");
      if (form === "") continue;
      const score = Math.min(hyp.score, 0);
      if (!best.has(form) || best.get(form)! < score) best.set(form, score);
    }
    if (best.size === 0) {
      // degenerate decode: fall back to copying the lemma
      return [{ form: item.lemma, logLikelihood: -1e-6 }];
    }
    return [...best.entries()]
      .map(([form, logLikelihood]) => ({ form, logLikelihood }))
      .sort(
        (a, b) => b.logLikelihood - a.logLikelihood || a.form.localeCompare(b.form)
      )
      .slice(0, beamWidth);
  }

  async save(modelDir: string, meta: Record<string, unknown>): Promise<void> {
    fs.mkdirSync(modelDir, { recursive: true });
    const weights = this.graph.trainModel.getWeights().map((w) => ({
      shape: w.shape,
      data: Array.from(w.dataSync()),
    }));
    const manifest = {
      format: "neural-adapter-v1",
      hyper: this.hyper,
      inVocab: this.inVocab.toJSON(),
      outVocab: this.outVocab.toJSON(),
      ...meta,
    };
    fs.writeFileSync(path.join(modelDir, "manifest.json"), JSON.stringify(manifest));
    fs.writeFileSync(path.join(modelDir, "weights.json"), JSON.stringify(weights));
  }

  static load(modelDir: string): InflectionModel {
    const manifestPath = path.join(modelDir, "manifest.json");
    if (!fs.existsSync(manifestPath)) {
      throw new Error(`model directory ${modelDir} is not trained (no manifest.json)`);
    }
    const manifest = JSON.parse(fs.readFileSync(manifestPath, "utf-8"));
    if (manifest.format !== "neural-adapter-v1") {
      throw new Error(`unsupported model format ${manifest.format}`);
    }
    const weights = JSON.parse(
      fs.readFileSync(path.join(modelDir, "weights.json"), "utf-8")
    ) as { shape: number[]; data: number[] }[];
    const inVocab = new Vocab(manifest.inVocab);
    const outVocab = new Vocab(manifest.outVocab);
    const graph = buildGraph(manifest.hyper, inVocab.size, outVocab.size);
    graph.trainModel.setWeights(
      weights.map((w) => tf.tensor(w.data, w.shape as [number]))
    );
    return new InflectionModel(manifest.hyper, inVocab, outVocab, graph);
  }
}
