/**
 * Generic batched beam search over a stepwise decoder.
 *
 * The decoder is abstracted as a callback that advances every live beam one
 * step at once, so the search itself is a pure function and the model layer
 * only has to expose "given these last tokens and states, what are the next
 * log-probabilities".  Scores are sums of per-step log-probabilities, hence
 * always <= 0 for a proper softmax.
 */

export interface StepResult<S> {
  /** logProbs[b][v] = log p(v | beam b); one row per live beam. */
  logProbs: number[][];
  nextStates: S[];
}

export type StepFn<S> = (lastTokens: number[], states: S[]) => StepResult<S>;

export interface BeamHypothesis {
  tokenIds: number[];
  score: number;
}

interface Live<S> {
  tokens: number[];
  score: number;
  state: S;
}

export function beamSearch<S>(
  initialState: S,
  sosId: number,
  eosId: number,
  beamWidth: number,
  maxLen: number,
  step: StepFn<S>
): BeamHypothesis[] {
  if (beamWidth < 1) throw new RangeError("beamWidth must be >= 1");
  let live: Live<S>[] = [{ tokens: [], score: 0, state: initialState }];
  const done: BeamHypothesis[] = [];

  for (let t = 0; t < maxLen && live.length > 0; t++) {
    const lastTokens = live.map((b) => (b.tokens.length ? b.tokens[b.tokens.length - 1] : sosId));
    const { logProbs, nextStates } = step(lastTokens, live.map((b) => b.state));
    const candidates: Live<S>[] = [];
    for (let b = 0; b < live.length; b++) {
      const row = logProbs[b];
      // only the top beamWidth continuations of each beam can survive
      const order = [...row.keys()].sort((x, y) => row[y] - row[x]).slice(0, beamWidth);
      for (const v of order) {
        candidates.push({
          tokens: [...live[b].tokens, v],
          score: live[b].score + Math.min(row[v], 0),
          state: nextStates[b],
        });
      }
    }
    candidates.sort((a, b) => b.score - a.score);
    live = [];
    for (const cand of candidates) {
      if (cand.tokens[cand.tokens.length - 1] === eosId) {
        if (done.length < 2 * beamWidth) {
          done.push({ tokenIds: cand.tokens.slice(0, -1), score: cand.score });
        }
      } else if (live.length < beamWidth) {
        live.push(cand);
      }
      if (live.length >= beamWidth && done.length >= beamWidth) break;
    }
    if (done.length >= beamWidth) break;
  }
  // beams still running at the length cap count as finished as-is
  for (const b of live) done.push({ tokenIds: b.tokens, score: b.score });
  done.sort((a, b) => b.score - a.score);
  return done.slice(0, beamWidth);
}
