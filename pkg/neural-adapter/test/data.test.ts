import { describe, expect, it } from "vitest";

import { formatDump, parsePredictTsv, parseTrainTsv } from "../src/data.js";

describe("parseTrainTsv", () => {
  it("parses lemma/tags/form rows", () => {
    const examples = parseTrainTsv("walk\tV;PST\twalked\nsing\tV;PST\tsang\n");
    expect(examples).toEqual([
      { lemma: "walk", tags: ["V", "PST"], form: "walked" },
      { lemma: "sing", tags: ["V", "PST"], form: "sang" },
    ]);
  });

  it("skips blank lines", () => {
    expect(parseTrainTsv("a\tV\tb\n\nc\tV\td\n")).toHaveLength(2);
  });

  it("rejects bad rows with a line number", () => {
    expect(() => parseTrainTsv("a\tV\tb\nbad row\n")).toThrow(/line 2/);
    expect(() => parseTrainTsv("a\t\tb\n")).toThrow(/line 1/);
  });
});

describe("parsePredictTsv", () => {
  it("parses id/lemma/tags rows", () => {
    expect(parsePredictTsv("7\twalk\tV;PST\n")).toEqual([
      { id: 7, lemma: "walk", tags: ["V", "PST"] },
    ]);
  });

  it("rejects non-integer ids", () => {
    expect(() => parsePredictTsv("x\twalk\tV\n")).toThrow(/bad example id/);
  });
});

describe("formatDump", () => {
  it("emits contiguous 1-based ranks per item", () => {
    const text = formatDump(
      [
        { id: 0, lemma: "walk", tags: ["V", "PST"] },
        { id: 1, lemma: "sing", tags: ["V"] },
      ],
      [
        [
          { form: "walked", logLikelihood: -0.1 },
          { form: "walkt", logLikelihood: -2.5 },
        ],
        [{ form: "sang", logLikelihood: 0 }],
      ]
    );
    expect(text).toBe(
      "0\twalk\tV;PST\t1\twalked\t-0.1\n" +
        "0\twalk\tV;PST\t2\twalkt\t-2.5\n" +
        "1\tsing\tV\t1\tsang\t0\n"
    );
  });

  it("rejects positive or non-finite log-likelihoods", () => {
    const item = [{ id: 0, lemma: "a", tags: ["V"] }];
    expect(() => formatDump(item, [[{ form: "b", logLikelihood: 0.5 }]])).toThrow();
    expect(() => formatDump(item, [[{ form: "b", logLikelihood: NaN }]])).toThrow();
  });
});
