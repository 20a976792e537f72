#!/usr/bin/env python3
"""Generate a synthetic agglutinative corpus as UniMorph-style TSV.

Example:
    python scripts/generate_corpus.py --stems 200 --triples 4200 --seed 11 \
        --out data/synth.tsv
"""

import argparse
from pathlib import Path

from almorph.corpus import ColumnOrder, serialize
from almorph.synthlang import SynthConfig, generate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--stems", type=int, default=200)
    ap.add_argument("--triples", type=int, default=4200)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument(
        "--order",
        type=ColumnOrder,
        default=ColumnOrder.LEMMA_FORM_TAGS,
        choices=list(ColumnOrder),
    )
    ap.add_argument("--out", required=True)
    args = ap.parse_args()

    data = generate(SynthConfig(n_stems=args.stems, n_triples=args.triples, rng_seed=args.seed))
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(serialize(data, args.order), "utf-8")
    print(f"wrote {len(data)} triples to {out}")


if __name__ == "__main__":
    main()
