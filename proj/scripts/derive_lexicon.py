#!/usr/bin/env python3
"""Collapse a synset-based sentiment lexicon to one polarity per word.

Input: the standard tab-separated synset lexicon format

    # POS<TAB>ID<TAB>PosScore<TAB>NegScore<TAB>SynsetTerms<TAB>Gloss
    a	00001740	0.125	0	able#1	(usually followed by `to') having ...

Each synset term `word#sense` contributes (PosScore - NegScore) to `word`.
A word's polarity is the arithmetic mean of its contributions across every
synset it appears in, so frequent neutral senses pull scores toward zero.

Output: `word polarity` lines (the sentiment lexicon file format consumed
by `musekb sentiment --lexicon`), sorted by word, one entry per word.
Multiword terms (underscores) are skipped: the aspect scorer works on
single tokens. Words whose mean polarity is below --min-magnitude are
dropped so the shipped file stays focused on clearly polar vocabulary.
"""
import argparse
import collections
import sys


def parse_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("synset_file", help="synset lexicon (tab-separated)")
    p.add_argument("-o", "--out", default="-",
                   help="output file (default: stdout)")
    p.add_argument("--min-magnitude", type=float, default=0.1,
                   help="drop words with |mean polarity| below this "
                        "(default: 0.1)")
    p.add_argument("--pos", choices=["a", "n", "v", "r"], action="append",
                   help="keep only these part-of-speech sections "
                        "(repeatable; default: all)")
    return p.parse_args()


def main():
    args = parse_args()
    sums = collections.defaultdict(float)
    counts = collections.defaultdict(int)
    with open(args.synset_file, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 5:
                print(f"{args.synset_file}:{lineno}: expected >= 5 "
                      f"tab-separated columns", file=sys.stderr)
                return 1
            pos, _, pos_score, neg_score, terms = cols[:5]
            if args.pos and pos not in args.pos:
                continue
            try:
                delta = float(pos_score) - float(neg_score)
            except ValueError:
                print(f"{args.synset_file}:{lineno}: non-numeric score",
                      file=sys.stderr)
                return 1
            for term in terms.split():
                word = term.rsplit("#", 1)[0].lower()
                if not word or "_" in word:
                    continue
                sums[word] += delta
                counts[word] += 1

    out = sys.stdout if args.out == "-" else open(args.out, "w",
                                                  encoding="utf-8")
    try:
        out.write("# word polarity, one entry per line; polarity in "
                  "[-1, 1].\n")
        kept = 0
        for word in sorted(sums):
            polarity = sums[word] / counts[word]
            if abs(polarity) < args.min_magnitude:
                continue
            out.write(f"{word} {polarity:.4f}\n")
            kept += 1
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"{kept} words kept of {len(sums)}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
