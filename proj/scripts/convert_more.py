#!/usr/bin/env python3
"""Convert an MSE release (post text plus gold explanation) into the
canonical JSON-lines dataset.

Accepted inputs:
  * a TSV or CSV file with a header row (columns default to pid / text /
    explanation, override with --*-col);
  * a JSON array of objects with the same fields.

Output lines look like
  {"id": "...", "text": "...", "image": "<image-dir>/<id>.jpg", "explanation": "..."}

Example:
  python3 scripts/convert_more.py test_df.tsv more_test.jsonl --image-dir images
"""
import argparse
import csv
import json
import sys


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("source")
    ap.add_argument("output")
    ap.add_argument("--image-dir", default="images")
    ap.add_argument("--image-ext", default=".jpg")
    ap.add_argument("--id-col", default="pid")
    ap.add_argument("--text-col", default="text")
    ap.add_argument("--explanation-col", default="explanation")
    args = ap.parse_args()

    if args.source.endswith(".json"):
        with open(args.source, encoding="utf-8") as f:
            rows = json.load(f)
    else:
        delimiter = "," if args.source.endswith(".csv") else "\t"
        with open(args.source, encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f, delimiter=delimiter))

    seen = set()
    with open(args.output, "w", encoding="utf-8") as out:
        for n, row in enumerate(rows, 1):
            try:
                sample_id = str(row[args.id_col]).strip()
                text = " ".join(str(row[args.text_col]).split())
                explanation = " ".join(str(row[args.explanation_col]).split())
            except KeyError as e:
                sys.exit(f"row {n}: missing column {e}")
            if not explanation:
                sys.exit(f"row {n}: empty explanation for {sample_id}")
            if sample_id in seen:
                sys.exit(f"duplicate id {sample_id}")
            seen.add(sample_id)
            image = f"{args.image_dir}/{sample_id}{args.image_ext}" if args.image_dir else sample_id + args.image_ext
            out.write(json.dumps({"id": sample_id, "text": text, "image": image, "explanation": explanation},
                                 ensure_ascii=False) + "\n")
    print(f"wrote {len(seen)} samples to {args.output}")


if __name__ == "__main__":
    main()
