#!/usr/bin/env python3
"""Convert an MSD release into the canonical JSON-lines dataset.

Accepted inputs:
  * a JSON array of objects with image id, text and 0/1 label
    (keys default to image_id / text / label, override with --*-key);
  * the older text layout with one Python-literal list per line:
    ['<image id>', '<text>', <label>] or ['<image id>', '<text>', <label1>, <label2>]
    where the last element is the sarcasm label.

Output lines look like
  {"id": "...", "text": "...", "image": "<image-dir>/<id>.jpg", "label": "sarcastic"}

Example:
  python3 scripts/convert_msdd.py test.json msdd_test.jsonl --image-dir images
"""
import argparse
import ast
import json
import sys


def records_from_json(path, id_key, text_key, label_key):
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    for row in data:
        yield str(row[id_key]), row[text_key], int(row[label_key])


def records_from_lines(path):
    with open(path, encoding="utf-8") as f:
        for n, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = ast.literal_eval(line)
            except (ValueError, SyntaxError) as e:
                sys.exit(f"{path}:{n}: cannot parse line: {e}")
            yield str(row[0]), row[1], int(row[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("source")
    ap.add_argument("output")
    ap.add_argument("--image-dir", default="images", help="prefix for image paths (relative to the output file)")
    ap.add_argument("--image-ext", default=".jpg")
    ap.add_argument("--id-key", default="image_id")
    ap.add_argument("--text-key", default="text")
    ap.add_argument("--label-key", default="label")
    args = ap.parse_args()

    with open(args.source, encoding="utf-8") as f:
        first = f.read(1)
        while first.isspace():
            first = f.read(1)
    if first == "[" and args.source.endswith(".json"):
        rows = records_from_json(args.source, args.id_key, args.text_key, args.label_key)
    else:
        rows = records_from_lines(args.source)

    seen = set()
    counts = {"sarcastic": 0, "not_sarcastic": 0}
    with open(args.output, "w", encoding="utf-8") as out:
        for image_id, text, label in rows:
            if image_id in seen:
                sys.exit(f"duplicate id {image_id}")
            seen.add(image_id)
            name = "sarcastic" if label == 1 else "not_sarcastic"
            counts[name] += 1
            image = f"{args.image_dir}/{image_id}{args.image_ext}" if args.image_dir else image_id + args.image_ext
            out.write(json.dumps({"id": image_id, "text": text.strip(), "image": image, "label": name},
                                 ensure_ascii=False) + "\n")
    total = sum(counts.values())
    print(f"wrote {total} samples ({counts['sarcastic']} sarcastic, {counts['not_sarcastic']} not) to {args.output}")


if __name__ == "__main__":
    main()
