#!/usr/bin/env python3
"""Builds the bundled antonym lexicon from tools/antonym_pairs.txt.

Every pair "a b" contributes a -> b and b -> a. Output lines are
"word: ant1,ant2" sorted by word; antonyms keep first-seen order.
"""
import sys
from collections import OrderedDict
from pathlib import Path

root = Path(__file__).resolve().parent
pairs_path = root / "antonym_pairs.txt"
out_path = root.parent / "crates" / "core" / "resources" / "antonyms.txt"

entries = OrderedDict()
for raw in pairs_path.read_text().splitlines():
    line = raw.split("#", 1)[0].strip()
    if not line:
        continue
    a, b = line.lower().split()
    if a == b:
        sys.exit(f"self-antonym: {a}")
    for w, ant in ((a, b), (b, a)):
        lst = entries.setdefault(w, [])
        if ant not in lst:
            lst.append(ant)

with out_path.open("w") as f:
    f.write("# Generated by tools/build_lexicon.py; edit tools/antonym_pairs.txt instead.\n")
    for word in sorted(entries):
        f.write(f"{word}: {','.join(entries[word])}\n")
print(f"{len(entries)} entries -> {out_path}")
