"""Brute-force system-level Kendall tau for an eval grid and a scores file.

Aggregates per system with exact rationals, counts concordant/discordant
pairs directly and prints tau_a and tau_b for each human dimension.

    python3 tools/kendall_oracle.py crates/core/fixtures/eval_4x5.jsonl \
        crates/core/fixtures/scores_4x5.tsv
"""
import json
import math
import sys
from fractions import Fraction

DIMS = ["coherence", "consistency", "fluency", "relevance"]


def taus(x, y):
    n = len(x)
    c = d = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            sx = (x[i] > x[j]) - (x[i] < x[j])
            sy = (y[i] > y[j]) - (y[i] < y[j])
            if sx == 0 and sy == 0:
                continue
            if sx == 0:
                tx += 1
            elif sy == 0:
                ty += 1
            elif sx == sy:
                c += 1
            else:
                d += 1
    tau_a = Fraction(c - d, n * (n - 1) // 2)
    denom = (c + d + tx) * (c + d + ty)
    tau_b = None if denom == 0 else (c - d) / math.sqrt(denom)
    return float(tau_a), tau_b


def main(eval_path, scores_path):
    scores = {}
    for line in open(scores_path):
        if line.strip():
            ex, sys_id, v = line.rstrip("\n").split("\t")
            scores[(ex, sys_id)] = Fraction(v)
    model, human = {}, {}
    for line in open(eval_path):
        if not line.strip():
            continue
        r = json.loads(line)
        s = r["system_id"]
        model.setdefault(s, []).append(scores[(r["example_id"], s)])
        human.setdefault(s, []).append([Fraction(str(r["human"][d])) for d in DIMS])
    systems = sorted(model)
    m = [sum(model[s]) / len(model[s]) for s in systems]
    for k, dim in enumerate(DIMS):
        h = [sum(row[k] for row in human[s]) / len(human[s]) for s in systems]
        a, b = taus(m, h)
        print(f"{dim}\ttau_a={a!r}\ttau_b={b!r}")


if __name__ == "__main__":
    main(*sys.argv[1:3])
