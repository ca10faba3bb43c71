#!/usr/bin/env python3
"""Generates the synthetic fixtures under crates/core/fixtures/.

Deterministic: rerunning reproduces the committed files byte for byte.
No real corpus text is used; every document is assembled from templates.
"""
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"
DIMS = ("coherence", "consistency", "fluency", "relevance")


def dump(path, records):
    with open(OUT / path, "w") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Separable corpus: each document shares exactly one unique key token with
# its summary. Both texts lead with the key.

FILLER = (
    "the a of and to in on for with at by from after before over under "
    "team city report season plan market game group local early late new "
    "old small large long short quiet busy open final first second third"
).split()


def separable(rng, start, count):
    pairs = []
    for k in range(start, start + count):
        key = f"key{k:03d}"
        doc = [key] + [rng.choice(FILLER) for _ in range(rng.randint(14, 20))]
        summ = [key] + [rng.choice(FILLER) for _ in range(rng.randint(4, 6))]
        pairs.append({"id": f"sep{k:03d}", "document": " ".join(doc), "summary": " ".join(summ)})
    return pairs


# ---------------------------------------------------------------------------
# News-style pairs with named entities and antonym-bearing words.

TEAMS = ["Fleetwood", "Scunthorpe", "Bradford", "Rochdale", "Blackpool", "Wigan",
         "Oldham", "Burnley", "Preston", "Carlisle", "Walsall", "Gillingham"]
PEOPLE = ["Graham Alexander", "Maria Lopez", "John Carter", "Aisha Khan", "Peter Novak",
          "Elena Rossi", "Samuel Reid", "Hannah Berg", "Omar Haddad", "Claire Dubois"]
CITIES = ["Leeds", "Bristol", "Glasgow", "Cardiff", "Belfast", "Norwich", "Exeter", "York"]
FIRMS = ["Northwind Energy", "Harbor Foods", "Kestrel Bank", "Atlas Rail", "Bluebell Media",
         "Granite Steel", "Orchard Telecom"]
PARTIES = ["Labour", "the Conservatives", "the Greens", "the Liberal Democrats"]


def sport(rng):
    a, b = rng.sample(TEAMS, 2)
    p = rng.choice(PEOPLE)
    city = rng.choice(CITIES)
    ga, gb = rng.randint(1, 4), rng.randint(0, 2)
    doc = (f"{a} won {ga}-{gb} against {b} at home in {city} on Saturday. "
           f"{p}, the {a} manager, said the early goal was good for a young squad. "
           f"{b} had a strong start but lost their shape after the break. "
           f"The result keeps {a} top of the table with a higher goal difference. "
           f"Supporters stayed late to celebrate a happy afternoon. "
           f"{p} admitted the second half was difficult and slow.")
    summ = f"{a} won against {b} in {city} as {p} praised a strong start."
    return doc, summ


def business(rng):
    f1, f2 = rng.sample(FIRMS, 2)
    p = rng.choice(PEOPLE)
    city = rng.choice(CITIES)
    pct = rng.randint(2, 19)
    doc = (f"{f1} reported higher profits of {pct} percent on Tuesday. "
           f"The company, based in {city}, said strong demand offset weak sales abroad. "
           f"Chief executive {p} described the outlook as positive but cautious. "
           f"Rival {f2} cut jobs last month after losses increased. "
           f"Analysts said the gains were early evidence of a recovery. "
           f"Shares rose in quiet trading.")
    summ = f"{f1} reported higher profits as {p} called the outlook positive."
    return doc, summ


def politics(rng):
    party = rng.choice(PARTIES)
    p = rng.choice(PEOPLE)
    city = rng.choice(CITIES)
    n = rng.randint(3, 40)
    doc = (f"{p} won the {city} seat for {party} by {n} votes on Thursday. "
           f"Turnout was low after heavy rain kept voters at home. "
           f"{p} said the victory was a clear signal for local change. "
           f"Opponents accepted the result but promised a strong challenge next year. "
           f"The count finished late and the mood was calm. "
           f"Officials said the process was fair and accurate.")
    summ = f"{p} won the {city} seat for {party} after a late count."
    return doc, summ


def weather(rng):
    city, other = rng.sample(CITIES, 2)
    p = rng.choice(PEOPLE)
    t = rng.randint(12, 31)
    doc = (f"Temperatures in {city} rose to {t} degrees on Monday, the warmest day of the year. "
           f"Forecaster {p} said the hot spell would end early next week. "
           f"{other} stayed cold and cloudy with strong winds. "
           f"Health officials advised people to stay safe and drink water. "
           f"Beaches were busy and roads were slow. "
           f"Rain is likely to return on Friday.")
    summ = f"{city} had its warmest day as {p} said the hot spell would end early."
    return doc, summ


def news_pairs(rng, n):
    makers = [sport, business, politics, weather]
    out = []
    for i in range(n):
        doc, summ = makers[i % len(makers)](rng)
        out.append({"id": f"n{i:03d}", "document": doc, "summary": summ})
    return out


# ---------------------------------------------------------------------------
# Evaluation grids. Each system corrupts the reference summary to a fixed
# degree; human ratings fall with the degree plus per-dimension noise.

def corrupt(rng, summary, level):
    words = summary.split()
    out = []
    for w in words:
        if rng.random() < level * 0.5:
            continue
        out.append(w)
    if level > 0.6:
        rng.shuffle(out)
    return " ".join(out) if out else words[0]


def eval_grid(rng, pairs, systems, examples, skip=(), noise=0.6):
    levels = [i / max(1, systems - 1) for i in range(systems)]
    records = []
    for e in range(examples):
        pair = pairs[e]
        for s in range(systems):
            if (e, s) in skip:
                continue
            lvl = levels[s]
            summ = corrupt(rng, pair["summary"], lvl)
            human = {}
            for d in DIMS:
                base = 5.0 - 3.5 * lvl
                human[d] = round(min(5.0, max(1.0, base + rng.uniform(-noise, noise))), 2)
            records.append({"example_id": pair["id"], "system_id": f"sys{s:02d}",
                            "document": pair["document"], "summary": summ, "human": human})
    return records


def tokenizer_text(rng, n):
    """n whitespace-separated chunks mixing words, numbers and punctuation."""
    words = ["league", "Fleetwood", "won't", "well-known", "U.S.", "3.5", "100%", "e-mail",
             "Alexander’s", "café", "naïve", "co-op", "goal", "Leeds"]
    lead = ["", "", "", "(", "\"", "“", "[", "¿", "'", "$"]
    trail = ["", "", "", ".", ",", "!", "?", ")", "\"", "”", "...", ";", ":", ".)", "—"]
    spaces = [" ", " ", " ", "  ", "\t", "\n"]
    chunks = []
    for _ in range(n):
        r = rng.random()
        if r < 0.04:
            chunks.append(rng.choice(["--", "...", "—", "!?", "&"]))
        else:
            chunks.append(rng.choice(lead) + rng.choice(words) + rng.choice(trail))
    out = chunks[0]
    for c in chunks[1:]:
        out += rng.choice(spaces) + c
    return out + "\n"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240601)
    dump("separable_train.jsonl", separable(rng, 0, 64))
    dump("separable_heldout.jsonl", separable(rng, 64, 32))

    pairs = news_pairs(random.Random(7), 100)
    dump("pairs_100.jsonl", pairs)

    (OUT / "tokenizer_1000.txt").write_text(tokenizer_text(random.Random(15), 1000), encoding="utf-8")

    dump("eval_pipeline.jsonl", eval_grid(random.Random(11), pairs, 8, 12))
    dump("eval_4x5.jsonl", eval_grid(random.Random(12), pairs, 4, 5, noise=2.5))
    # Fixed model scores for the 4x5 grid, used by the tau oracle test.
    srng = random.Random(14)
    with open(OUT / "scores_4x5.tsv", "w") as f:
        for e in range(5):
            for s in range(4):
                f.write(f"{pairs[e]['id']}\tsys{s:02d}\t{round(srng.uniform(-0.2, 0.9), 4)}\n")
    dump("eval_ragged.jsonl", eval_grid(random.Random(13), pairs, 3, 5, skip={(1, 2), (3, 2)}))


if __name__ == "__main__":
    main()
