"""Writes the bundled three-word fixture.

Planted design: "alak" and "serbesa" share one drinking sense, "bangko" has
a money sense and a bench sense. Each sense vocabulary is disjoint, and
every sentence draws most of its sense vocabulary, so bag-of-words mock
embeddings cluster by sense. Filler sentences carry seed candidates that
the seed policy rejects.

Run from this directory: python3 generate.py
"""

import json
import random

SENSES = {
    "drink": "inom bote baso malamig tagay pulutan yelo barkada gabi kanto sarap pait tindahan mesa lasing kwentuhan".split(),
    "money": "pera deposito ipon utang teller tseke account interes sahod padala sangay pila pautang resibo libreta kahera".split(),
    "bench": "upo parke kahoy lilim puno hapon pahinga matanda plaza simbahan harap pintura luma mahaba tabi hangin".split(),
}
PLANTED = [("alak", "drink"), ("serbesa", "drink"), ("bangko", "money"), ("bangko", "bench")]
SOURCES = ["books", "news", "forums", "social", "wiki"]
PER_SENSE = 36
CONTEXT = 14
FILLER = "ulan araw dagat bundok jeep trapiko palengke kalye".split()


def sentence(rng, target, vocab):
    words = rng.sample(vocab, CONTEXT) + [target]
    rng.shuffle(words)
    return " ".join(words) + "."


def main():
    rng = random.Random(20240901)
    sentences = []
    for target, sense in PLANTED:
        for _ in range(PER_SENSE):
            sentences.append(sentence(rng, target, SENSES[sense]))
    for i in range(24):
        words = rng.sample(FILLER, 5)
        if i < 4:
            words.append("kape")
        sentences.append("Maynila sa " + " ".join(words) + ".")
    rng.shuffle(sentences)

    with open("docs.jsonl", "w") as out:
        for d in range(0, len(sentences), 4):
            doc = {
                "doc_id": f"doc{d // 4:03d}",
                "text": " ".join(sentences[d : d + 4]),
                "source_type": SOURCES[(d // 4) % len(SOURCES)],
                "year": 2015 + (d // 4) % 8,
            }
            out.write(json.dumps(doc, ensure_ascii=False) + "\n")

    with open("seeds.txt", "w") as out:
        out.write("\n".join(["alak", "serbesa", "bangko", "Maynila", "sa", "kape"]) + "\n")

    eval_rng = random.Random(7)
    refs = [("alak", "pwn-alak-1", "drink"), ("serbesa", "pwn-serbesa-1", "drink"),
            ("bangko", "pwn-bangko-1", "money"), ("bangko", "pwn-bangko-2", "bench")]
    with open("manifest.jsonl", "w") as out:
        n = 0
        for lemma, ref, sense in refs:
            for _ in range(4):
                rec = {"lemma": lemma, "ref_sense_id": ref,
                       "sentence_text": sentence(eval_rng, lemma, SENSES[sense]),
                       "sentence_embedding_id": f"eval{n:03d}"}
                out.write(json.dumps(rec, ensure_ascii=False) + "\n")
                n += 1
        # A reference sense with no induced counterpart.
        for _ in range(2):
            rec = {"lemma": "bangko", "ref_sense_id": "pwn-bangko-3",
                   "sentence_text": "bangko " + " ".join(eval_rng.sample(FILLER, 6)) + ".",
                   "sentence_embedding_id": f"eval{n:03d}"}
            out.write(json.dumps(rec, ensure_ascii=False) + "\n")
            n += 1

    reference = [
        {"ref_id": "old-00001", "lemmas": ["alak", "serbesa"]},
        {"ref_id": "old-00002", "lemmas": ["bangko"]},
        {"ref_id": "old-00003", "lemmas": ["bangko", "upuan"]},
    ]
    with open("reference.json", "w") as out:
        json.dump(reference, out, indent=2)
        out.write("\n")


if __name__ == "__main__":
    main()
