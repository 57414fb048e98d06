# Copyright 2026 The progres Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the synthetic product fixtures under data/.

toy_rl: two product catalogs with noisy duplicates (record linkage).
toy_dedup: one catalog containing small duplicate clusters.
Both come with hashed character-trigram embeddings in DVEC format so the
nearest-neighbor family can run without an embedding model.
"""

import csv
import hashlib
import math
import os
import random
import struct

HERE = os.path.dirname(os.path.abspath(__file__))
DIM = 32

BRANDS = ["apple", "samsung", "sony", "lenovo", "dell", "canon", "nikon", "bose",
          "philips", "panasonic", "garmin", "logitech", "asus", "acer", "jbl"]
KINDS = ["laptop", "phone", "camera", "headphones", "speaker", "monitor", "tablet",
         "keyboard", "mouse", "watch", "router", "printer"]
COLORS = ["black", "white", "silver", "blue", "red", "grey"]
EXTRAS = ["wireless", "bluetooth", "portable", "pro", "mini", "ultra", "hd", "4k",
          "compact", "digital", "smart", "gaming", "noise", "cancelling", "usb"]


def model_code(rng):
    letters = "".join(rng.choice("abcdefghjkmnpqrstvwxz") for _ in range(rng.randint(1, 3)))
    return letters + str(rng.randint(10, 9999))


def product(rng):
    words = [rng.choice(BRANDS), rng.choice(KINDS), model_code(rng), rng.choice(COLORS)]
    words += rng.sample(EXTRAS, rng.randint(1, 3))
    return {"name": " ".join(words[:3]), "description": " ".join(words[3:]),
            "price": "%d.%02d" % (rng.randint(20, 2500), rng.randint(0, 99))}


def typo(word, rng):
    if len(word) < 4:
        return word
    i = rng.randrange(len(word) - 1)
    return word[:i] + word[i + 1] + word[i] + word[i + 2:]


def perturb(rec, rng):
    name = rec["name"].split()
    desc = rec["description"].split()
    if rng.random() < 0.4:
        j = rng.randrange(len(name))
        name[j] = typo(name[j], rng)
    if desc and rng.random() < 0.5:
        desc.pop(rng.randrange(len(desc)))
    if rng.random() < 0.3:
        desc.append(rng.choice(EXTRAS))
    rng.shuffle(desc)
    price = rec["price"] if rng.random() < 0.5 else "%.2f" % (float(rec["price"]) * 1.05)
    return {"name": " ".join(name), "description": " ".join(desc), "price": price}


def embed(text):
    # Signed feature hashing of character trigrams, L2-normalized.
    v = [0.0] * DIM
    padded = " " + text.lower() + " "
    for i in range(len(padded) - 2):
        h = hashlib.blake2b(padded[i:i + 3].encode(), digest_size=8).digest()
        slot = h[0] % DIM
        v[slot] += 1.0 if h[1] & 1 else -1.0
    n = math.sqrt(sum(x * x for x in v)) or 1.0
    return [x / n for x in v]


def write_dvec(path, rows):
    with open(path, "wb") as f:
        f.write(b"DVEC")
        f.write(struct.pack("<II", len(rows), DIM))
        for r in rows:
            f.write(struct.pack("<%df" % DIM, *r))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def text_of(rec):
    return " ".join([rec["name"], rec["description"], rec["price"]])


def record_linkage(rng, out):
    os.makedirs(out, exist_ok=True)
    n_a, n_b, n_dup = 120, 150, 100
    a = [product(rng) for _ in range(n_a)]
    b = [perturb(a[i], rng) for i in range(n_dup)] + [product(rng) for _ in range(n_b - n_dup)]
    order = list(range(n_b))
    rng.shuffle(order)
    b = [b[i] for i in order]
    ids_a = ["a%03d" % i for i in range(n_a)]
    ids_b = ["b%03d" % i for i in range(n_b)]
    gt = sorted((ids_a[src], ids_b[pos]) for pos, src in enumerate(order) if src < n_dup)
    header = ["id", "name", "description", "price"]
    write_csv(os.path.join(out, "a.csv"), header,
              [[ids_a[i], r["name"], r["description"], r["price"]] for i, r in enumerate(a)])
    write_csv(os.path.join(out, "b.csv"), header,
              [[ids_b[i], r["name"], r["description"], r["price"]] for i, r in enumerate(b)])
    write_csv(os.path.join(out, "gt.csv"), ["id_a", "id_b"], gt)
    write_dvec(os.path.join(out, "hash32_a.dvec"), [embed(text_of(r)) for r in a])
    write_dvec(os.path.join(out, "hash32_b.dvec"), [embed(text_of(r)) for r in b])


def deduplication(rng, out):
    os.makedirs(out, exist_ok=True)
    records, clusters = [], []
    for _ in range(50):
        base = product(rng)
        size = rng.choice([1, 1, 2, 2, 3])
        members = [base] + [perturb(base, rng) for _ in range(size - 1)]
        clusters.append(list(range(len(records), len(records) + size)))
        records += members
    order = list(range(len(records)))
    rng.shuffle(order)
    position = {src: pos for pos, src in enumerate(order)}
    ids = ["r%03d" % i for i in range(len(records))]
    gt = []
    for c in clusters:
        pos = sorted(position[m] for m in c)
        gt += [(ids[pos[i]], ids[pos[j]]) for i in range(len(pos)) for j in range(i + 1, len(pos))]
    rows = [records[src] for src in order]
    write_csv(os.path.join(out, "records.csv"), ["id", "name", "description", "price"],
              [[ids[i], r["name"], r["description"], r["price"]] for i, r in enumerate(rows)])
    write_csv(os.path.join(out, "gt.csv"), ["id1", "id2"], sorted(gt))
    write_dvec(os.path.join(out, "hash32.dvec"), [embed(text_of(r)) for r in rows])


if __name__ == "__main__":
    record_linkage(random.Random(7), os.path.join(HERE, "toy_rl"))
    deduplication(random.Random(11), os.path.join(HERE, "toy_dedup"))
