# # EER, FRR at fixed FAR, and fusion
#
# Synthetic embeddings stand in for trained face and speaker models: each
# identity has a prototype vector, and every capture adds noise.

# -
import numpy as np

from tinydse.bioeval import Embedding, ScoreSet, distance, eer, frr_at_far, fuse, histogram, roc

rng = np.random.default_rng(0)
n_ids, dim = 50, 64
protos = {m: rng.normal(size=(n_ids, dim)) for m in ("face", "voice")}
noise = {"face": 1.0, "voice": 1.3}


def capture(modality, identity):
    v = protos[modality][identity] + noise[modality] * rng.normal(size=dim)
    return Embedding(v, modality).normalized()


# -
scores = {"face": [], "voice": [], "fusion": []}
for k in range(4000):
    same = k % 2 == 0
    a = int(rng.integers(n_ids))
    b = a if same else int((a + 1 + rng.integers(n_ids - 1)) % n_ids)
    label = "same" if same else "different"
    face = (capture("face", a), capture("face", b))
    voice = (capture("voice", a), capture("voice", b))
    scores["face"].append((label, distance(*face)))
    scores["voice"].append((label, distance(*voice)))
    scores["fusion"].append((label, fuse(face, voice)))

# -
# Fusion concatenates the two unit embeddings, so the fused distance is the
# root of the summed squared distances. Independent errors average out.

for source, pairs in scores.items():
    curve = roc(ScoreSet.from_pairs(pairs))
    cells = [f"EER {100 * eer(curve):5.2f}%"]
    for far in (0.01, 0.10):
        _, frr = frr_at_far(curve, far)
        cells.append(f"FRR@{100 * far:g}% {100 * frr:5.2f}%")
    print(f"{source:<7}" + "  ".join(cells))

# -
# Distance histogram for the face branch, 15 bins over [0.4, 1.7].

h = histogram(ScoreSet.from_pairs(scores["face"]))
for lo, s, d in zip(h.edges[:-1], h.same, h.different):
    print(f"{lo:5.2f} {'#' * (s // 20):<30} {'.' * (d // 20)}")
