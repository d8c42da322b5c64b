"""Writes cube.node / cube.ele: a jittered 8x8x8-cell grid on [-1, 1]^3,
each cell split into six tetrahedra around its main diagonal (Kuhn split).
Ids are 1-based; perimeter nodes carry marker 1."""

import itertools
import random

N = 9
JITTER = 0.15
random.seed(2024)

h = 2.0 / (N - 1)
ids = {}
lines = []
for k, j, i in itertools.product(range(N), repeat=3):
    p = [-1.0 + i * h, -1.0 + j * h, -1.0 + k * h]
    boundary = 0 in (i, j, k) or N - 1 in (i, j, k)
    if not boundary:
        p = [x + random.uniform(-JITTER, JITTER) * h for x in p]
    ids[i, j, k] = len(ids) + 1
    lines.append(f"{ids[i, j, k]} {p[0]!r} {p[1]!r} {p[2]!r} {int(boundary)}")

with open("cube.node", "w") as f:
    f.write(f"# jittered Kuhn cube, {N}^3 nodes\n{len(ids)} 3 0 1\n")
    f.write("\n".join(lines) + "\n")

tets = []
for i, j, k in itertools.product(range(N - 1), repeat=3):
    for perm in itertools.permutations(range(3)):
        v = [i, j, k]
        path = [ids[tuple(v)]]
        for axis in perm:
            v[axis] += 1
            path.append(ids[tuple(v)])
        tets.append(path)

with open("cube.ele", "w") as f:
    f.write(f"{len(tets)} 4 0\n")
    for e, t in enumerate(tets, 1):
        f.write(f"{e} {' '.join(map(str, t))}\n")
