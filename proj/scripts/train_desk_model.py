#!/usr/bin/env python3
# Copyright 2026 The ab2h Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Trains the desk-scale 784->32->10 MNIST model shipped under fixtures/.

Input is the 5000-sample MNIST subset bundled with mlxtend
(mlxtend/data/data/mnist_5k.csv.gz: 784 pixel columns in [0,255] then the
label). 20 digits per class are held out as the 200-digit test set; the rest
train the model. The C++ code only consumes the CSVs this script writes.

usage: train_desk_model.py mnist_5k.csv.gz fixtures/
"""
import gzip
import os
import sys

import numpy as np
import torch


def main():
    src, out = sys.argv[1], sys.argv[2]
    data = np.loadtxt(gzip.open(src), delimiter=",")
    pixels = data[:, :-1] / 255.0
    labels = data[:, -1].astype(np.int64)

    rng = np.random.default_rng(20240517)
    test_idx = []
    for c in range(10):
        idx = np.flatnonzero(labels == c)
        test_idx.extend(rng.choice(idx, 20, replace=False))
    test_idx = np.array(sorted(test_idx))
    train_mask = np.ones(len(labels), dtype=bool)
    train_mask[test_idx] = False

    torch.manual_seed(7)
    xtr = torch.tensor(pixels[train_mask], dtype=torch.float32)
    ytr = torch.tensor(labels[train_mask])
    model = torch.nn.Sequential(
        torch.nn.Linear(784, 32), torch.nn.ReLU(), torch.nn.Linear(32, 10))
    opt = torch.optim.Adam(model.parameters(), lr=2e-3, weight_decay=1e-4)
    for epoch in range(60):
        perm = torch.randperm(len(xtr))
        for i in range(0, len(xtr), 64):
            b = perm[i:i + 64]
            opt.zero_grad()
            loss = torch.nn.functional.cross_entropy(model(xtr[b]), ytr[b])
            loss.backward()
            opt.step()

    model_dir = os.path.join(out, "desk_model")
    mnist_dir = os.path.join(out, "mnist")
    os.makedirs(model_dir, exist_ok=True)
    os.makedirs(mnist_dir, exist_ok=True)

    layers = [model[0], model[2]]
    for k, layer in enumerate(layers, start=1):
        w = layer.weight.detach().numpy().astype(np.float64)
        b = layer.bias.detach().numpy().astype(np.float64).reshape(-1, 1)
        np.savetxt(os.path.join(model_dir, f"layer{k}_weights.csv"), w,
                   fmt="%.6f", delimiter=",")
        np.savetxt(os.path.join(model_dir, f"layer{k}_bias.csv"), b,
                   fmt="%.6f", delimiter=",")

    # Accuracy of the float model as stored (rounded CSV values).
    ws = [np.loadtxt(os.path.join(model_dir, f"layer{k}_weights.csv"),
                     delimiter=",", ndmin=2) for k in (1, 2)]
    bs = [np.loadtxt(os.path.join(model_dir, f"layer{k}_bias.csv"),
                     delimiter=",", ndmin=1) for k in (1, 2)]
    xte = pixels[test_idx]
    h = np.maximum(xte @ ws[0].T + bs[0], 0.0)
    logits = h @ ws[1].T + bs[1]
    pred = logits.argmax(axis=1)
    acc = float((pred == labels[test_idx]).mean())

    with open(os.path.join(mnist_dir, "test_200.csv"), "w") as fh:
        for i in test_idx:
            row = [str(labels[i])] + [f"{p:.6f}" for p in pixels[i]]
            fh.write(",".join(row) + "\n")
    for c in range(10):
        i = test_idx[list(labels[test_idx]).index(c)]
        np.savetxt(os.path.join(mnist_dir, f"digit_{c}.csv"),
                   pixels[i].reshape(28, 28), fmt="%.6f", delimiter=",")

    with open(os.path.join(model_dir, "MODEL.txt"), "w") as fh:
        fh.write("architecture=784-32(relu)-10\n")
        fh.write("train_samples=%d\n" % int(train_mask.sum()))
        fh.write("test_samples=%d\n" % len(test_idx))
        fh.write("float_test_accuracy=%.4f\n" % acc)
    print("float test accuracy", acc)


if __name__ == "__main__":
    main()
