"""Structured text serialization for networks and trees ("mfnet-v1").

Weights are written with Python float repr, which round-trips IEEE doubles
exactly, so save -> load preserves every weight bit-for-bit for the
meanfield and tree kinds.  The raw kind stores the same architecture with
the normalizers folded into the weights (evaluation by plain sums); loading
it unfolds them back into the mean-field convention.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .nets import MeanFieldNet, NeuralTree

MAGIC = "mfnet-v1"
KINDS = ("meanfield", "raw", "tree")


def _fmt_matrix(name, a):
    a = np.atleast_2d(np.asarray(a, float))
    lines = [f"layer {name} {a.shape[0]} {a.shape[1]}"]
    for row in a:
        lines.append(" ".join(repr(float(v)) for v in row))
    return lines


def _net_normalizers(net):
    d1 = net.input_dim + 1
    return [d1] + list(net.widths)


def dumps_net(net: MeanFieldNet, kind="meanfield"):
    if kind not in ("meanfield", "raw"):
        raise ValueError(f"unknown net kind {kind!r}")
    layers = net.layers()
    if kind == "raw":
        layers = [a / n for a, n in zip(layers, _net_normalizers(net))]
    lines = [
        MAGIC,
        f"kind {kind}",
        f"depth {net.depth}",
        f"input_dim {net.input_dim}",
        "widths " + ",".join(str(m) for m in net.widths),
    ]
    names = ["inner"] + [f"mid{l}" for l in range(net.depth - 1)] + ["outer"]
    for name, a in zip(names, layers):
        lines.extend(_fmt_matrix(name, a))
    return "\n".join(lines) + "\n"


def dumps_tree(tree: NeuralTree):
    lines = [
        MAGIC,
        "kind tree",
        f"depth {tree.depth}",
        f"input_dim {tree.input_dim}",
        "branching " + ",".join(str(b) for b in tree.branching),
    ]
    names = ["level0"] + [f"level{l}" for l in range(1, tree.depth)] + ["outer"]
    arrays = [tree.level0, *tree.levels, tree.outer]
    for name, a in zip(names, arrays):
        lines.extend(_fmt_matrix(name, a))
    return "\n".join(lines) + "\n"


def _parse(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != MAGIC:
        raise ShapeError(f"missing {MAGIC} header")
    meta = {}
    arrays = {}
    order = []
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        if parts[0] == "layer":
            name, rows, cols = parts[1], int(parts[2]), int(parts[3])
            block = []
            for r in range(rows):
                i += 1
                vals = [float(v) for v in lines[i].split()]
                if len(vals) != cols:
                    raise ShapeError(f"layer {name}: row {r} has {len(vals)} values, expected {cols}")
                block.append(vals)
            arrays[name] = np.array(block)
            order.append(name)
        else:
            meta[parts[0]] = " ".join(parts[1:])
        i += 1
    return meta, arrays, order


def loads(text):
    """Parse an mfnet-v1 string into a MeanFieldNet or NeuralTree."""
    meta, arrays, _ = _parse(text)
    kind = meta.get("kind")
    if kind not in KINDS:
        raise ShapeError(f"unknown kind {kind!r}")
    depth = int(meta["depth"])
    input_dim = int(meta["input_dim"])
    if kind == "tree":
        branching = tuple(int(b) for b in meta["branching"].split(","))
        levels = tuple(arrays[f"level{l}"].ravel() for l in range(1, depth))
        return NeuralTree(
            branching, input_dim, arrays["level0"], levels, arrays["outer"].ravel()
        )
    widths = tuple(int(m) for m in meta["widths"].split(","))
    inner = arrays["inner"]
    mids = tuple(arrays[f"mid{l}"] for l in range(depth - 1))
    outer = arrays["outer"].ravel()
    if kind == "raw":
        norms = [input_dim + 1] + list(widths)
        inner = inner * norms[0]
        mids = tuple(a * n for a, n in zip(mids, norms[1:-1]))
        outer = outer * norms[-1]
    net = MeanFieldNet(inner, mids, outer)
    if net.depth != depth or net.widths != widths or net.input_dim != input_dim:
        raise ShapeError("declared architecture disagrees with the stored layers")
    return net


def save(obj, path, kind=None):
    """Write a net or tree to path; kind defaults to the natural one."""
    if isinstance(obj, NeuralTree):
        text = dumps_tree(obj)
    elif isinstance(obj, MeanFieldNet):
        text = dumps_net(obj, kind or "meanfield")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    with open(path, "w") as fh:
        fh.write(text)


def load(path):
    with open(path) as fh:
        return loads(fh.read())
