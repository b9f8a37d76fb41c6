"""Data distributions, random target generators and sample management."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .nets import MeanFieldNet
from .norms import path_norm_proxy


@dataclass(frozen=True)
class DataDistribution:
    """Compactly supported sampling distribution on the cube [-R, R]^d."""

    kind: str  # uniform_cube | sphere_surface | gaussian_clipped
    dim: int
    radius: float = 1.0

    KINDS = ("uniform_cube", "sphere_surface", "gaussian_clipped")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.dim < 1 or self.radius <= 0:
            raise ValueError("need dim >= 1 and radius > 0")

    def sample(self, n, seed):
        rng = np.random.default_rng(seed)
        d, R = self.dim, self.radius
        if n == 0:
            return np.zeros((0, d))
        if self.kind == "uniform_cube":
            return rng.uniform(-R, R, size=(n, d))
        if self.kind == "sphere_surface":
            g = rng.standard_normal((n, d))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            return R * g
        # gaussian_clipped
        return np.clip(rng.standard_normal((n, d)) * (R / 2.0), -R, R)


@dataclass(frozen=True)
class Dataset:
    xs: np.ndarray
    ys: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return self.xs.shape[0]

    def to_csv(self, path):
        header = ",".join(
            [f"x{i}" for i in range(self.xs.shape[1])] + ["y"]
        )
        prov = ";".join(f"{k}={v}" for k, v in self.provenance.items())
        with open(path, "w") as fh:
            fh.write(f"# {prov}\n{header}\n")
            for x, y in zip(self.xs, self.ys):
                fh.write(",".join(repr(float(v)) for v in x) + f",{float(y)!r}\n")


def dataset_from_csv(path):
    """Read a dataset written by Dataset.to_csv (provenance comment, header)."""
    provenance = {}
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if lines and lines[0].startswith("#"):
        for item in lines.pop(0)[1:].strip().split(";"):
            if "=" in item:
                k, v = item.split("=", 1)
                provenance[k.strip()] = v.strip()
    if not lines or not lines[0].startswith("x0"):
        raise ValueError(f"{path}: expected header x0,...,y")
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if rows.ndim != 2 or rows.shape[1] < 2:
        raise ValueError(f"{path}: no data rows")
    return Dataset(rows[:, :-1], rows[:, -1], provenance)


def random_net(depth, widths, input_dim, proxy_target, weight_law="gaussian", seed=0):
    """Random net with i.i.d. weights, outer layer rescaled so the path-norm
    proxy equals proxy_target exactly.

    Weights are scaled by 1/sqrt(fan-in) before rescaling so initial layer
    norms are O(1).
    """
    if proxy_target <= 0:
        raise ValueError("proxy_target must be positive")
    widths = tuple(int(m) for m in widths)
    if len(widths) != depth:
        raise ValueError("widths length must equal depth")
    rng = np.random.default_rng(seed)

    def draw(shape, fan_in):
        if weight_law == "uniform":
            w = rng.uniform(-1.0, 1.0, size=shape) * np.sqrt(3.0)
        elif weight_law == "gaussian":
            w = rng.standard_normal(shape)
        else:
            raise ValueError(f"unknown weight law {weight_law!r}")
        return w / np.sqrt(fan_in)

    inner = draw((widths[0], input_dim + 1), input_dim + 1)
    mids = tuple(
        draw((widths[l + 1], widths[l]), widths[l]) for l in range(depth - 1)
    )
    outer = draw((widths[-1],), widths[-1])
    net = MeanFieldNet(inner, mids, outer)
    proxy = path_norm_proxy(net)
    if proxy == 0.0:
        raise ValueError("degenerate draw with zero proxy; change the seed")
    return net.replace(outer=outer * (proxy_target / proxy))


def label(net, points, noise_std=0.0, seed=0, provenance=None):
    """Dataset with labels from a target net, optional additive Gaussian noise."""
    points = np.asarray(points, float)
    ys = net.forward_many(points) if len(points) else np.zeros(0)
    if noise_std > 0:
        ys = ys + np.random.default_rng(seed).normal(0.0, noise_std, size=ys.shape)
    return Dataset(points, ys, provenance or {})
