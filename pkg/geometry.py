"""Bounded domains, their lattice discretizations and moment-of-inertia geometry"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.special import gammaln

logger = logging.getLogger(__name__)

DOMAIN_KINDS = ("interval", "box", "ball", "mask")


class DomainError(ValueError):
    """Raised for invalid domain specifications or mask files."""


def unit_ball_volume(n):
    """Volume B_n of the unit ball in R^n, 2 pi^(n/2) / (n Gamma(n/2))"""
    return math.exp(log_unit_ball_volume(n))


def log_unit_ball_volume(n):
    if int(n) != n or n < 1:
        raise ValueError(f"dimension n must be a positive integer, got {n}")
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - math.log(n) - gammaln(0.5 * n)


def inertia_floor(n, V):
    """Moment of inertia of the ball with volume V, the lower bound on I(Omega)"""
    if V <= 0:
        raise ValueError(f"volume V must be positive, got {V}")
    return n / (n + 2.0) * V * (V / unit_ball_volume(n)) ** (2.0 / n)


def read_pgm(path):
    """Read an ASCII (P2) PGM file and return a boolean interior bitmap."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"mask file not found: {path}")

    tokens = []
    for line in path.read_text().splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())

    if not tokens or tokens[0] != "P2":
        raise DomainError(f"{path}: not an ASCII PGM (P2) file")
    try:
        width, height, _maxval = (int(t) for t in tokens[1:4])
        pixels = np.array([int(t) for t in tokens[4:]], dtype=int)
    except ValueError as e:
        raise DomainError(f"{path}: malformed PGM header or pixel data ({e})") from e
    if pixels.size != width * height:
        raise DomainError(f"{path}: expected {width * height} pixels, found {pixels.size}")

    return pixels.reshape(height, width) != 0


def write_pgm(path, bitmap):
    """Write a boolean bitmap as ASCII PGM, interior cells as 1."""
    bitmap = np.asarray(bitmap, dtype=bool)
    height, width = bitmap.shape
    lines = ["P2", f"{width} {height}", "1"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in bitmap)
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class DomainSpec:
    """A bounded domain: interval [0, L], box [0, L_1] x ..., centred ball, or 2-d bitmap mask."""
    kind: str
    dim: int
    lengths: tuple = ()
    radius: float = None
    bitmap: np.ndarray = field(default=None, compare=False, repr=False)
    cell: float = None
    source: str = None

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise DomainError(f"kind must be one of {DOMAIN_KINDS}, got {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.dim}")
        if self.kind in ("interval", "box"):
            if len(self.lengths) != self.dim or any(not (L > 0) for L in self.lengths):
                raise DomainError(f"{self.kind} lengths must be {self.dim} positive numbers, got {self.lengths}")
        if self.kind == "ball" and not (self.radius is not None and self.radius > 0):
            raise DomainError(f"ball radius must be positive, got {self.radius}")
        if self.kind == "mask":
            if self.dim != 2:
                raise DomainError("mask domains are 2-dimensional")
            if not (self.cell is not None and self.cell > 0):
                raise DomainError(f"mask cell size must be positive, got {self.cell}")
            if self.bitmap is None or self.bitmap.ndim != 2 or not self.bitmap.any():
                raise DomainError("mask has no interior cells")

    @classmethod
    def interval(cls, length):
        return cls("interval", 1, lengths=(float(length),))

    @classmethod
    def box(cls, lengths):
        lengths = tuple(float(L) for L in lengths)
        return cls("box", len(lengths), lengths=lengths)

    @classmethod
    def ball(cls, radius, dim):
        return cls("ball", int(dim), radius=float(radius))

    @classmethod
    def mask(cls, bitmap, cell, source=None):
        return cls("mask", 2, bitmap=np.asarray(bitmap, dtype=bool), cell=float(cell), source=source)

    @classmethod
    def from_dict(cls, data, base_dir=None):
        """Build a DomainSpec from its JSON form, e.g. {"kind": "ball", "radius": 1.0, "dim": 2}."""
        if not isinstance(data, dict):
            raise DomainError(f"domain must be an object, got {type(data).__name__}")
        kind = data.get("kind")
        try:
            if kind == "interval":
                return cls.interval(data["length"])
            if kind == "box":
                return cls.box(data["lengths"])
            if kind == "ball":
                return cls.ball(data["radius"], data.get("dim", 2))
            if kind == "mask":
                path = Path(data["file"])
                if base_dir is not None and not path.is_absolute():
                    path = Path(base_dir) / path
                return cls.mask(read_pgm(path), data["cell"], source=str(data["file"]))
        except KeyError as e:
            raise DomainError(f"domain of kind {kind!r} is missing field {e.args[0]!r}") from e
        except TypeError as e:
            raise DomainError(f"domain of kind {kind!r} has a malformed field ({e})") from e
        raise DomainError(f"kind must be one of {DOMAIN_KINDS}, got {kind!r}")

    def to_dict(self):
        if self.kind == "interval":
            return {"kind": "interval", "length": self.lengths[0]}
        if self.kind == "box":
            return {"kind": "box", "lengths": list(self.lengths)}
        if self.kind == "ball":
            return {"kind": "ball", "radius": self.radius, "dim": self.dim}
        return {"kind": "mask", "file": self.source, "cell": self.cell}

    @property
    def label(self):
        if self.kind == "interval":
            return f"interval(L={self.lengths[0]:g})"
        if self.kind == "box":
            return "box(" + "x".join(f"{L:g}" for L in self.lengths) + ")"
        if self.kind == "ball":
            return f"ball(R={self.radius:g},n={self.dim})"
        name = self.source or "bitmap"
        return f"mask({name},h={self.cell:g})"

    @property
    def has_analytic_measure(self):
        return self.kind != "mask"

    def bounds(self):
        """Lower and upper corners of the bounding box."""
        if self.kind in ("interval", "box"):
            return np.zeros(self.dim), np.array(self.lengths)
        if self.kind == "ball":
            return np.full(self.dim, -self.radius), np.full(self.dim, self.radius)
        return np.zeros(2), np.array(self.bitmap.shape, dtype=float) * self.cell

    @property
    def diameter(self):
        lower, upper = self.bounds()
        return float(np.linalg.norm(upper - lower))

    def contains(self, points, margin=0.0):
        """Membership of points (shape (m, dim)) in the open domain, shrunk by margin."""
        points = np.atleast_2d(points)
        if self.kind in ("interval", "box"):
            upper = np.array(self.lengths)
            return np.all((points > margin) & (points < upper - margin), axis=1)
        if self.kind == "ball":
            return np.sum(points ** 2, axis=1) < (self.radius - margin) ** 2
        idx = np.floor(points / self.cell).astype(int)
        shape = np.array(self.bitmap.shape)
        inside = np.all((idx >= 0) & (idx < shape), axis=1)
        result = np.zeros(len(points), dtype=bool)
        result[inside] = self.bitmap[idx[inside, 0], idx[inside, 1]]
        return result


@dataclass(frozen=True)
class GridDomain:
    """Lattice points origin + h * index; `mask` marks the points inside the domain."""
    dim: int
    h: float
    origin: tuple
    mask: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"cell size h must be positive, got {self.h}")
        if self.mask.ndim != self.dim:
            raise ValueError(f"mask has {self.mask.ndim} axes for a {self.dim}-d grid")
        if not self.mask.any():
            raise ValueError(f"grid {self.label!r} has no interior points at h={self.h:g}")

    @classmethod
    def lattice(cls, shape, h, origin, label=""):
        """A full lattice with every point interior."""
        shape = tuple(int(m) for m in shape)
        return cls(len(shape), float(h), tuple(float(o) for o in origin), np.ones(shape, dtype=bool), label)

    @property
    def shape(self):
        return self.mask.shape

    @property
    def size(self):
        return int(np.count_nonzero(self.mask))

    @property
    def index(self):
        return np.nonzero(self.mask)

    @property
    def points(self):
        idx = np.stack(self.index, axis=1).astype(float)
        return np.asarray(self.origin) + self.h * idx

    @property
    def cell_volume(self):
        return self.h ** self.dim

    @property
    def volume(self):
        return self.size * self.cell_volume

    @property
    def centroid(self):
        return self.points.mean(axis=0)

    def embed(self, values, fill=0.0):
        """Scatter interior values onto the full lattice array."""
        values = np.asarray(values)
        full = np.full(self.shape + values.shape[1:], fill, dtype=values.dtype)
        full[self.index] = values
        return full

    def is_connected(self):
        _, components = ndimage.label(self.mask)
        return components == 1


def discretize(domain, h, nodal=None):
    """Lattice discretization of a DomainSpec.

    Nodal lattices put points on the bounding box corners (boundary nodes are
    excluded, balls use a lattice symmetric about the centre). Cell lattices put
    points at cell midpoints; a cell is interior iff its midpoint is inside.
    """
    if not h > 0:
        raise ValueError(f"resolution must be positive, got {h}")
    if nodal is None:
        nodal = domain.kind != "mask"

    lower, upper = domain.bounds()
    extent = upper - lower
    if nodal and domain.kind == "ball":
        m = int(math.ceil(domain.radius / h - 1e-9))
        shape = (2 * m + 1,) * domain.dim
        origin = np.full(domain.dim, -m * h)
    elif nodal:
        shape = tuple(int(math.ceil(e / h - 1e-9)) + 1 for e in extent)
        origin = lower
    else:
        shape = tuple(max(1, int(math.ceil(e / h - 1e-9))) for e in extent)
        origin = lower + 0.5 * h

    axes = [origin[i] + h * np.arange(shape[i]) for i in range(domain.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    mask = domain.contains(points, margin=1e-9 * h).reshape(shape)
    if not mask.any():
        raise DomainError(f"{domain.label} has no interior points at h={h:g}")

    return GridDomain(domain.dim, float(h), tuple(float(o) for o in origin), mask, domain.label)


@dataclass(frozen=True)
class GeometrySummary:
    volume: float
    centroid: tuple
    inertia: float
    rearranged_radius: float
    tolerance: float = 0.0
    resolution: float = None

    @property
    def inertia_floor(self):
        return inertia_floor(len(self.centroid), self.volume)

    @property
    def satisfies_floor(self):
        return self.inertia >= self.inertia_floor - self.tolerance


def quadrature_tolerance(h, diameter, volume):
    """First-order quadrature error model, 5 h diam^2 V"""
    return 5.0 * h * diameter ** 2 * volume


def measure(domain, resolution="analytic"):
    """Volume, centroid and moment of inertia about the centroid."""
    n = domain.dim
    if resolution == "analytic":
        if domain.kind in ("interval", "box"):
            lengths = np.array(domain.lengths)
            V = float(np.prod(lengths))
            centroid = tuple(lengths / 2.0)
            inertia = V * float(np.sum(lengths ** 2)) / 12.0
        elif domain.kind == "ball":
            V = unit_ball_volume(n) * domain.radius ** n
            centroid = (0.0,) * n
            inertia = n / (n + 2.0) * V * domain.radius ** 2
        else:
            raise ValueError("analytic measure is only available for interval, box and ball domains")
        return GeometrySummary(V, centroid, inertia, (V / unit_ball_volume(n)) ** (1.0 / n))

    h = float(resolution)
    if not h > 0:
        raise ValueError(f"resolution must be positive, got {resolution}")

    grid = discretize(domain, h, nodal=False)
    points = grid.points
    V = grid.volume
    centroid = points.mean(axis=0)
    inertia = float(np.sum((points - centroid) ** 2)) * grid.cell_volume
    tol = quadrature_tolerance(h, domain.diameter, V)
    summary = GeometrySummary(V, tuple(centroid), inertia, (V / unit_ball_volume(n)) ** (1.0 / n), tol, h)
    if not summary.satisfies_floor:
        logger.warning(f"{domain.label}: I={inertia:.6g} below the rearrangement floor {summary.inertia_floor:.6g}")
    return summary


def inertia_about(domain, center, resolution):
    """Midpoint quadrature of the integral of |x - center|^2 over the domain."""
    grid = discretize(domain, resolution, nodal=False)
    return float(np.sum((grid.points - np.asarray(center)) ** 2)) * grid.cell_volume
