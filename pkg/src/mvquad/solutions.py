"""Closed-form test fields with known PDE class.

Every family carries its value, gradient and exact Laplacian so that the
finite-difference oracle can audit the label independently.  Family ids are
the public names used on the command line.
"""
from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .coefficients import a_bullet_meta, a_bullet_pan, a_circ_meta, a_circ_pan
from .errors import UsageError
from .specfun import check_dimension

CORPUS_VERSION = "mvquad-corpus-1"
TEST_RADIUS = 1.0
POLE_FACTOR = 1.5


class FieldKind(str, Enum):
    HARMONIC = "Harmonic"
    PANHARMONIC = "Panharmonic"
    METAHARMONIC = "Metaharmonic"
    SUBHARMONIC = "Subharmonic"
    NONE = "None"


@dataclass(frozen=True, eq=False)
class SolutionFamily:
    """A scalar field ``u: R^m -> R`` with its PDE label.

    ``domain`` is the safe ball ``(center, radius)`` in which the field is
    smooth; ``radius = inf`` for entire functions.  ``parameter`` is mu for
    panharmonic and lambda for metaharmonic fields.
    """

    id: str
    kind: FieldKind
    dimension: int
    evaluate: object
    laplacian: object
    gradient: object = None
    parameter: float = None
    domain: tuple = None
    laplacian_nonnegative: bool = False
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.domain is None:
            object.__setattr__(self, "domain", ((0.0,) * self.dimension, math.inf))

    def __call__(self, y):
        return self.evaluate(y)

    @property
    def expected_verdict(self):
        if self.kind is FieldKind.NONE:
            return "Subharmonic" if self.laplacian_nonnegative else "Unclassified"
        return self.kind.value

    def admits(self, g):
        """True if the closed ball bounding geometry ``g`` lies inside the safe domain."""
        center, radius = self.domain
        if g.dimension != self.dimension:
            return False
        dist = math.dist(g.center, center)
        return dist + g.r2 < radius

    def describe(self):
        return {
            "id": self.id,
            "kind": self.kind.value,
            "dimension": self.dimension,
            "parameter": self.parameter,
            "domain": {"center": list(self.domain[0]), "radius": _json_radius(self.domain[1])},
            **({"info": self.info} if self.info else {}),
        }


def _json_radius(r):
    return None if math.isinf(r) else r


@dataclass(frozen=True)
class CorpusManifest:
    dimension: int
    entries: tuple
    version: str = CORPUS_VERSION

    def __post_init__(self):
        ids = [f.id for f in self.entries]
        if len(ids) != len(set(ids)):
            raise UsageError("corpus ids must be unique")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def get(self, family_id):
        for f in self.entries:
            if f.id == family_id:
                return f
        raise UsageError(f"unknown family {family_id!r} in corpus m={self.dimension}")

    def ids(self):
        return [f.id for f in self.entries]

    def of_kind(self, *kinds):
        return [f for f in self.entries if f.kind in kinds]

    def to_dict(self):
        return {"version": self.version, "dimension": self.dimension, "entries": [f.describe() for f in self.entries]}


def _fmt(x):
    return f"{x:g}"


def _zeros(y):
    return np.zeros(np.shape(y)[:-1])


def constant(m, c=1.0):
    return SolutionFamily(
        f"harm:const:m{m}", FieldKind.HARMONIC, m,
        lambda y: np.full(np.shape(y)[:-1], c),
        _zeros,
        gradient=lambda y: np.zeros(np.shape(y)),
        laplacian_nonnegative=True,
    )


def coordinate(m, i):
    def grad(y):
        g = np.zeros(np.shape(y))
        g[..., i] = 1.0
        return g

    return SolutionFamily(
        f"harm:coord:m{m}:i{i + 1}", FieldKind.HARMONIC, m,
        lambda y: np.asarray(y)[..., i], _zeros, gradient=grad, laplacian_nonnegative=True,
    )


def complex_power(m, k, imag=False):
    """``Re`` or ``Im`` of ``(y1 + i y2)**k``; harmonic in any dimension."""

    def value(y):
        z = np.asarray(y)[..., 0] + 1j * np.asarray(y)[..., 1]
        w = z**k
        return w.imag if imag else w.real

    def grad(y):
        y = np.asarray(y)
        z = y[..., 0] + 1j * y[..., 1]
        dz = k * z ** (k - 1)
        g = np.zeros(y.shape)
        if imag:
            g[..., 0], g[..., 1] = dz.imag, dz.real
        else:
            g[..., 0], g[..., 1] = dz.real, -dz.imag
        return g

    suffix = ":im" if imag else ""
    return SolutionFamily(
        f"harm:poly:m{m}:k{k}{suffix}", FieldKind.HARMONIC, m, value, _zeros, gradient=grad,
        laplacian_nonnegative=True,
    )


def _poly(fid, kind, m, value, grad, lap, nonneg):
    return SolutionFamily(fid, kind, m, value, lap, gradient=grad, laplacian_nonnegative=nonneg)


def _grad_from(parts):
    def grad(y):
        y = np.asarray(y)
        g = np.zeros(y.shape)
        for i, fn in parts.items():
            g[..., i] = fn(y)
        return g

    return grad


def fundamental(m, pole):
    """``log|y - p|`` (m = 2) or ``|y - p|**(2-m)``; smooth away from the pole."""
    p = np.asarray(pole, dtype=np.float64)

    def value(y):
        d = np.linalg.norm(np.asarray(y) - p, axis=-1)
        return np.log(d) if m == 2 else d ** (2.0 - m)

    def grad(y):
        diff = np.asarray(y) - p
        d2 = np.sum(diff**2, axis=-1)[..., None]
        if m == 2:
            return diff / d2
        return (2.0 - m) * diff * d2 ** (-m / 2.0)

    radius = float(np.linalg.norm(p)) / POLE_FACTOR
    return SolutionFamily(
        f"harm:fund:m{m}", FieldKind.HARMONIC, m, value, _zeros, gradient=grad,
        domain=((0.0,) * m, radius), laplacian_nonnegative=True, info={"pole": p.tolist()},
    )


def _unit(d):
    d = np.asarray(d, dtype=np.float64)
    return d / np.linalg.norm(d)


def plane_exp(m, mu, direction, label):
    """``exp(mu d.y)``: mu-panharmonic for a unit vector d."""
    d = _unit(direction)
    value = lambda y: np.exp(mu * (np.asarray(y) @ d))
    return SolutionFamily(
        f"pan:exp:mu={_fmt(mu)}:d={label}", FieldKind.PANHARMONIC, m, value,
        lambda y: mu * mu * value(y),
        gradient=lambda y: mu * value(y)[..., None] * d,
        parameter=float(mu), laplacian_nonnegative=True, info={"direction": d.tolist()},
    )


def plane_trig(m, lam, direction, label, sine=False):
    """``cos(lam d.y)`` or ``sin(lam d.y)``: lam-metaharmonic."""
    d = _unit(direction)
    if sine:
        value = lambda y: np.sin(lam * (np.asarray(y) @ d))
        dvalue = lambda y: lam * np.cos(lam * (np.asarray(y) @ d))
    else:
        value = lambda y: np.cos(lam * (np.asarray(y) @ d))
        dvalue = lambda y: -lam * np.sin(lam * (np.asarray(y) @ d))
    name = "sin" if sine else "cos"
    return SolutionFamily(
        f"meta:{name}:lam={_fmt(lam)}:d={label}", FieldKind.METAHARMONIC, m, value,
        lambda y: -lam * lam * value(y),
        gradient=lambda y: dvalue(y)[..., None] * d,
        parameter=float(lam), info={"direction": d.tolist()},
    )


def radial_solution(kind, m, parameter):
    """Radial pan- or metaharmonic field normalised to 1 at the origin.

    ``u(y) = Gamma(nu+1) I_nu(mu|y|) / (mu|y|/2)**nu`` with ``nu = (m-2)/2``
    (``J`` for metaharmonic).  The quotient is a power series in ``|y|**2``,
    so there is no 0/0 at the origin.
    """
    m = check_dimension(m)
    kind = FieldKind(kind)
    if not parameter > 0:
        raise UsageError("parameter must be positive")
    p = float(parameter)
    if kind is FieldKind.PANHARMONIC:
        base, shifted, sign, tag = a_circ_pan, a_bullet_pan, 1.0, "pan:radial:mu"
    elif kind is FieldKind.METAHARMONIC:
        base, shifted, sign, tag = a_circ_meta, a_bullet_meta, -1.0, "meta:radial:lam"
    else:
        raise UsageError("radial solutions are Panharmonic or Metaharmonic")

    def value(y):
        s = np.linalg.norm(np.asarray(y), axis=-1)
        return np.asarray(base(m, p * s))

    def grad(y):
        # d/ds base(p s) = sign * p**2 s / m * shifted(p s)
        y = np.asarray(y)
        s = np.linalg.norm(y, axis=-1)
        return sign * p * p / m * np.asarray(shifted(m, p * s))[..., None] * y

    return SolutionFamily(
        f"{tag}={_fmt(p)}:m{m}", kind, m, value,
        lambda y: sign * p * p * value(y),
        gradient=grad, parameter=p,
        laplacian_nonnegative=kind is FieldKind.PANHARMONIC,
    )


def build_corpus(m):
    """The labelled test corpus for dimension ``m``."""
    m = check_dimension(m)
    e1 = np.eye(m)[0]
    diag = np.ones(m)
    fams = [constant(m)]
    fams += [coordinate(m, i) for i in range(m)]
    if m == 2:
        for k in range(2, 6):
            fams += [complex_power(m, k), complex_power(m, k, imag=True)]
    else:
        fams += [
            _poly(f"harm:poly:m{m}:y1y2", FieldKind.HARMONIC, m,
                  lambda y: y[..., 0] * y[..., 1],
                  _grad_from({0: lambda y: y[..., 1], 1: lambda y: y[..., 0]}), _zeros, True),
            _poly(f"harm:poly:m{m}:y1^2-y2^2", FieldKind.HARMONIC, m,
                  lambda y: y[..., 0] ** 2 - y[..., 1] ** 2,
                  _grad_from({0: lambda y: 2 * y[..., 0], 1: lambda y: -2 * y[..., 1]}), _zeros, True),
            _poly(f"harm:poly:m{m}:y1y2y3", FieldKind.HARMONIC, m,
                  lambda y: y[..., 0] * y[..., 1] * y[..., 2],
                  _grad_from({0: lambda y: y[..., 1] * y[..., 2], 1: lambda y: y[..., 0] * y[..., 2],
                              2: lambda y: y[..., 0] * y[..., 1]}), _zeros, True),
            complex_power(m, 3),
        ]
    fams.append(fundamental(m, POLE_FACTOR * TEST_RADIUS * e1))
    for mu in (0.5, 1.0, 2.0):
        fams.append(plane_exp(m, mu, e1, "e1"))
    fams.append(plane_exp(m, 1.0, diag, "diag"))
    fams.append(radial_solution(FieldKind.PANHARMONIC, m, 1.0))
    for lam in (0.5, 1.0, 2.0):
        fams.append(plane_trig(m, lam, e1, "e1"))
        fams.append(plane_trig(m, lam, e1, "e1", sine=True))
    fams.append(plane_trig(m, 1.0, diag, "diag"))
    fams.append(radial_solution(FieldKind.METAHARMONIC, m, 1.0))
    fams.append(_poly(f"sub:normsq:m{m}", FieldKind.SUBHARMONIC, m,
                      lambda y: np.sum(np.asarray(y) ** 2, axis=-1),
                      lambda y: 2.0 * np.asarray(y),
                      lambda y: np.full(np.shape(y)[:-1], 2.0 * m), True))
    fams.append(_poly(f"sub:y1sq:m{m}", FieldKind.SUBHARMONIC, m,
                      lambda y: np.asarray(y)[..., 0] ** 2,
                      _grad_from({0: lambda y: 2 * y[..., 0]}),
                      lambda y: np.full(np.shape(y)[:-1], 2.0), True))
    fams.append(_poly(f"none:exp+sq:m{m}", FieldKind.NONE, m,
                      lambda y: np.exp(y[..., 0]) + y[..., 1] ** 2,
                      _grad_from({0: lambda y: np.exp(y[..., 0]), 1: lambda y: 2 * y[..., 1]}),
                      lambda y: np.exp(y[..., 0]) + 2.0, True))
    fams.append(_poly(f"none:y1^4:m{m}", FieldKind.NONE, m,
                      lambda y: y[..., 0] ** 4,
                      _grad_from({0: lambda y: 4 * y[..., 0] ** 3}),
                      lambda y: 12.0 * y[..., 0] ** 2, True))
    fams.append(_poly(f"none:quartic-mixed:m{m}", FieldKind.NONE, m,
                      lambda y: y[..., 0] ** 4 - 3.0 * y[..., 1] ** 2,
                      _grad_from({0: lambda y: 4 * y[..., 0] ** 3, 1: lambda y: -6 * y[..., 1]}),
                      lambda y: 12.0 * y[..., 0] ** 2 - 6.0, False))
    return CorpusManifest(m, tuple(fams))


def lookup(family_id):
    """Find a family by id in the corpus of the dimension it names."""
    for m in range(2, 6):
        if f":m{m}" in family_id or family_id.endswith(f"m{m}"):
            try:
                return build_corpus(m).get(family_id)
            except UsageError:
                pass
    for m in range(2, 6):
        try:
            return build_corpus(m).get(family_id)
        except UsageError:
            continue
    raise UsageError(f"unknown family {family_id!r}")


def finite_difference_laplacian(f, x, h, extrapolate=False):
    """Central second differences ``sum_i (f(x+h e_i) - 2 f(x) + f(x-h e_i)) / h**2``.

    With ``extrapolate`` the O(h**2) term is removed by combining steps h and h/2.
    """
    if extrapolate:
        return (4.0 * finite_difference_laplacian(f, x, h / 2) - finite_difference_laplacian(f, x, h)) / 3.0
    x = np.asarray(x, dtype=np.float64)
    m = x.shape[-1]
    offsets = h * np.eye(m)
    pts = np.concatenate([x[None, :] + offsets, x[None, :] - offsets, x[None, :]], axis=0)
    vals = np.asarray(f(pts), dtype=np.float64)
    return float((vals[:m].sum() + vals[m:2 * m].sum() - 2.0 * m * vals[-1]) / (h * h))


def pde_residual_oracle(f, x, h):
    """``|Delta_h f(x) - f.laplacian(x)|``; O(h**2) for a correct Laplacian."""
    x = np.asarray(x, dtype=np.float64)
    claimed = float(np.asarray(f.laplacian(x[None, :]))[0])
    return abs(finite_difference_laplacian(f, x, h) - claimed)


def kind_residual(f, x, h, kind, parameter=None, extrapolate=True):
    """``|Delta_h f(x) - L(x)|`` where ``L`` is the Laplacian ``kind`` would force.

    For Subharmonic the residual is the amount by which ``Delta_h f`` is negative.
    """
    kind = FieldKind(kind)
    x = np.asarray(x, dtype=np.float64)
    lap = finite_difference_laplacian(f, x, h, extrapolate=extrapolate)
    if kind is FieldKind.SUBHARMONIC:
        return max(0.0, -lap)
    u = float(np.asarray(f(x[None, :]))[0])
    if kind is FieldKind.HARMONIC:
        target = 0.0
    elif kind is FieldKind.PANHARMONIC:
        target = parameter**2 * u
    elif kind is FieldKind.METAHARMONIC:
        target = -(parameter**2) * u
    else:
        raise UsageError("kind None has no defining equation")
    return abs(lap - target)


def perturb(f, v, eps):
    """``f + eps * v``, labelled ``None`` unless ``eps == 0``."""
    if f.dimension != v.dimension:
        raise UsageError("perturbation needs matching dimensions")
    if eps == 0:
        return f
    grad = None
    if f.gradient is not None and v.gradient is not None:
        grad = lambda y: np.asarray(f.gradient(y)) + eps * np.asarray(v.gradient(y))
    (c1, r1), (c2, r2) = f.domain, v.domain
    domain = (c1, r1) if r1 <= r2 else (c2, r2)
    nonneg = f.laplacian_nonnegative and v.laplacian_nonnegative and eps > 0 and f.kind in (
        FieldKind.HARMONIC, FieldKind.SUBHARMONIC, FieldKind.NONE)
    return SolutionFamily(
        f"{f.id}+{_fmt(eps)}*{v.id}", FieldKind.NONE, f.dimension,
        lambda y: np.asarray(f(y)) + eps * np.asarray(v(y)),
        lambda y: np.asarray(f.laplacian(y)) + eps * np.asarray(v.laplacian(y)),
        gradient=grad, domain=domain, laplacian_nonnegative=nonneg,
    )
