"""Piecewise orthonormal bases on a window [a, b].

The window is cut into ``m`` cells of width ``delta = (b - a) / m``.  On
each cell a rescaled copy of a standard orthonormal family is placed:

* ``trig``: 1, cos(k t), sin(k t) on [0, 2 pi], k = 1..J/2 (J even)
* ``legendre``: normalized Legendre polynomials P_0..P_J on [-1, 1]
* ``haar``: the father and mother Haar wavelets on [0, 1] (J = 1)

Local index ``j`` runs over 0..J.  For the trigonometric family the order
is (1, cos 1t, sin 1t, cos 2t, sin 2t, ...).  Global functions are indexed
by ``r = p * (J + 1) + j`` with ``p`` the zero-based cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

FAMILIES = ("trig", "legendre", "haar")

_STANDARD_INTERVAL = {
    "trig": (0.0, 2.0 * np.pi),
    "legendre": (-1.0, 1.0),
    "haar": (0.0, 1.0),
}


@dataclass(frozen=True)
class Window:
    """Closed window [a, b].

    Basis construction only needs a < b.  Anything that evaluates a Levy
    density on the window calls ``require_away_from_zero`` first.
    """

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (np.isfinite(a) and np.isfinite(b)) or not a < b:
            raise DomainError(f"window needs finite a < b, got [{a}, {b}]")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> float:
        return self.b - self.a

    def require_away_from_zero(self) -> "Window":
        if self.a <= 0.0 <= self.b:
            raise DomainError(f"window [{self.a}, {self.b}] must not contain 0")
        return self


@dataclass(frozen=True)
class BasisFamily:
    tag: str
    J: int

    def __post_init__(self):
        tag = str(self.tag).lower()
        if tag not in FAMILIES:
            raise DomainError(f"unknown basis family {self.tag!r}")
        J = int(self.J)
        if J != self.J:
            raise DomainError("J must be an integer")
        if tag == "trig" and (J < 2 or J % 2):
            raise DomainError("trigonometric family needs even J >= 2")
        if tag == "haar" and J != 1:
            raise DomainError("Haar family has J = 1")
        if tag == "legendre" and J < 0:
            raise DomainError("Legendre family needs J >= 0")
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "J", J)

    @property
    def size(self) -> int:
        """Number of functions per cell."""
        return self.J + 1

    @property
    def standard_interval(self) -> tuple[float, float]:
        return _STANDARD_INTERVAL[self.tag]


def trig(J: int = 2) -> BasisFamily:
    return BasisFamily("trig", J)


def legendre(J: int) -> BasisFamily:
    return BasisFamily("legendre", J)


def haar() -> BasisFamily:
    return BasisFamily("haar", 1)


@dataclass(frozen=True)
class BasisSystem:
    family: BasisFamily
    window: Window
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("m must be a positive integer")
        object.__setattr__(self, "m", int(self.m))

    @property
    def delta(self) -> float:
        return self.window.length / self.m

    @property
    def J(self) -> int:
        return self.family.J

    @property
    def dim(self) -> int:
        return self.family.size * self.m

    def cell_left(self, p) -> np.ndarray:
        """Left endpoint of zero-based cell ``p``."""
        return self.window.a + self.delta * np.asarray(p)

    def cell_of(self, x) -> np.ndarray:
        """Zero-based cell index of each x, or -1 outside the window.

        Cells are half open except the last one, which is closed at b.
        """
        x = np.asarray(x, dtype=float)
        a, b = self.window.a, self.window.b
        p = np.floor((x - a) / self.delta).astype(np.int64)
        p = np.where(x == b, self.m - 1, p)
        # rounding near a cell edge: move to the cell that really holds x
        p = np.where((p > 0) & (x < self.cell_left(p)), p - 1, p)
        p = np.where((p < self.m - 1) & (x >= self.cell_left(p + 1)), p + 1, p)
        inside = (x >= a) & (x <= b)
        return np.where(inside, p, -1)

    def to_dict(self) -> dict:
        return {"family": self.family.tag, "J": self.J, "a": self.window.a,
                "b": self.window.b, "m": self.m}

    @classmethod
    def from_dict(cls, d: dict) -> "BasisSystem":
        return cls(BasisFamily(d["family"], d["J"]), Window(d["a"], d["b"]), d["m"])


def make_system(family: str, J: int | None, a: float, b: float, m: int) -> BasisSystem:
    """Convenience constructor; ``J`` may be omitted for Haar."""
    if J is None:
        if family != "haar":
            raise DomainError("J is required for this family")
        J = 1
    return BasisSystem(BasisFamily(family, J), Window(a, b), m)


# ---------------------------------------------------------------- evaluation

def _legendre_all(J: int, t: np.ndarray) -> np.ndarray:
    """P_0..P_J at t by the three-term recurrence, shape (J+1, len(t))."""
    out = np.empty((J + 1,) + t.shape)
    out[0] = 1.0
    if J >= 1:
        out[1] = t
    for n in range(1, J):
        out[n + 1] = ((2 * n + 1) * t * out[n] - n * out[n - 1]) / (n + 1)
    return out


def _standard_all(family: BasisFamily, t: np.ndarray) -> np.ndarray:
    """All standard functions at t (no domain check), shape (J+1, len(t))."""
    J = family.J
    if family.tag == "trig":
        out = np.empty((J + 1,) + t.shape)
        out[0] = 1.0 / np.sqrt(2.0 * np.pi)
        for k in range(1, J // 2 + 1):
            out[2 * k - 1] = np.cos(k * t) / np.sqrt(np.pi)
            out[2 * k] = np.sin(k * t) / np.sqrt(np.pi)
        return out
    if family.tag == "legendre":
        scale = np.sqrt((2 * np.arange(J + 1) + 1) / 2.0)
        return scale.reshape((-1,) + (1,) * t.ndim) * _legendre_all(J, t)
    out = np.empty((2,) + t.shape)
    out[0] = 1.0
    out[1] = np.where(t < 0.5, -1.0, 1.0)
    return out


def _check_index(family: BasisFamily, j: int) -> int:
    if int(j) != j or not 0 <= j <= family.J:
        raise DomainError(f"index j={j} outside 0..{family.J}")
    return int(j)


def standard_basis_eval(family: BasisFamily, j: int, x):
    """Standard orthonormal function number ``j`` at x."""
    j = _check_index(family, j)
    t = np.asarray(x, dtype=float)
    lo, hi = family.standard_interval
    if np.any((t < lo) | (t > hi)) or np.any(np.isnan(t)):
        raise DomainError(f"x outside the standard interval [{lo}, {hi}]")
    val = _standard_all(family, np.atleast_1d(t))[j]
    return val.reshape(t.shape)[()] if t.ndim == 0 else val


def local_values(system: BasisSystem, s) -> np.ndarray:
    """All local functions at relative positions s = (x - a)/delta in [0, 1].

    Returns shape (J+1, len(s)).  This is the workhorse used by the
    estimator and the Gaussian sup sampler.
    """
    fam = system.family
    lo, hi = fam.standard_interval
    s = np.asarray(s, dtype=float)
    t = lo + (hi - lo) * s
    return np.sqrt((hi - lo) / system.delta) * _standard_all(fam, t)


def local_basis_eval(system: BasisSystem, j: int, x):
    """Local function psi_j on the first cell [a, a + delta].

    The right endpoint is accepted and gives the left-hand limit, which is
    the value needed for suprema over the half-open cell.
    """
    j = _check_index(system.family, j)
    x = np.asarray(x, dtype=float)
    a = system.window.a
    if np.any((x < a) | (x > a + system.delta)) or np.any(np.isnan(x)):
        raise DomainError("x outside the first cell")
    s = np.clip((x - a) / system.delta, 0.0, 1.0)
    val = local_values(system, np.atleast_1d(s))[j]
    return val.reshape(x.shape)[()] if x.ndim == 0 else val


def global_basis_eval(system: BasisSystem, j: int, p: int, x):
    """Global function phi_(j,p) at x; ``p`` is one-based (1..m)."""
    j = _check_index(system.family, j)
    if int(p) != p or not 1 <= p <= system.m:
        raise DomainError(f"cell index p={p} outside 1..{system.m}")
    x = np.asarray(x, dtype=float)
    x1 = np.atleast_1d(x)
    cells = system.cell_of(x1)
    hit = cells == p - 1
    out = np.zeros_like(x1)
    if np.any(hit):
        s = (x1[hit] - system.cell_left(p - 1)) / system.delta
        out[hit] = local_values(system, np.clip(s, 0.0, 1.0))[j]
    return out.reshape(x.shape)[()] if x.ndim == 0 else out


def design(system: BasisSystem, x) -> tuple[np.ndarray, np.ndarray]:
    """Cell index and local values for each x.

    Returns ``(cells, values)`` with ``values`` of shape (len(x), J+1);
    rows of points outside the window are zero and their cell is -1.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cells = system.cell_of(x)
    vals = np.zeros((x.size, system.family.size))
    hit = cells >= 0
    if np.any(hit):
        s = (x[hit] - system.cell_left(cells[hit])) / system.delta
        vals[hit] = local_values(system, np.clip(s, 0.0, 1.0)).T
    return cells, vals


# ------------------------------------------------------------ verification

def _smooth_pieces(family: BasisFamily) -> np.ndarray:
    """Breakpoints (relative to a cell) between which all functions are smooth."""
    return np.array([0.0, 0.5, 1.0]) if family.tag == "haar" else np.array([0.0, 1.0])


def default_quad_order(family: BasisFamily) -> int:
    if family.tag == "haar":
        return 1
    if family.tag == "legendre":
        return family.J + 1
    return 2 * family.J + 24


def verify_orthonormality(system: BasisSystem, quad_order: int | None = None) -> float:
    """Largest entry of |Gram - I| over all global functions on the window.

    Integrals use Gauss-Legendre nodes on each smooth piece of each cell,
    exact for Haar and for Legendre once ``quad_order >= J + 1``.
    """
    fam = system.family
    if quad_order is None:
        quad_order = default_quad_order(fam)
    if quad_order < 1 or (fam.tag == "legendre" and quad_order < fam.J + 1):
        raise DomainError("quad_order too small for exact integration")
    nodes, weights = np.polynomial.legendre.leggauss(int(quad_order))
    brk = _smooth_pieces(fam)
    s_nodes, s_w = [], []
    for lo, hi in zip(brk[:-1], brk[1:]):
        s_nodes.append(lo + (hi - lo) * (nodes + 1.0) / 2.0)
        s_w.append((hi - lo) / 2.0 * weights)
    s_nodes = np.concatenate(s_nodes)
    s_w = np.concatenate(s_w) * system.delta
    gram = np.zeros((system.dim, system.dim))
    for p in range(system.m):
        x = system.cell_left(p) + s_nodes * system.delta
        # assemble the full design row for each node so cross-cell terms are included
        cells, vals = design(system, x)
        rows = np.zeros((x.size, system.dim))
        for i, c in enumerate(cells):
            if c >= 0:
                rows[i, c * fam.size:(c + 1) * fam.size] = vals[i]
        gram += rows.T @ (rows * s_w[:, None])
    return float(np.max(np.abs(gram - np.eye(system.dim))))


@lru_cache(maxsize=None)
def _legendre_constants(J: int) -> tuple[float, float]:
    """(max sup, max TV) of sqrt(2j+1) P_j over [-1, 1], j <= J.

    The variation is summed over the monotone pieces between the real
    critical points of P_j, cross-checked against a 2^14 grid sum.
    """
    grid = np.linspace(-1.0, 1.0, 2**14 + 1)
    c1 = c2 = 0.0
    for j in range(J + 1):
        w = np.sqrt(2 * j + 1)
        poly = np.polynomial.legendre.Legendre.basis(j)
        vals = poly(grid)
        c1 = max(c1, w * np.max(np.abs(vals)))
        crit = poly.deriv().roots() if j > 1 else np.array([])
        crit = np.sort(crit[np.abs(crit.imag) < 1e-12].real) if crit.size else crit
        pts = np.concatenate([[-1.0], crit[(crit > -1) & (crit < 1)], [1.0]])
        tv = np.sum(np.abs(np.diff(poly(pts))))
        grid_tv = np.sum(np.abs(np.diff(vals)))
        if not tv >= grid_tv - 1e-9:
            raise ArithmeticError(f"variation of P_{j} undercounted")
        c2 = max(c2, w * tv)
    return float(c1), float(c2)


def boundedness_constants(system: BasisSystem | BasisFamily) -> tuple[float, float]:
    """(C1, C2): max over j of sqrt(delta) sup|psi_j| and sqrt(delta) TV(psi_j).

    Both are scale free, so only the family matters.
    """
    fam = system.family if isinstance(system, BasisSystem) else system
    if fam.tag == "haar":
        return 1.0, 2.0
    if fam.tag == "trig":
        # sqrt(2) cos(2 pi k s) on [0, 1]: sup sqrt(2), TV 4k sqrt(2)
        return float(np.sqrt(2.0)), float(4.0 * np.sqrt(2.0) * (fam.J // 2))
    return _legendre_constants(fam.J)
