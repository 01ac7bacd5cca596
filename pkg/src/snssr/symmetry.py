"""Symmetric-group machinery on ensemble layouts.

Conventions:

* ``Permutation(image)`` maps ``x -> image[x]``; composition is
  ``(p * q)(x) = p(q(x))``.
* ``T(p)`` moves the content of molecule slot ``x`` to slot ``p(x)``, so
  ``T(p) T(q) = T(p * q)``.
* Young frames are non-increasing tuples of row lengths.  Irreps use
  Young's orthogonal form on standard tableaux in last-letter order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import BudgetError, DensityOperator, EnsembleLayout, StateVector, ValidationError

# Cap on (number of group terms) x (matrix elements) touched by a twirl.
TWIRL_BUDGET = 6 * 10**8
MAX_IRREP_N = 6
GS_TOL = 1e-8


@dataclass(frozen=True)
class Permutation:
    image: tuple[int, ...]

    def __post_init__(self):
        img = tuple(int(x) for x in self.image)
        if sorted(img) != list(range(len(img))):
            raise ValidationError(f"{img} is not a permutation of 0..{len(img) - 1}")
        object.__setattr__(self, "image", img)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def transposition(cls, i: int, j: int, n: int) -> "Permutation":
        img = list(range(n))
        img[i], img[j] = j, i
        return cls(tuple(img))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, x: int) -> int:
        return self.image[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.n != other.n:
            raise ValidationError("cannot compose permutations of different degree")
        return Permutation(tuple(self.image[other.image[x]] for x in range(self.n)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for x, y in enumerate(self.image):
            inv[y] = x
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.image == tuple(range(self.n))

    def adjacent_word(self) -> list[int]:
        """Indices ``i`` with ``self = s_{i_1} * s_{i_2} * ...`` where ``s_i`` swaps ``i, i+1``.

        Found by bubble-sorting the image; right-multiplying by ``s_i`` swaps
        positions ``i`` and ``i+1`` of the image.
        """
        a = list(self.image)
        swaps = []
        for end in range(len(a) - 1, 0, -1):
            for i in range(end):
                if a[i] > a[i + 1]:
                    a[i], a[i + 1] = a[i + 1], a[i]
                    swaps.append(i)
        return swaps[::-1]

    def sign(self) -> int:
        return -1 if len(self.adjacent_word()) % 2 else 1


@lru_cache(maxsize=None)
def all_permutations(n: int) -> tuple[Permutation, ...]:
    """Elements of S_n in lexicographic order of their images; index 0 is the identity."""
    return tuple(Permutation(p) for p in itertools.permutations(range(n)))


# --------------------------------------------------------------------------
# Young frames


def _check_frame(frame) -> tuple[int, ...]:
    frame = tuple(int(r) for r in frame)
    if not frame or any(r <= 0 for r in frame) or any(a < b for a, b in zip(frame, frame[1:])):
        raise ValidationError(f"{frame} is not a Young frame")
    return frame


def partitions(n: int, max_rows: int | None = None) -> list[tuple[int, ...]]:
    """Young frames with ``n`` boxes, in reverse lexicographic order ([n] first)."""
    out = []

    def rec(remaining, largest, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if max_rows is not None and len(prefix) >= max_rows:
            return
        for r in range(min(remaining, largest), 0, -1):
            rec(remaining - r, r, prefix + [r])

    rec(n, n, [])
    return out


def _hooks(frame):
    cols = [sum(1 for r in frame if r > c) for c in range(frame[0])]
    return [(r, c, frame[r] - c - 1 + cols[c] - r - 1 + 1) for r in range(len(frame)) for c in range(frame[r])]


def hook_dimension(frame) -> int:
    """Dimension of the S_N irrep labelled by ``frame`` (hook-length formula)."""
    frame = _check_frame(frame)
    prod = math.prod(h for _, _, h in _hooks(frame))
    return math.factorial(sum(frame)) // prod


def schur_weyl_multiplicity(frame, d: int) -> int:
    """Multiplicity of the irrep ``frame`` in ``(C^d)^{(x) N}``: the hook-content formula.

    Equals the dimension of the U(d) irrep with the same frame; zero when the
    frame has more than ``d`` rows.
    """
    frame = _check_frame(frame)
    if len(frame) > d:
        return 0
    num = Fraction(1)
    for r, c, h in _hooks(frame):
        num *= Fraction(d + c - r, h)
    assert num.denominator == 1
    return int(num)


def standard_tableaux(frame) -> list[tuple[tuple[int, ...], ...]]:
    """Standard tableaux (entries 1..N) in last-letter order."""
    frame = _check_frame(frame)
    n = sum(frame)
    result = []

    def rec(k, rows):
        if k > n:
            result.append(tuple(tuple(r) for r in rows))
            return
        for i in range(len(frame)):
            if len(rows[i]) < frame[i] and (i == 0 or len(rows[i - 1]) > len(rows[i])):
                rows[i].append(k)
                rec(k + 1, rows)
                rows[i].pop()

    rec(1, [[] for _ in frame])

    def key(t):
        where = {v: r for r, row in enumerate(t) for v in row}
        return tuple(where[v] for v in range(n, 0, -1))

    return sorted(result, key=key)


def _position(tableau, value):
    for r, row in enumerate(tableau):
        if value in row:
            return r, row.index(value)
    raise KeyError(value)


@dataclass(frozen=True, eq=False)
class IrrepRep:
    frame: tuple[int, ...]
    tableaux: tuple
    generators: tuple[np.ndarray, ...]

    @property
    def dimension(self) -> int:
        return len(self.tableaux)

    @property
    def n(self) -> int:
        return sum(self.frame)

    def matrix(self, p: Permutation) -> np.ndarray:
        if p.n != self.n:
            raise ValidationError("permutation degree does not match the frame")
        m = np.eye(self.dimension)
        for i in p.adjacent_word():
            m = m @ self.generators[i]
        return m

    def character(self, p: Permutation) -> float:
        return float(np.trace(self.matrix(p)))


@lru_cache(maxsize=None)
def _young_orthogonal(frame: tuple[int, ...]) -> IrrepRep:
    n = sum(frame)
    tabs = standard_tableaux(frame)
    index = {t: k for k, t in enumerate(tabs)}
    dim = len(tabs)
    gens = []
    for i in range(1, n):
        g = np.zeros((dim, dim))
        for k, t in enumerate(tabs):
            ri, ci = _position(t, i)
            rj, cj = _position(t, i + 1)
            if ri == rj:
                g[k, k] = 1.0
            elif ci == cj:
                g[k, k] = -1.0
            else:
                # axial distance between i+1 and i
                r = (cj - rj) - (ci - ri)
                g[k, k] = 1.0 / r
                swapped = tuple(
                    tuple(i + 1 if v == i else i if v == i + 1 else v for v in row) for row in t
                )
                g[index[swapped], k] = math.sqrt(1.0 - 1.0 / r**2)
        g.setflags(write=False)
        gens.append(g)
    return IrrepRep(frame, tuple(tabs), tuple(gens))


def young_orthogonal_rep(frame) -> IrrepRep:
    """Orthogonal irrep matrices of S_N for ``frame`` (N <= 6)."""
    frame = _check_frame(frame)
    if sum(frame) > MAX_IRREP_N:
        raise BudgetError(f"irreps are only built for N <= {MAX_IRREP_N}")
    return _young_orthogonal(frame)


# --------------------------------------------------------------------------
# permutation action on layouts


def _scope_mask(layout: EnsembleLayout, scope) -> list[bool]:
    layout.require_uniform()
    sig = layout.molecules[0]
    if scope in (None, "global"):
        return [True] * len(sig)
    if scope not in ("A", "B"):
        raise ValidationError(f"unknown scope {scope!r}")
    mask = [a.party == scope for a in sig]
    if not any(mask):
        raise ValidationError(f"party {scope} is absent from the layout")
    return mask


@lru_cache(maxsize=4096)
def _index_map(layout: EnsembleLayout, image: tuple[int, ...], scope) -> np.ndarray:
    """``idx`` with ``(T(p) v)[i] = v[idx[i]]``."""
    mask = _scope_mask(layout, scope)
    m = len(mask)
    n = layout.n_molecules
    if len(image) != n:
        raise ValidationError(f"permutation acts on {len(image)} molecules, layout has {n}")
    inv = Permutation(image).inverse().image
    order = [inv[y] * m + a if mask[a] else y * m + a for y in range(n) for a in range(m)]
    idx = np.arange(layout.dim).reshape(layout.dims).transpose(order).reshape(-1)
    idx.setflags(write=False)
    return idx


def permutation_operator(layout: EnsembleLayout, p: Permutation, scope="global") -> np.ndarray:
    """0/1 unitary implementing ``p`` on the molecules (or on one party's atoms)."""
    idx = _index_map(layout, p.image, scope)
    t = np.zeros((layout.dim, layout.dim))
    t[np.arange(layout.dim), idx] = 1.0
    return t


def apply_permutation(q, p: Permutation, scope="global"):
    """``T(p) q`` for a state vector, ``T(p) q T(p)^dag`` for a density operator."""
    idx = _index_map(q.layout, p.image, scope)
    if isinstance(q, StateVector):
        return StateVector(q.amplitudes[idx], q.layout)
    return DensityOperator(q.matrix[np.ix_(idx, idx)], q.layout)


def _twirl_matrix(mat: np.ndarray, layout: EnsembleLayout, scope) -> np.ndarray:
    perms = all_permutations(layout.n_molecules)
    acc = np.zeros_like(mat)
    for p in perms:
        idx = _index_map(layout, p.image, scope)
        acc += mat[np.ix_(idx, idx)]
    return acc / len(perms)


def _check_budget(layout: EnsembleLayout, terms: int, max_n: int):
    if layout.n_molecules > max_n:
        raise BudgetError(f"twirl over S_{layout.n_molecules} exceeds the N <= {max_n} cap")
    if terms * layout.dim**2 > TWIRL_BUDGET:
        raise BudgetError(f"twirl needs {terms} x {layout.dim}^2 operations, over budget")


def global_twirl(rho: DensityOperator) -> DensityOperator:
    """Average of ``T(p) rho T(p)^dag`` over all of S_N (every atom moves with its molecule)."""
    n = rho.layout.n_molecules
    _check_budget(rho.layout, math.factorial(n), 6)
    return DensityOperator(_twirl_matrix(rho.matrix, rho.layout, "global"), rho.layout)


def party_twirl(rho: DensityOperator, party: str) -> DensityOperator:
    """Average over permutations acting on one party's atoms only."""
    n = rho.layout.n_molecules
    _check_budget(rho.layout, math.factorial(n), 6)
    return DensityOperator(_twirl_matrix(rho.matrix, rho.layout, party), rho.layout)


def local_twirl(rho: DensityOperator) -> DensityOperator:
    """Independent twirls for A and B: ``(P_A (x) P_B) rho``.

    The double sum over ``(p, q)`` factorises into two single sums because
    the A and B actions commute, so the cost is ``2 N!`` terms.
    """
    layout = rho.layout
    if any(a.party is None for a in layout.atoms):
        raise ValidationError("every atom must be assigned to party A or B")
    n = layout.n_molecules
    _check_budget(layout, 2 * math.factorial(n), 5)
    mat = _twirl_matrix(rho.matrix, layout, "A")
    mat = _twirl_matrix(mat, layout, "B")
    return DensityOperator(mat, layout)


# --------------------------------------------------------------------------
# spin-1/2 sectors


def spin_sectors(n: int) -> list[tuple[float, int]]:
    """``[(j, d_j)]`` for ``n`` qubits, ascending ``j``; ``d_j`` is the permutation-space dimension."""
    if n < 1:
        raise ValidationError("N must be ≥ 1")
    out = []
    for k in range(n // 2, -1, -1):  # k = J - j
        two_j = n - 2 * k
        d = math.comb(n, k) * (two_j + 1) // (n - k + 1)
        out.append((two_j / 2, d))
    return out


def frame_of_spin(n: int, j: float) -> tuple[int, ...]:
    """Two-row frame ``(J + j, J - j)`` (trailing zero row dropped)."""
    a = round(n / 2 + j)
    b = n - a
    return (a, b) if b else (a,)


def spin_of_frame(frame) -> float:
    frame = _check_frame(frame)
    if len(frame) > 2:
        raise ValidationError("only frames with at most two rows carry a spin label")
    b = frame[1] if len(frame) == 2 else 0
    return (frame[0] - b) / 2


@dataclass(frozen=True, eq=False)
class Sector:
    label: object  # spin j (float) or Young frame
    multiplicity: int
    projector: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projector).real))


@dataclass(frozen=True, eq=False)
class SectorDecomposition:
    sectors: tuple[Sector, ...]
    layout: EnsembleLayout
    scope: object

    def labels(self):
        return [s.label for s in self.sectors]


def _spin_ops(n: int):
    sx = np.array([[0, 1], [1, 0]], dtype=complex) / 2
    sy = np.array([[0, -1j], [1j, 0]]) / 2
    sz = np.array([[1, 0], [0, -1]], dtype=complex) / 2
    ops = []
    for s in (sx, sy, sz):
        total = np.zeros((2**n, 2**n), dtype=complex)
        for k in range(n):
            total += np.kron(np.kron(np.eye(2**k), s), np.eye(2 ** (n - k - 1)))
        ops.append(total)
    return ops


def _j_from_casimir(x: float) -> float:
    j = (-1 + math.sqrt(max(0.0, 1 + 4 * x))) / 2
    j2 = round(2 * j)
    if abs(j2 / 2 - j) > 1e-6:
        raise ValidationError(f"J^2 eigenvalue {x} is not of the form j(j+1)")
    return j2 / 2


@lru_cache(maxsize=32)
def qubit_sector_projectors(n: int) -> tuple[tuple[float, np.ndarray], ...]:
    """``(j, Pi_j)`` on ``n`` qubits from the eigen-decomposition of total ``J^2``."""
    if n > 12:
        raise BudgetError("qubit sector projectors are built densely for n <= 12")
    jx, jy, jz = _spin_ops(n)
    j2 = (jx @ jx + jy @ jy + jz @ jz).real
    lam, vec = np.linalg.eigh(j2)
    labels = np.array([_j_from_casimir(x) for x in lam])
    out = []
    for j, _ in spin_sectors(n):
        v = vec[:, labels == j]
        proj = v @ v.T
        proj.setflags(write=False)
        out.append((j, proj))
    return tuple(out)


def _embed(local: np.ndarray, layout: EnsembleLayout, atoms: Sequence[int]) -> np.ndarray:
    """``local`` acting on ``atoms`` (in order), identity elsewhere, in layout ordering."""
    dims = layout.dims
    n = len(dims)
    rest = [k for k in range(n) if k not in atoms]
    d_rest = int(np.prod([dims[k] for k in rest])) if rest else 1
    full = np.kron(local, np.eye(d_rest))
    order = list(atoms) + rest
    inv = np.argsort(order)
    t = full.reshape([dims[k] for k in order] * 2)
    t = t.transpose(list(inv) + [n + k for k in inv])
    return t.reshape(layout.dim, layout.dim)


FULL_PROJECTOR_MAX_DIM = 2**11


def sector_projectors(layout: EnsembleLayout, scope="global") -> SectorDecomposition:
    """Total-spin sectors of the qubits in ``scope`` (one qubit per molecule)."""
    mask = _scope_mask(layout, scope)
    sig = layout.molecules[0]
    scoped = [a for a, on in zip(sig, mask) if on]
    if len(scoped) != 1 or scoped[0].dim != 2:
        raise ValidationError("sector projectors need exactly one qubit per molecule in scope")
    if layout.dim > FULL_PROJECTOR_MAX_DIM:
        raise BudgetError(f"full-space projectors are capped at dimension {FULL_PROJECTOR_MAX_DIM}")
    n = layout.n_molecules
    m = len(sig)
    a = mask.index(True)
    atoms = [k * m + a for k in range(n)]
    mult = dict(spin_sectors(n))
    sectors = []
    for j, proj in qubit_sector_projectors(n):
        full = _embed(proj, layout, atoms)
        full.setflags(write=False)
        sectors.append(Sector(j, mult[j], full))
    return SectorDecomposition(tuple(sectors), layout, scope)


# --------------------------------------------------------------------------
# matrix-element projectors and the canonical Schur basis


@dataclass(frozen=True, eq=False)
class ElementProjectors:
    """``ops[i, k]`` is ``P^y_{ik} = (D_y/N!) sum_p t_y(p)_{ik} T(p)`` on ``(C^d)^{(x) N}``.

    ``empty`` flags a frame with more rows than ``d``; its operators vanish.
    """

    frame: tuple[int, ...]
    d: int
    ops: np.ndarray
    empty: bool


def _qudit_layout(n: int, d: int) -> EnsembleLayout:
    return EnsembleLayout.uniform(n, [(d, None)])


@lru_cache(maxsize=64)
def _group_tables(n: int, d: int, frame: tuple[int, ...]):
    layout = _qudit_layout(n, d)
    rep = young_orthogonal_rep(frame)
    perms = all_permutations(n)
    mats = np.array([rep.matrix(p) for p in perms])
    # T(p) e_k = e_{sigma_p[k]}
    sigmas = np.array([np.argsort(_index_map(layout, p.image, "global")) for p in perms])
    return rep, mats, sigmas


def matrix_element_projectors(n: int, d: int, frame) -> ElementProjectors:
    frame = _check_frame(frame)
    if sum(frame) != n:
        raise ValidationError("frame size does not match N")
    if n > 5:
        raise BudgetError("matrix-element projectors are built for N <= 5")
    dy = hook_dimension(frame)
    dim = d**n
    if dy * dy * dim * dim * 8 > 2**28:
        raise BudgetError("matrix-element projectors exceed the dense memory cap")
    if len(frame) > d:
        return ElementProjectors(frame, d, np.zeros((dy, dy, dim, dim)), True)
    _, mats, sigmas = _group_tables(n, d, frame)
    ops = np.zeros((dy, dy, dim, dim))
    cols = np.arange(dim)
    scale = dy / math.factorial(n)
    for t, sigma in zip(mats, sigmas):
        ops[:, :, sigma, cols] += scale * t[:, :, None]
    return ElementProjectors(frame, d, ops, False)


def _apply_element(n, d, frame, i, k, vec):
    """``P^y_{ik} vec`` without forming the operator."""
    rep, mats, sigmas = _group_tables(n, d, frame)
    out = np.zeros_like(vec)
    scale = hook_dimension(frame) / math.factorial(n)
    for t, sigma in zip(mats, sigmas):
        c = t[i, k]
        if c != 0.0:
            out[sigma] += scale * c * vec
    return out


@lru_cache(maxsize=64)
def multiplicity_basis(n: int, d: int, frame: tuple[int, ...], count: int | None = None) -> np.ndarray:
    """Orthonormal vectors spanning (the first ``count`` directions of) ``range(P^y_{11})``.

    Gram-Schmidt over the columns ``P^y_{11} e_k`` for ``k = 0, 1, ...``;
    this fixes the canonical choice of the multiplicity subspace.
    """
    frame = _check_frame(frame)
    target = schur_weyl_multiplicity(frame, d)
    if count is not None:
        target = min(target, count)
    dim = d**n
    if dim > 6**5:
        raise BudgetError("Schur basis construction capped at d^N <= 6^5")
    basis = []
    for k in range(dim):
        if len(basis) >= target:
            break
        e = np.zeros(dim)
        e[k] = 1.0
        v = _apply_element(n, d, frame, 0, 0, e)
        for b in basis:
            v -= (b @ v) * b
        nrm = np.linalg.norm(v)
        if nrm > GS_TOL:
            basis.append(v / nrm)
    out = np.array(basis).reshape(len(basis), dim)
    out.setflags(write=False)
    return out


def schur_vectors(n: int, d: int, frame, count: int | None = None) -> np.ndarray:
    """``vecs[i, j]`` is the canonical ``|y, i, j>``; ``i`` indexes the irrep, ``j`` the multiplicity."""
    frame = _check_frame(frame)
    base = multiplicity_basis(n, d, frame, count)
    dy = hook_dimension(frame)
    out = np.zeros((dy, base.shape[0], d**n))
    for j, v in enumerate(base):
        for i in range(dy):
            out[i, j] = _apply_element(n, d, frame, i, 0, v)
    return out
