"""Dense states and operators on ensemble tensor spaces.

Basis ordering is molecule-major, atom-minor: the flat index of a basis
ket runs over molecule 0's atoms first (in declared order), then molecule
1's, and so on.  Each atom uses its computational basis in ascending order.
With this layout a permutation of molecules is a pure permutation of
tensor axes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence, Union

import numpy as np

MAX_DIM = 2**14
HERMITIAN_TOL = 1e-10
NORM_TOL = 1e-10
EIG_CLIP = 1e-12
PPT_TOL = 1e-10

PARTIES = ("A", "B", None)


class SSRError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(SSRError, ValueError):
    """A precondition on the inputs does not hold."""


class BudgetError(SSRError):
    """The requested computation exceeds a dense-representation or group-sum cap."""


@dataclass(frozen=True)
class Atom:
    dim: int
    party: str | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError(f"atom dimension must be a positive integer, got {self.dim}")
        if self.party not in PARTIES:
            raise ValidationError(f"party must be 'A', 'B' or None, got {self.party!r}")


@dataclass(frozen=True)
class EnsembleLayout:
    """N molecules, each a tuple of atoms.

    A layout whose molecules do not share one atom signature is allowed as an
    intermediate (for example the two factors of ``rho_A (x) rho_B``), but
    anything that permutes molecules requires :attr:`is_uniform`.
    """

    molecules: tuple[tuple[Atom, ...], ...]

    def __post_init__(self):
        mols = tuple(tuple(a if isinstance(a, Atom) else Atom(*a) for a in m) for m in self.molecules)
        object.__setattr__(self, "molecules", mols)
        if not mols or any(len(m) == 0 for m in mols):
            raise ValidationError("layout needs at least one molecule and every molecule needs an atom")
        if self.dim > MAX_DIM:
            raise BudgetError(f"total dimension {self.dim} exceeds cap {MAX_DIM}")

    @classmethod
    def uniform(cls, n: int, atoms: Sequence) -> "EnsembleLayout":
        """``n`` identical molecules; ``atoms`` is a list of ``Atom`` or ``(dim, party)``."""
        if n < 1:
            raise ValidationError("N must be ≥ 1")
        sig = tuple(a if isinstance(a, Atom) else Atom(*a) for a in atoms)
        return cls(tuple(sig for _ in range(n)))

    @classmethod
    def bell_pairs(cls, n: int) -> "EnsembleLayout":
        return cls.uniform(n, [(2, "A"), (2, "B")])

    @property
    def n_molecules(self) -> int:
        return len(self.molecules)

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return tuple(a for m in self.molecules for a in m)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(a.dim for a in self.atoms)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    @property
    def is_uniform(self) -> bool:
        return all(m == self.molecules[0] for m in self.molecules)

    @property
    def atoms_per_molecule(self) -> int:
        self.require_uniform()
        return len(self.molecules[0])

    def require_uniform(self):
        if not self.is_uniform:
            raise ValidationError("molecules do not share one atom signature")

    def party_atoms(self, party: str) -> tuple[int, ...]:
        """Flat indices of the atoms owned by ``party``."""
        return tuple(i for i, a in enumerate(self.atoms) if a.party == party)

    def molecule_of(self, atom_index: int) -> int:
        k = atom_index
        for n, m in enumerate(self.molecules):
            if k < len(m):
                return n
            k -= len(m)
        raise ValidationError(f"atom index {atom_index} out of range")

    def select(self, atom_indices: Iterable[int]) -> "EnsembleLayout":
        """Sub-layout on the given atoms; molecules left empty are dropped."""
        keep = set(atom_indices)
        mols = []
        i = 0
        for m in self.molecules:
            sel = tuple(a for k, a in enumerate(m) if i + k in keep)
            if sel:
                mols.append(sel)
            i += len(m)
        return EnsembleLayout(tuple(mols))

    def concat(self, other: "EnsembleLayout") -> "EnsembleLayout":
        return EnsembleLayout(self.molecules + other.molecules)


def _check_layout_dim(layout: EnsembleLayout, n: int):
    if layout.dim != n:
        raise ValidationError(f"array dimension {n} does not match layout dimension {layout.dim}")


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    layout: EnsembleLayout

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        _check_layout_dim(self.layout, amps.size)

    @classmethod
    def normalized(cls, amplitudes, layout: EnsembleLayout) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return cls(amps / nrm, layout)

    @classmethod
    def basis(cls, indices: Sequence[int], layout: EnsembleLayout) -> "StateVector":
        """Computational basis ket with one local index per atom."""
        if len(indices) != len(layout.dims):
            raise ValidationError("need one basis index per atom")
        amps = np.zeros(layout.dim, dtype=complex)
        amps[np.ravel_multi_index(tuple(indices), layout.dims)] = 1.0
        return cls(amps, layout)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm**2 - 1.0) <= tol

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.layout)

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    layout: EnsembleLayout

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError("density operator must be a square matrix")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        _check_layout_dim(self.layout, mat.shape[0])

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return bool(np.abs(self.matrix - self.matrix.conj().T).max() <= tol)

    def is_valid(self, tol: float = HERMITIAN_TOL) -> bool:
        if not self.is_hermitian(tol) or abs(self.trace - 1) > tol:
            return False
        return bool(np.linalg.eigvalsh(self.matrix).min() >= -tol)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def normalized(self) -> "DensityOperator":
        tr = self.trace.real
        if tr <= 0:
            raise ValidationError("cannot normalize an operator with non-positive trace")
        return DensityOperator(self.matrix / tr, self.layout)


Quantum = Union[StateVector, DensityOperator]


def tensor_compose(factors: Sequence[Quantum]) -> Quantum:
    """Kronecker product in the given order; layouts are concatenated molecule-wise."""
    factors = list(factors)
    if not factors:
        raise ValidationError("tensor_compose needs at least one factor")
    kind = type(factors[0])
    if any(type(f) is not kind for f in factors):
        raise ValidationError("cannot mix state vectors and density operators in one composition")
    layout = reduce(EnsembleLayout.concat, (f.layout for f in factors))
    if kind is StateVector:
        return StateVector(reduce(np.kron, (f.amplitudes for f in factors)), layout)
    return DensityOperator(reduce(np.kron, (f.matrix for f in factors)), layout)


def merge_molecules(factors: Sequence[Quantum]) -> Quantum:
    """Compose factors that share a molecule count into one ensemble.

    Molecule ``k`` of the result holds the atoms of molecule ``k`` of every
    factor, in factor order.  This is how several copies of an ensemble
    (or an ensemble plus per-molecule label systems) are packed into the
    same ``N`` molecules rather than into ``N`` more molecules.
    """
    factors = list(factors)
    composed = tensor_compose(factors)
    n = factors[0].layout.n_molecules
    if any(f.layout.n_molecules != n for f in factors):
        raise ValidationError("all factors must have the same number of molecules")
    # flat atom positions in the plain Kronecker order, grouped by (factor, molecule)
    groups = {}
    pos = 0
    for fi, f in enumerate(factors):
        for mi, mol in enumerate(f.layout.molecules):
            groups[(fi, mi)] = list(range(pos, pos + len(mol)))
            pos += len(mol)
    order = [a for mi in range(n) for fi in range(len(factors)) for a in groups[(fi, mi)]]
    molecules = tuple(
        tuple(a for fi in range(len(factors)) for a in factors[fi].layout.molecules[mi]) for mi in range(n)
    )
    layout = EnsembleLayout(molecules)
    return _reorder_atoms(composed, order, layout)


def _reorder_atoms(q: Quantum, order: Sequence[int], layout: EnsembleLayout) -> Quantum:
    """New atom ``k`` is old atom ``order[k]``."""
    dims = q.layout.dims
    n = len(dims)
    if isinstance(q, StateVector):
        t = q.amplitudes.reshape(dims).transpose(order)
        return StateVector(t.reshape(-1), layout)
    t = q.matrix.reshape(dims + dims).transpose(list(order) + [n + k for k in order])
    return DensityOperator(t.reshape(layout.dim, layout.dim), layout)


def _resolve_atoms(layout: EnsembleLayout, keep) -> list[int]:
    if isinstance(keep, str):
        idx = list(layout.party_atoms(keep))
        if keep not in ("A", "B"):
            raise ValidationError(f"unknown party {keep!r}")
    else:
        idx = sorted(set(int(k) for k in keep))
    if not idx:
        raise ValidationError("keep-set is empty")
    if idx[0] < 0 or idx[-1] >= len(layout.dims):
        raise ValidationError("atom index out of range")
    return idx


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    """Reduce ``rho`` onto ``keep``: a party name or an iterable of flat atom indices."""
    idx = _resolve_atoms(rho.layout, keep)
    dims = rho.layout.dims
    n = len(dims)
    drop = [k for k in range(n) if k not in idx]
    t = rho.matrix.reshape(dims + dims)
    # contract each dropped atom's row axis with its column axis
    letters = [chr(ord("a") + k) for k in range(n)] + [chr(ord("A") + k) for k in range(n)]
    for k in drop:
        letters[n + k] = letters[k]
    out = "".join(letters[k] for k in idx) + "".join(letters[n + k] for k in idx)
    red = np.einsum("".join(letters) + "->" + out, t)
    d = int(np.prod([dims[k] for k in idx]))
    return DensityOperator(red.reshape(d, d), rho.layout.select(idx))


def _eigenvalues(rho: DensityOperator) -> np.ndarray:
    if not rho.is_hermitian():
        raise ValidationError("operator is not Hermitian within tolerance")
    lam = np.linalg.eigvalsh(rho.matrix)
    lam = np.where((lam < 0) & (lam >= -HERMITIAN_TOL), 0.0, lam)
    return lam


def entropy_bits(rho: DensityOperator) -> float:
    """Von Neumann entropy in bits, ignoring eigenvalues at or below 1e-12."""
    lam = _eigenvalues(rho)
    lam = lam[lam > EIG_CLIP]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > EIG_CLIP]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def _require_bipartite(layout: EnsembleLayout):
    if any(a.party is None for a in layout.atoms):
        raise ValidationError("every atom must be assigned to party A or B")


def partial_transpose(rho: DensityOperator, party: str) -> np.ndarray:
    """Transpose the tensor factors of ``party`` in the computational basis."""
    _require_bipartite(rho.layout)
    if party not in ("A", "B"):
        raise ValidationError(f"unknown party {party!r}")
    dims = rho.layout.dims
    n = len(dims)
    perm = list(range(2 * n))
    for k in rho.layout.party_atoms(party):
        perm[k], perm[n + k] = n + k, k
    return rho.matrix.reshape(dims + dims).transpose(perm).reshape(rho.matrix.shape)


def is_ppt(rho: DensityOperator, party: str = "B") -> bool:
    pt = partial_transpose(rho, party)
    return bool(np.linalg.eigvalsh(pt).min() >= -PPT_TOL)


def measure_atoms(rho: DensityOperator, atom_indices: Sequence[int], tol: float = 1e-12):
    """Projective computational-basis measurement of some atoms.

    Returns ``[(outcome, probability, post_state)]`` with the post-measurement
    state on the remaining atoms; outcomes below ``tol`` are skipped.
    """
    idx = _resolve_atoms(rho.layout, atom_indices)
    dims = rho.layout.dims
    n = len(dims)
    rest = [k for k in range(n) if k not in idx]
    if not rest:
        raise ValidationError("cannot measure every atom")
    order = idx + rest
    t = rho.matrix.reshape(dims + dims).transpose(order + [n + k for k in order])
    dm = int(np.prod([dims[k] for k in idx]))
    dr = int(np.prod([dims[k] for k in rest]))
    t = t.reshape(dm, dr, dm, dr)
    layout = rho.layout.select(rest)
    results = []
    for o in range(dm):
        block = t[o, :, o, :]
        p = float(np.real(np.trace(block)))
        if p > tol:
            outcome = tuple(int(x) for x in np.unravel_index(o, [dims[k] for k in idx]))
            results.append((outcome, p, DensityOperator(block / p, layout)))
    return results
