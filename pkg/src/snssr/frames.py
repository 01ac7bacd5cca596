"""Permutation reference frames and the activation / distillation examples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DensityOperator,
    EnsembleLayout,
    StateVector,
    ValidationError,
    measure_atoms,
    merge_molecules,
)
from .entanglement import constrained_entanglement_bruteforce, pure_entanglement
from .symmetry import (
    Permutation,
    all_permutations,
    apply_permutation,
    hook_dimension,
    local_twirl,
    partitions,
    permutation_operator,
    schur_vectors,
    schur_weyl_multiplicity,
)

PERFECT_TOL = 1e-9


def classical_label_state(n: int, party: str | None = None) -> StateVector:
    """``|1, 2, ..., N>``: molecule ``k`` carries an ``N``-level label in state ``k``."""
    if not 1 <= n <= 6:
        raise ValidationError("label states are built for 1 <= N <= 6")
    layout = EnsembleLayout.uniform(n, [(n, party)])
    return StateVector.basis(list(range(n)), layout)


def sufficient_frames(n: int, d: int) -> list[tuple[int, ...]]:
    """Frames whose multiplicity in ``(C^d)^{(x) N}`` is at least their irrep dimension."""
    return [f for f in partitions(n, max_rows=d) if schur_weyl_multiplicity(f, d) >= hook_dimension(f)]


def rf_fiducial_state(n: int, d: int, party: str | None = None) -> StateVector:
    """Fiducial frame state built from the canonical Schur basis.

    ``sum_{y} sum_i sqrt(D_y / D) |y, i, i>`` over the sufficient frames, with
    ``D = sum_y D_y^2``.
    """
    if n > 5 or d > 6:
        raise ValidationError("fiducial frame states are built for N <= 5 and d <= 6")
    frames = sufficient_frames(n, d)
    if not frames:
        raise ValidationError("no irrep has sufficient multiplicity")
    total = sum(hook_dimension(f) ** 2 for f in frames)
    amps = np.zeros(d**n)
    for f in frames:
        dy = hook_dimension(f)
        vecs = schur_vectors(n, d, f, count=dy)
        for i in range(dy):
            amps += math.sqrt(dy / total) * vecs[i, i]
    layout = EnsembleLayout.uniform(n, [(d, party)])
    return StateVector.normalized(amps, layout)


@dataclass(frozen=True, eq=False)
class FrameFamily:
    fiducial: StateVector
    states: tuple[StateVector, ...]
    permutations: tuple[Permutation, ...]
    gram: np.ndarray
    frames: tuple[tuple[int, ...], ...]
    D: int

    @property
    def max_offdiag(self) -> float:
        g = np.abs(self.gram) ** 2
        np.fill_diagonal(g, 0.0)
        return float(g.max()) if g.size > 1 else 0.0

    @property
    def perfect(self) -> bool:
        return self.max_offdiag < PERFECT_TOL

    def to_dict(self) -> dict:
        return {
            "N": self.fiducial.layout.n_molecules,
            "d": self.fiducial.layout.dims[0],
            "D": self.D,
            "frames": [list(f) for f in self.frames],
            "max_offdiag_overlap_sq": self.max_offdiag,
            "perfect": self.perfect,
        }


def rf_gram(n: int, d: int) -> FrameFamily:
    fid = rf_fiducial_state(n, d)
    perms = all_permutations(n)
    states = tuple(apply_permutation(fid, p) for p in perms)
    mat = np.array([s.amplitudes for s in states])
    gram = mat.conj() @ mat.T
    frames = tuple(sufficient_frames(n, d))
    return FrameFamily(fid, states, perms, gram, frames, sum(hook_dimension(f) ** 2 for f in frames))


def _frame_states(n: int, party: str, d: int | None):
    if d is None:
        fid = classical_label_state(n, party)
    else:
        fid = rf_fiducial_state(n, d, party)
    return [apply_permutation(fid, p) for p in all_permutations(n)]


def shared_rf_state(n: int, kind: str = "pure", d: int | None = None) -> DensityOperator:
    """Alice's and Bob's frames carrying the same permutation.

    ``kind="mixed"`` is the incoherent average of ``|p_n>|p_n>`` projectors,
    ``kind="pure"`` the projector onto their uniform superposition.  By
    default the frames are classical labels (dimension ``N`` per molecule and
    party); pass ``d`` to use the fiducial construction instead.  The dense
    dimension cap limits the label realization to ``N <= 3``.
    """
    if kind not in ("pure", "mixed"):
        raise ValidationError("kind must be 'pure' or 'mixed'")
    pairs = [merge_molecules([a, b]) for a, b in zip(_frame_states(n, "A", d), _frame_states(n, "B", d))]
    layout = pairs[0].layout
    if kind == "mixed":
        mat = sum(np.outer(s.amplitudes, s.amplitudes.conj()) for s in pairs) / len(pairs)
        return DensityOperator(mat, layout)
    psi = StateVector.normalized(sum(s.amplitudes for s in pairs), layout)
    return psi.density()


# --------------------------------------------------------------------------
# activation and distillation with N = 2 molecules


def _two_qubit(kind: str) -> np.ndarray:
    """``|+> = |j=1, m=0>`` or ``|-> = |j=0, m=0>`` on two qubits."""
    v = np.zeros(4)
    v[1] = 1 / math.sqrt(2)
    v[2] = (1 if kind == "+" else -1) / math.sqrt(2)
    return v


def _from_party_major(amps: np.ndarray, layout: EnsembleLayout) -> StateVector:
    """Amplitudes given with all of Alice's atoms first, reordered to the layout."""
    a = list(layout.party_atoms("A"))
    b = list(layout.party_atoms("B"))
    order = a + b
    t = amps.reshape([layout.dims[k] for k in order]).transpose(np.argsort(order))
    return StateVector(t.reshape(-1), layout)


def activation_state() -> StateVector:
    """``(|+>_A |->_B + |->_A |+>_B) / sqrt 2`` on two molecules of one A and one B qubit."""
    plus, minus = _two_qubit("+"), _two_qubit("-")
    amps = (np.kron(plus, minus) + np.kron(minus, plus)) / math.sqrt(2)
    return _from_party_major(amps, EnsembleLayout.bell_pairs(2))


def _pure_part(rho: DensityOperator) -> StateVector:
    if rho.purity() < 1 - 1e-9:
        raise ValidationError("conditional state is not pure")
    lam, vec = np.linalg.eigh(rho.matrix)
    return StateVector(vec[:, -1], rho.layout)


def frame_assisted_entanglement(psi: StateVector) -> float:
    """Average entanglement after appending ``|p0>_A |p0>_B`` labels, twirling and reading the labels."""
    n = psi.layout.n_molecules
    frame = merge_molecules([classical_label_state(n, "A"), classical_label_state(n, "B")])
    joint = merge_molecules([psi, frame])
    twirled = local_twirl(joint.density())
    m = joint.layout.atoms_per_molecule
    m_sys = psi.layout.atoms_per_molecule
    labels = [mol * m + k for mol in range(n) for k in range(m_sys, m)]
    total = 0.0
    for _, p, post in measure_atoms(twirled, labels):
        total += p * pure_entanglement(_pure_part(post))
    return total


def activation_demo() -> tuple[float, float]:
    """``(E_before, E_after)`` in ebits: without a frame, then with a perfect shared label frame."""
    psi = activation_state()
    before = constrained_entanglement_bruteforce(psi).total
    after = frame_assisted_entanglement(psi)
    return before, after


def two_copy_state() -> StateVector:
    """Two copies of the activation state packed into the same two molecules."""
    psi = activation_state()
    return merge_molecules([psi, psi])


def distillation_demo() -> tuple[float, float]:
    """``(E_one_copy, E_two_copies)``: constrained entanglement of one and two copies."""
    one = constrained_entanglement_bruteforce(activation_state()).total
    two = constrained_entanglement_bruteforce(two_copy_state()).total
    return one, two


def discriminating_observable() -> tuple[np.ndarray, np.ndarray]:
    """``(O, T)`` on Alice's four qubits: ``O = |++><++| + |--><--|`` and the molecule swap.

    Alice's atoms are ordered molecule-major (copy 1, copy 2 inside each
    molecule); copy ``c`` of ``|+->`` lives on that copy's qubit in both molecules.
    """
    layout = EnsembleLayout.uniform(2, [(2, "A"), (2, "A")])
    plus, minus = _two_qubit("+"), _two_qubit("-")

    def pair(u, v):
        # u on (m1c1, m2c1), v on (m1c2, m2c2); reorder to (m1c1, m1c2, m2c1, m2c2)
        t = np.kron(u, v).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3)
        return t.reshape(-1)

    pp, mm = pair(plus, plus), pair(minus, minus)
    obs = np.outer(pp, pp) + np.outer(mm, mm)
    swap = permutation_operator(layout, Permutation((1, 0)))
    return obs, swap
