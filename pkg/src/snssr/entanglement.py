"""Entanglement of Bell-pair ensembles under local S_N twirling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .core import (
    EIG_CLIP,
    BudgetError,
    DensityOperator,
    EnsembleLayout,
    StateVector,
    ValidationError,
    entropy_bits,
    shannon_bits,
    tensor_compose,
)
from .symmetry import (
    global_twirl,
    hook_dimension,
    local_twirl,
    partitions,
    schur_vectors,
    spin_of_frame,
)

UP, DOWN = 0, 1
BIORTHOGONAL_TOL = 1e-8
DROP_WEIGHT = 1e-12


def _label_json(label):
    return list(label) if isinstance(label, tuple) else label


@dataclass(frozen=True)
class SectorRow:
    """One block of the locally twirled state.

    ``label_a``/``label_b`` are spins ``j`` for qubit-per-molecule parties and
    Young frames otherwise.  In the Bell-ensemble closed form both are ``j``.
    """

    label_a: object
    label_b: object
    weight: float
    entanglement: float

    @property
    def j(self):
        return self.label_a if self.label_a == self.label_b else None

    def to_dict(self) -> dict:
        return {
            "j": _label_json(self.j),
            "j_a": _label_json(self.label_a),
            "j_b": _label_json(self.label_b),
            "weight": self.weight,
            "entanglement": self.entanglement,
        }


@dataclass(frozen=True)
class ConstrainedEntanglementReport:
    rows: tuple[SectorRow, ...]
    unconstrained: float
    n: int

    @property
    def total(self) -> float:
        return float(sum(r.weight * r.entanglement for r in self.rows))

    @property
    def total_weight(self) -> float:
        return float(sum(r.weight for r in self.rows))

    def row(self, j) -> SectorRow:
        for r in self.rows:
            if r.label_a == j and r.label_b == j:
                return r
        raise KeyError(j)

    def to_dict(self) -> dict:
        return {
            "N": self.n,
            "sectors": [r.to_dict() for r in self.rows],
            "total_ebits": self.total,
            "unconstrained_ebits": self.unconstrained,
        }


# --------------------------------------------------------------------------
# pure states


def _side_atoms(layout: EnsembleLayout, bipartition) -> tuple[list[int], list[int]]:
    n = len(layout.dims)
    if bipartition is None:
        a = list(layout.party_atoms("A"))
        b = list(layout.party_atoms("B"))
        if len(a) + len(b) != n:
            raise ValidationError("every atom must be assigned to party A or B")
    else:
        a = sorted(set(int(k) for k in bipartition))
        b = [k for k in range(n) if k not in a]
    if not a or not b:
        raise ValidationError("both parties must own at least one atom")
    return a, b


def schmidt_matrix(psi: StateVector, bipartition=None) -> np.ndarray:
    """Amplitudes reshaped to ``(dim_A, dim_B)``."""
    a, b = _side_atoms(psi.layout, bipartition)
    dims = psi.layout.dims
    t = psi.amplitudes.reshape(dims).transpose(a + b)
    return t.reshape(int(np.prod([dims[k] for k in a])), -1)


def _marginals(psi: StateVector, bipartition):
    m = schmidt_matrix(psi, bipartition)
    a, b = _side_atoms(psi.layout, bipartition)
    rho_a = DensityOperator(m @ m.conj().T, psi.layout.select(a))
    rho_b = DensityOperator(m.T @ m.conj(), psi.layout.select(b))
    return rho_a, rho_b


def pure_entanglement(psi: StateVector, bipartition=None) -> float:
    """Entropy of entanglement in ebits.

    ``bipartition`` is the set of flat atom indices on Alice's side; by
    default the layout's party labels decide.
    """
    if not psi.is_normalized():
        raise ValidationError("state is not normalized")
    rho_a, rho_b = _marginals(psi, bipartition)
    ea, eb = entropy_bits(rho_a), entropy_bits(rho_b)
    if abs(ea - eb) > 1e-9:
        raise ArithmeticError(f"marginal entropies disagree: {ea} vs {eb}")
    return ea


def biorthogonal_entanglement(components: Sequence[tuple[float, StateVector]], bipartition=None) -> float:
    """Weighted sum of component entanglements for a locally distinguishable mixture.

    Refuses inputs whose components are not orthogonal on both sides, since
    the weighted sum is then not the entanglement of the mixture.
    """
    components = list(components)
    probs = np.array([p for p, _ in components], dtype=float)
    if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
        raise ValidationError("component probabilities must be non-negative and sum to 1")
    margs = [_marginals(psi, bipartition) for _, psi in components]
    for k in range(len(margs)):
        for l in range(k + 1, len(margs)):
            for side in (0, 1):
                overlap = abs(np.vdot(margs[k][side].matrix, margs[l][side].matrix))
                if overlap > BIORTHOGONAL_TOL:
                    raise ValidationError(
                        f"components {k} and {l} are not locally orthogonal (overlap {overlap:.3g})"
                    )
    return float(sum(p * pure_entanglement(psi, bipartition) for p, psi in components))


# --------------------------------------------------------------------------
# Bell-pair ensembles


def bell_pair(alpha: float, beta: float) -> StateVector:
    """``alpha |dn dn> + beta |up up>`` on one molecule (A atom, B atom)."""
    amps = np.zeros(4)
    amps[2 * DOWN + DOWN] = alpha
    amps[2 * UP + UP] = beta
    return StateVector(amps, EnsembleLayout.bell_pairs(1))


def singlet() -> StateVector:
    amps = np.zeros(4)
    amps[2 * UP + DOWN] = 1
    amps[2 * DOWN + UP] = -1
    return StateVector(amps / math.sqrt(2), EnsembleLayout.bell_pairs(1))


def ensemble_state(pair: StateVector, n: int) -> StateVector:
    return tensor_compose([pair] * n)


def _check_amplitudes(alpha, beta):
    if abs(alpha**2 + beta**2 - 1) > 1e-12:
        raise ValidationError("alpha^2 + beta^2 must equal 1")


def log_sector_dims(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``(j, log d_j)`` for ``n`` qubits, ascending ``j``, via log-gamma."""
    if n < 1:
        raise ValidationError("N must be ≥ 1")
    k = np.arange(n // 2, -1, -1)  # J - j
    js = (n - 2 * k) / 2
    logd = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1) + np.log(n - 2 * k + 1) - np.log(n - k + 1)
    return js, logd


def _sector_terms(n: int, a: float, b: float):
    """Per sector: log of the total weight and the Schmidt-weight entropy (bits).

    Inside sector ``j`` the Schmidt weights are ``a^(J-m) b^(J+m)`` for
    ``|m| <= j``, a truncated geometric sequence with ratio ``b/a``.  Both the
    sum and the entropy are evaluated in closed form with ``expm1``; a short
    series takes over when the sequence is almost flat.
    """
    js, logd = log_sector_dims(n)
    k = n / 2 - js
    size = 2 * js + 1
    if a == b:
        # uniform Schmidt weights inside every sector
        return js, logd + np.log(size) + n * math.log(a), np.log2(size)
    if a == 0 or b == 0:
        # only |dd...d> or |uu...u> survives, inside the top sector
        return js, np.where(js == n / 2, 0.0, -np.inf), np.zeros_like(js)
    la, lb = math.log(a), math.log(b)
    step = abs(lb - la)
    top = np.maximum(k * la + (n - k) * lb, (n - k) * la + k * lb)
    x = size * step
    log_ratio = np.log(-np.expm1(-x)) - math.log(-math.expm1(-step))
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        mean = np.where(
            x < 1e-3,
            (size - 1) / 2 - (size**2 - 1) * step / 12 + (size**4 - 1) * step**3 / 720,
            1 / np.expm1(step) - size / np.expm1(x),
        )
    ent = np.maximum(0.0, (log_ratio + step * mean) / math.log(2))
    return js, logd + top + log_ratio, ent


def sector_weights(n: int, alpha_sq: float = 0.5) -> list[tuple[float, float]]:
    """``[(j, d_j^2 wp_j)]``: probability of total spin ``j`` for the ensemble."""
    if not 0 <= alpha_sq <= 1:
        raise ValidationError("alpha^2 must lie in [0, 1]")
    js, logw, _ = _sector_terms(n, alpha_sq, 1 - alpha_sq)
    return [(float(j), float(np.exp(w))) for j, w in zip(js, logw)]


def bell_ensemble_constrained_entanglement(alpha: float, beta: float, n: int) -> ConstrainedEntanglementReport:
    """Closed form ``sum_j d_j^2 wp_j E(phi_j)`` for ``n`` copies of ``alpha|dd> + beta|uu>``."""
    _check_amplitudes(alpha, beta)
    a, b = alpha**2, beta**2
    js, logw, ent = _sector_terms(n, a, b)
    rows = tuple(SectorRow(float(j), float(j), float(np.exp(w)), float(e)) for j, w, e in zip(js, logw, ent))
    return ConstrainedEntanglementReport(rows, n * shannon_bits([a, b]), n)


def asymptotic_loss(n: int) -> float:
    """Leading-order constrained entanglement ``(1/2) log2 N`` of a large Bell ensemble."""
    if n < 2:
        raise ValidationError("N must be ≥ 2")
    return 0.5 * math.log2(n)


def multicopy_recovery(c: int) -> tuple[float, float]:
    """``(E, 2C)``: retained and unconstrained ebits for ``C`` copies of two singlets under S_2."""
    if c < 1:
        raise ValidationError("C must be ≥ 1")
    d = 2.0**c
    pa = (d * d - d) / (2 * d * d)
    ps = (d * d + d) / (2 * d * d)
    e = pa * math.log2((d * d - d) / 2) + ps * math.log2((d * d + d) / 2)
    return e, 2.0 * c


def multicopy_deficit(c: int) -> float:
    """``1 - (2C - E)``, evaluated without cancellation.

    With ``x = 2^-C`` this is ``[(1-x) log2(1-x) + (1+x) log2(1+x)] / 2``; the
    lost entanglement ``2C - E`` approaches 1 from below.
    """
    if c < 1:
        raise ValidationError("C must be ≥ 1")
    x = 2.0**-c
    return (0.5 * math.log1p(-x * x) + 0.5 * x * (math.log1p(x) - math.log1p(-x))) / math.log(2)


def irrelevant_information(rho: DensityOperator) -> float:
    """Entropy gained by forgetting the molecule ordering: ``S(P rho) - S(rho)``."""
    gap = entropy_bits(global_twirl(rho)) - entropy_bits(rho)
    return max(0.0, gap)


# --------------------------------------------------------------------------
# brute force


def _party_block(layout: EnsembleLayout, party: str):
    layout.require_uniform()
    sig = layout.molecules[0]
    local = [k for k, a in enumerate(sig) if a.party == party]
    if not local:
        raise ValidationError(f"party {party} owns no atoms")
    d = math.prod(sig[k].dim for k in local)
    m = len(sig)
    atoms = [mol * m + k for mol in range(layout.n_molecules) for k in local]
    return atoms, d


def _label(frame, d):
    return spin_of_frame(frame) if d == 2 else frame


def _local_components(n: int, d: int):
    """``[(label, isometry)]`` for every frame and irrep row: columns span ``range P^y_{ii}``."""
    out = []
    for frame in partitions(n, max_rows=d):
        vecs = schur_vectors(n, d, frame)  # (D_y, mult, d^n)
        for i in range(hook_dimension(frame)):
            out.append((_label(frame, d), frame, vecs[i].T))
    return out


def constrained_entanglement_bruteforce(psi: StateVector) -> ConstrainedEntanglementReport:
    """Locally twirl ``|psi><psi|`` and split it into its biorthogonal pure components.

    Each component is the projection onto one (frame, irrep row) block for
    Alice times one for Bob; it must come out pure, otherwise the weighted
    sum below would not be the constrained entanglement and we refuse.
    """
    layout = psi.layout
    n = layout.n_molecules
    if n > 5:
        raise BudgetError("brute-force constrained entanglement is capped at N <= 5")
    if not psi.is_normalized():
        raise ValidationError("state is not normalized")
    atoms_a, d_a = _party_block(layout, "A")
    atoms_b, d_b = _party_block(layout, "B")
    if len(atoms_a) + len(atoms_b) != len(layout.dims):
        raise ValidationError("every atom must be assigned to party A or B")

    twirled = local_twirl(psi.density())
    dims = layout.dims
    na = len(dims)
    order = atoms_a + atoms_b
    dim_a, dim_b = d_a**n, d_b**n
    r = twirled.matrix.reshape(dims + dims).transpose(order + [na + k for k in order])
    r = r.reshape(dim_a, dim_b, dim_a, dim_b)

    comps_a = _local_components(n, d_a)
    comps_b = _local_components(n, d_b)
    grouped: dict = {}
    for lab_a, fr_a, va in comps_a:
        # contract Alice's legs once per block
        ra = np.einsum("ai,abcd,ck->ibkd", va, r, va, optimize=True)
        for lab_b, fr_b, vb in comps_b:
            sigma = np.einsum("bj,ibkd,dl->ijkl", vb, ra, vb, optimize=True)
            ra_dim, rb_dim = va.shape[1], vb.shape[1]
            mat = sigma.reshape(ra_dim * rb_dim, ra_dim * rb_dim)
            p = float(np.real(np.trace(mat)))
            if p < DROP_WEIGHT:
                continue
            mat = mat / p
            purity = float(np.real(np.vdot(mat, mat)))
            if purity < 1 - 1e-8:
                raise ValidationError("twirled state is not a biorthogonal mixture of pure states")
            lam, vec = np.linalg.eigh(mat)
            top = vec[:, -1].reshape(ra_dim, rb_dim)
            sv = np.linalg.svd(top, compute_uv=False) ** 2
            e = shannon_bits(sv / sv.sum())
            key = ((fr_a, fr_b), lab_a, lab_b)
            w, we = grouped.get(key, (0.0, 0.0))
            grouped[key] = (w + p, we + p * e)

    rows = tuple(
        SectorRow(lab_a, lab_b, w, we / w)
        for (_, lab_a, lab_b), (w, we) in sorted(grouped.items(), key=lambda kv: kv[0][0])
    )
    return ConstrainedEntanglementReport(rows, pure_entanglement(psi), n)
