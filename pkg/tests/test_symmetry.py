import math
from fractions import Fraction

import numpy as np
import pytest

from snssr.core import BudgetError, DensityOperator, EnsembleLayout, StateVector, ValidationError
from snssr.entanglement import singlet
from snssr.symmetry import (
    Permutation,
    all_permutations,
    apply_permutation,
    global_twirl,
    hook_dimension,
    local_twirl,
    matrix_element_projectors,
    party_twirl,
    multiplicity_basis,
    partitions,
    permutation_operator,
    schur_weyl_multiplicity,
    sector_projectors,
    spin_sectors,
    standard_tableaux,
    young_orthogonal_rep,
)
from snssr.core import tensor_compose


def qubits(n, party=None):
    return EnsembleLayout.uniform(n, [(2, party)])


def random_density(layout, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(layout.dim, layout.dim)) + 1j * rng.normal(size=(layout.dim, layout.dim))
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real, layout)


@pytest.mark.parametrize(
    "n, expected",
    [(1, [(0.5, 1)]), (2, [(0, 1), (1, 1)]), (3, [(0.5, 2), (1.5, 1)]), (4, [(0, 2), (1, 3), (2, 1)])],
)
def test_spin_sectors(n, expected):
    assert spin_sectors(n) == expected


@pytest.mark.parametrize("n", range(1, 13))
def test_spin_sector_dimension_sum(n):
    assert sum(d * (2 * j + 1) for j, d in spin_sectors(n)) == 2**n


def test_spin_sectors_rejects_zero():
    with pytest.raises(ValidationError, match="N must be ≥ 1"):
        spin_sectors(0)


@pytest.mark.parametrize("frame, dim", [((5,), 1), ((2, 1), 2), ((2, 2), 2), ((3, 2, 1), 16), ((1, 1, 1, 1), 1)])
def test_hook_dimension(frame, dim):
    assert hook_dimension(frame) == dim
    assert len(standard_tableaux(frame)) == dim


@pytest.mark.parametrize("n", range(1, 7))
def test_hook_dimension_squares_sum_to_group_order(n):
    assert sum(hook_dimension(f) ** 2 for f in partitions(n)) == math.factorial(n)


@pytest.mark.parametrize("n, d", [(3, 2), (4, 2), (3, 3), (4, 3), (5, 2)])
def test_schur_weyl_dimension_count(n, d):
    total = sum(hook_dimension(f) * schur_weyl_multiplicity(f, d) for f in partitions(n, max_rows=d))
    assert total == d**n


def test_trivial_and_sign_irreps():
    rep = young_orthogonal_rep((3,))
    for p in all_permutations(3):
        assert np.array_equal(rep.matrix(p), [[1.0]])
    sign = young_orthogonal_rep((1, 1))
    assert np.array_equal(sign.matrix(Permutation((1, 0))), [[-1.0]])


def test_two_one_generators():
    rep = young_orthogonal_rep((2, 1))
    s0, s1 = rep.generators
    assert np.allclose(s0, np.diag(np.diag(s0)))
    assert sorted(np.diag(s0)) == [-1.0, 1.0]
    # axial distance 2 gives the reflection [[1/2, sqrt3/2], [sqrt3/2, -1/2]] up to ordering
    assert np.allclose(sorted(np.abs(np.linalg.eigvalsh(s1))), [1, 1])
    assert abs(s1[0, 1]) == pytest.approx(math.sqrt(3) / 2)


@pytest.mark.parametrize("frame", [(2, 1), (2, 2), (3, 1, 1), (3, 2), (2, 2, 1, 1)])
def test_coxeter_relations(frame):
    gens = young_orthogonal_rep(frame).generators
    eye = np.eye(gens[0].shape[0])
    for i, s in enumerate(gens):
        assert np.allclose(s @ s, eye, atol=1e-12)
        assert np.allclose(s @ s.T, eye, atol=1e-12)
        if i + 1 < len(gens):
            t = s @ gens[i + 1]
            assert np.allclose(t @ t @ t, eye, atol=1e-12)
        for k in range(i + 2, len(gens)):
            assert np.allclose(s @ gens[k], gens[k] @ s, atol=1e-12)


@pytest.mark.parametrize("frame", [(3, 1), (2, 2), (2, 1, 1)])
def test_irrep_is_homomorphism(frame):
    rep = young_orthogonal_rep(frame)
    perms = all_permutations(4)
    for p in perms[::3]:
        for q in perms[::5]:
            assert np.allclose(rep.matrix(p * q), rep.matrix(p) @ rep.matrix(q), atol=1e-12)


def test_irrep_budget():
    with pytest.raises(BudgetError):
        young_orthogonal_rep((4, 3))


def test_permutation_composition_convention():
    p, q = Permutation((1, 2, 0)), Permutation((1, 0, 2))
    assert all((p * q)(x) == p(q(x)) for x in range(3))
    assert (p * p.inverse()).is_identity


def test_permutation_operator_identity():
    layout = EnsembleLayout.bell_pairs(3)
    assert np.array_equal(permutation_operator(layout, Permutation.identity(3)), np.eye(64))


def test_operator_composition_matches_group():
    layout = qubits(3)
    for p in all_permutations(3):
        for q in all_permutations(3):
            lhs = permutation_operator(layout, p * q)
            assert np.array_equal(lhs, permutation_operator(layout, p) @ permutation_operator(layout, q))


def test_party_swap_example():
    # two molecules with atoms (A, A', B); |up up up>|dn dn dn> -> |dn dn up>|up up dn> under Alice's swap
    layout = EnsembleLayout.uniform(2, [(2, "A"), (2, "A"), (2, "B")])
    psi = StateVector.basis([0, 0, 0, 1, 1, 1], layout)
    out = apply_permutation(psi, Permutation((1, 0)), scope="A")
    assert np.array_equal(out.amplitudes, StateVector.basis([1, 1, 0, 0, 0, 1], layout).amplitudes)


def test_twirl_of_basis_state():
    rho = StateVector.basis([0, 1], qubits(2)).density()
    out = global_twirl(rho).matrix
    assert np.allclose(out, np.diag([0, 0.5, 0.5, 0]))


def test_twirl_fixes_invariant_state():
    rho = DensityOperator(np.eye(8) / 8, qubits(3))
    assert np.allclose(global_twirl(rho).matrix, rho.matrix)


@pytest.mark.parametrize("seed", [0, 1])
def test_twirls_are_idempotent(seed):
    rho = random_density(EnsembleLayout.bell_pairs(3), seed)
    once = local_twirl(rho)
    assert np.abs(local_twirl(once).matrix - once.matrix).max() < 1e-10
    g = global_twirl(rho)
    assert np.abs(global_twirl(g).matrix - g.matrix).max() < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_twirl_output_commutes_with_group(n):
    layout = EnsembleLayout.uniform(n, [(2, "A"), (2, "B")]) if n < 4 else EnsembleLayout.uniform(n, [(2, "A")])
    rho = random_density(layout, n)
    if n < 4:
        out = local_twirl(rho).matrix
        scopes = ["A", "B"]
    else:
        out = global_twirl(rho).matrix
        scopes = ["global"]
    for p in all_permutations(n):
        for scope in scopes:
            t = permutation_operator(layout, p, scope)
            assert np.abs(t @ out - out @ t).max() < 1e-12


def test_alice_twirl_gives_two_term_mixture():
    layout = EnsembleLayout.uniform(2, [(2, "A"), (2, "A"), (2, "B")])
    psi = StateVector.basis([0, 0, 0, 1, 1, 1], layout)
    swapped = apply_permutation(psi, Permutation((1, 0)), scope="A")
    mixture = 0.5 * (psi.density().matrix + swapped.density().matrix)
    assert np.array_equal(party_twirl(psi.density(), "A").matrix, mixture)
    # Bob's twirl only relabels the molecules of that mixture
    both = local_twirl(psi.density())
    assert np.allclose(both.matrix, global_twirl(DensityOperator(mixture, layout)).matrix)
    assert np.allclose(party_twirl(both, "A").matrix, both.matrix)


def test_double_singlet_twirl_kills_symmetric_antisymmetric_coherence():
    rho = tensor_compose([singlet(), singlet()]).density()
    out = local_twirl(rho)
    dec = sector_projectors(out.layout, "A")
    pa = next(s.projector for s in dec.sectors if s.label == 0)
    ps = next(s.projector for s in dec.sectors if s.label == 1)
    assert np.abs(pa @ out.matrix @ ps).max() < 1e-12
    assert np.trace(pa @ out.matrix).real == pytest.approx(0.25)
    assert np.trace(ps @ out.matrix).real == pytest.approx(0.75)


def test_n2_twirl_equals_sector_pinching():
    layout = qubits(2)
    rho = random_density(layout, 7)
    dec = sector_projectors(layout)
    pinched = sum(s.projector @ rho.matrix @ s.projector for s in dec.sectors)
    assert np.abs(global_twirl(rho).matrix - pinched).max() < 1e-12


@pytest.mark.parametrize("n", range(1, 7))
def test_sector_ranks_match_spin_sectors(n):
    dec = sector_projectors(qubits(n))
    ranks = {s.label: s.rank for s in dec.sectors}
    assert ranks == {j: int(d * (2 * j + 1)) for j, d in spin_sectors(n)}
    assert np.allclose(sum(s.projector for s in dec.sectors), np.eye(2**n))


def test_single_qubit_sector_is_identity():
    (sector,) = sector_projectors(qubits(1)).sectors
    assert np.array_equal(sector.projector, np.eye(2))


def test_n2_element_projectors_match_sectors():
    dec = {s.label: s.projector for s in sector_projectors(qubits(2)).sectors}
    sym = matrix_element_projectors(2, 2, (2,)).ops[0, 0]
    anti = matrix_element_projectors(2, 2, (1, 1)).ops[0, 0]
    assert np.allclose(sym, dec[1]) and np.allclose(anti, dec[0])
    assert round(np.trace(sym)) == 3 and round(np.trace(anti)) == 1


def test_antisymmetric_three_qubits_vanish():
    ep = matrix_element_projectors(3, 2, (1, 1, 1))
    assert ep.empty and not ep.ops.any()


@pytest.mark.parametrize("n, d, frame", [(3, 2, (2, 1)), (4, 2, (2, 2)), (3, 3, (2, 1))])
def test_element_projector_algebra(n, d, frame):
    ops = matrix_element_projectors(n, d, frame).ops
    dy = ops.shape[0]
    for i in range(dy):
        for k in range(dy):
            for m in range(dy):
                assert np.allclose(ops[i, k] @ ops[k, m], ops[i, m], atol=1e-12)
            assert np.allclose(ops[i, k].T, ops[k, i], atol=1e-12)


def test_multiplicity_basis_is_orthonormal():
    basis = multiplicity_basis(4, 3, (2, 1, 1))
    assert basis.shape[0] == schur_weyl_multiplicity((2, 1, 1), 3)
    assert np.allclose(basis @ basis.conj().T, np.eye(basis.shape[0]), atol=1e-12)


def test_hook_content_against_fraction():
    assert schur_weyl_multiplicity((2, 1), 2) == int(Fraction(2 * 3 * 1, 3)) == 2
