"""Causality/normalization conditions on the 1+1D lattice example."""

import numpy as np
import pytest

from cohspace.causal import (
    CausalSection,
    check_causal_conditions,
    lattice_weyl_kernel,
    lightcone_commutator,
    section_from_pairs,
    sections_independent,
)
from cohspace.errors import ConfigError, PreconditionError


def random_section(rng, t_range, x_range, n_sites) -> CausalSection:
    vals = {}
    for _ in range(n_sites):
        site = (int(rng.integers(*t_range)), int(rng.integers(*x_range)))
        vals[site] = complex(rng.integers(-3, 4), rng.integers(-3, 4))
    return CausalSection(vals)


def spacelike_triples(rng, count):
    """j near x=-10, k near x=0, j' near x=+10; time extents small enough that
    every cross pair is strictly spacelike."""
    out = []
    for _ in range(count):
        j = random_section(rng, (-1, 2), (-12, -9), int(rng.integers(1, 4)))
        k = random_section(rng, (-1, 2), (-1, 2), int(rng.integers(1, 4)))
        jp = random_section(rng, (-1, 2), (9, 12), int(rng.integers(1, 4)))
        out.append((j, k, jp))
    return out


def test_commutator_support_is_the_closed_cone():
    assert lightcone_commutator(0, 0) == 0
    assert lightcone_commutator(2, 3) == 0
    assert lightcone_commutator(3, 3) == -0.5j
    assert lightcone_commutator(-3, 2) == 0.5j
    assert lightcone_commutator(-1, -2) == 0


def test_weyl_kernel_satisfies_both_conditions_exactly():
    kernel, indep = lattice_weyl_kernel()
    rng = np.random.default_rng(3)
    verdict = check_causal_conditions(kernel, indep, spacelike_triples(rng, 40), tol=1e-12)
    assert verdict.passed
    assert verdict.normal_checked == 40 and verdict.causal_checked == 40
    assert verdict.normal_max == 0.0  # spacelike pairs never touch W's support
    assert verdict.causal_max <= 1e-15


def test_causal_condition_with_timelike_j_pair():
    # j and j' timelike-related: normalization does not apply, causality still must
    kernel, indep = lattice_weyl_kernel()
    j = CausalSection({(0, 0): 1.0})
    jp = CausalSection({(3, 0): 2.0})       # inside j's cone
    k = CausalSection({(0, 100): 1.0})      # far away, independent of both
    verdict = check_causal_conditions(kernel, indep, [(j, k, jp)])
    assert verdict.normal_checked == 0 and verdict.causal_checked == 1
    assert verdict.passed
    assert abs(kernel(j, jp) - 1.0) > 0.1   # genuinely nontrivial pair


def test_precondition_violation_names_sites():
    kernel, indep = lattice_weyl_kernel()
    j = CausalSection({(0, 0): 1.0})
    jp = CausalSection({(0, 10): 1.0})
    k = CausalSection({(1, 1): 1.0})  # timelike to j
    with pytest.raises(PreconditionError, match=r"\(1, 1\)"):
        check_causal_conditions(kernel, indep, [(j, k, jp)])


def test_nonlocal_kernel_fails_normalization():
    kernel, indep = lattice_weyl_kernel(nonlocal_violation=True)
    j = CausalSection({(0, 0): 1.0})
    jp = CausalSection({(1, 10): 1.0})      # spacelike, but W ignores the cone
    k = CausalSection({(0, 100): 1.0})
    verdict = check_causal_conditions(kernel, indep, [(j, k, jp)])
    assert not verdict.passed
    assert verdict.normal_max > 0.1


def test_section_addition_drops_cancelled_sites():
    a = CausalSection({(0, 0): 1.0 + 2j, (1, 1): 3.0})
    b = CausalSection({(0, 0): -1.0 - 2j, (2, 2): 1j})
    s = a + b
    assert s.support == {(1, 1), (2, 2)}
    assert s.values[(1, 1)] == 3.0


def test_section_from_pairs_merges_duplicates():
    s = section_from_pairs([[0, 0, 1.0, 0.0], [0, 0, 2.0, 1.0], [1, 2, 0.0, 0.0]])
    assert s.values == {(0, 0): 3.0 + 1j}
    with pytest.raises(ConfigError):
        section_from_pairs([[0, 0, 1.0]])


def test_sections_independent_helper():
    _, indep = lattice_weyl_kernel()
    a = CausalSection({(0, 0): 1.0})
    b = CausalSection({(0, 5): 1.0})
    c = CausalSection({(5, 2): 1.0})
    assert sections_independent(indep, a, b)
    assert not sections_independent(indep, a, c)


def test_empty_triples_rejected():
    kernel, indep = lattice_weyl_kernel()
    with pytest.raises(ConfigError):
        check_causal_conditions(kernel, indep, [])
