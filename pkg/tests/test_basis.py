import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levymaxdev.basis import (BasisFamily, BasisSystem, Window, boundedness_constants, design,
                              global_basis_eval, haar, legendre, local_basis_eval, make_system,
                              standard_basis_eval, trig, verify_orthonormality)
from levymaxdev.errors import DomainError

ALL_FAMILIES = [haar()] + [trig(J) for J in (2, 4, 6, 8)] + [legendre(J) for J in range(9)]


def test_standard_values():
    assert standard_basis_eval(trig(2), 0, 1.0) == pytest.approx(1 / np.sqrt(2 * np.pi), abs=1e-15)
    assert standard_basis_eval(legendre(1), 1, 1.0) == pytest.approx(np.sqrt(1.5), abs=1e-15)
    assert standard_basis_eval(haar(), 1, 0.75) == 1.0
    assert standard_basis_eval(haar(), 1, 0.25) == -1.0


def test_standard_domain_errors():
    with pytest.raises(DomainError):
        standard_basis_eval(trig(2), 3, 1.0)
    with pytest.raises(DomainError):
        standard_basis_eval(legendre(2), 0, 1.5)
    with pytest.raises(DomainError):
        standard_basis_eval(haar(), 0, -0.1)


def test_family_validation():
    for bad in (("trig", 3), ("trig", 0), ("haar", 2), ("legendre", -1), ("fourier", 2)):
        with pytest.raises(DomainError):
            BasisFamily(*bad)
    with pytest.raises(DomainError):
        Window(1.0, 1.0)
    with pytest.raises(DomainError):
        Window(-1.0, 1.0).require_away_from_zero()


def test_local_values():
    assert local_basis_eval(make_system("haar", None, 0, 1, 4), 0, 0.1) == pytest.approx(2.0)
    sys_t = make_system("trig", 2, 0.5, 1.5, 5)
    assert local_basis_eval(sys_t, 0, 0.5) == pytest.approx(1 / np.sqrt(sys_t.delta))
    # left-hand limit at the right end of the only cell
    assert local_basis_eval(make_system("legendre", 1, 0, 1, 1), 1, 1.0) == pytest.approx(np.sqrt(3.0))
    with pytest.raises(DomainError):
        local_basis_eval(make_system("haar", None, 0, 1, 4), 0, 0.3)


def test_global_values():
    s2 = make_system("haar", None, 0, 1, 2)
    assert global_basis_eval(s2, 0, 2, 0.75) == pytest.approx(np.sqrt(2.0))
    assert global_basis_eval(s2, 0, 2, 0.25) == 0.0
    t1 = make_system("trig", 2, 0, 1, 1)
    assert global_basis_eval(t1, 1, 1, 0.5) == pytest.approx(-np.sqrt(2.0))
    with pytest.raises(DomainError):
        global_basis_eval(s2, 0, 3, 0.5)


def test_cell_assignment_half_open():
    s = make_system("haar", None, 0, 1, 4)
    assert list(s.cell_of([0.0, 0.25, 0.5, 0.999, 1.0, 1.01, -0.1])) == [0, 1, 2, 3, 3, -1, -1]


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: f"{f.tag}{f.J}")
def test_orthonormality_all_families(fam):
    for m in (1, 3, 64):
        assert verify_orthonormality(BasisSystem(fam, Window(0.5, 1.5), m)) < 1e-8


def test_orthonormality_examples():
    assert verify_orthonormality(make_system("haar", None, 0, 1, 4)) <= 1e-12
    assert verify_orthonormality(make_system("legendre", 3, 0, 1, 8), 8) <= 1e-10
    assert verify_orthonormality(make_system("trig", 4, 0, 1, 2)) <= 1e-8


def test_orthonormality_against_dense_rule():
    # independent check with a composite midpoint rule of 10^4 points per cell
    s = make_system("trig", 4, 0, 1, 2)
    x = (np.arange(2 * 10**4) + 0.5) / (2 * 10**4)
    cells, vals = design(s, x)
    rows = np.zeros((x.size, s.dim))
    for i, c in enumerate(cells):
        rows[i, c * 5:(c + 1) * 5] = vals[i]
    gram = rows.T @ rows / x.size
    assert np.max(np.abs(gram - np.eye(s.dim))) < 1e-8


def test_boundedness_constants():
    assert boundedness_constants(haar()) == (1.0, 2.0)
    c1, c2 = boundedness_constants(trig(2))
    assert c1 == pytest.approx(np.sqrt(2)) and c2 == pytest.approx(4 * np.sqrt(2))
    # Legendre: sup is sqrt(2J+1) at x = 1; total variation cross-checked on a dense grid
    c1, c2 = boundedness_constants(legendre(2))
    assert c1 == pytest.approx(np.sqrt(5))
    grid = np.linspace(-1, 1, 200001)
    tv = max(np.sqrt(2 * j + 1) * np.sum(np.abs(np.diff(np.polynomial.legendre.Legendre.basis(j)(grid))))
             for j in range(3))
    assert c2 == pytest.approx(tv, rel=1e-9)


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: f"{f.tag}{f.J}")
def test_bound_holds_on_dense_grid(fam):
    C1, _ = boundedness_constants(fam)
    for m in (1, 64):
        s = BasisSystem(fam, Window(0.5, 1.5), m)
        x = np.linspace(0.5, 0.5 + s.delta, 2**16, endpoint=False)
        _, vals = design(s, x)
        assert np.max(np.sqrt(s.delta) * np.abs(vals)) <= C1 + 1e-9


@pytest.mark.parametrize("fam", ALL_FAMILIES, ids=lambda f: f"{f.tag}{f.J}")
def test_scaling_law(fam):
    sups = []
    for m in (1, 8, 64):
        s = BasisSystem(fam, Window(0.5, 1.5), m)
        x = np.linspace(0.5, 0.5 + s.delta, 4097)
        x[-1] = np.nextafter(x[-1], 0)
        _, vals = design(s, x)
        sups.append(np.sqrt(s.delta) * np.max(np.abs(vals), axis=0))
    assert np.allclose(sups[0], sups[1], rtol=0, atol=1e-12)
    assert np.allclose(sups[0], sups[2], rtol=0, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0), st.integers(1, 9), st.sampled_from(ALL_FAMILIES[:8]))
def test_disjoint_support(x, m, fam):
    s = BasisSystem(fam, Window(0.0, 1.0), m)
    for p in range(1, m + 1):
        for p2 in range(p + 1, m + 1):
            assert global_basis_eval(s, 0, p, x) * global_basis_eval(s, fam.J, p2, x) == 0.0


def test_system_json_roundtrip():
    s = make_system("legendre", 3, 0.5, 1.5, 7)
    d = json.loads(json.dumps(s.to_dict()))
    assert set(d) == {"family", "J", "a", "b", "m"}
    assert BasisSystem.from_dict(d) == s
