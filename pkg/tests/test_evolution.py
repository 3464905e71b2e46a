import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import halflab as hl
from halflab.evolution import GhostConsistencyError, loglog_slope

from conftest import make_half_field


def test_lfr_one_step_frozen(lfr):
    # u^1_1 = a_{-1} b u_1 + a_0 u_1 = 5/8 * ... = 7/8 for the delta at 1
    g = hl.apply_half_line(lfr, hl.HalfLineField.dirac(lfr, 1))
    assert g.value(1) == pytest.approx(7 / 8, abs=1e-15)


def test_whole_line_two_steps_frozen(lfr):
    w = hl.apply_whole_line(lfr, hl.WholeLineField.dirac(0), 2)
    assert w.value(-2) == pytest.approx(25 / 64, abs=1e-15)


def test_dirac_ghosts_follow_rule(lfr, o3):
    for s in (lfr, o3):
        for j0 in (1, 2, 5):
            f = hl.HalfLineField.dirac(s, j0)
            want = s.b[0, j0 - 1] if j0 <= s.p_b else 0.0
            assert f.value(0) == want


def test_ghost_contract_enforced(lfr):
    bad = hl.HalfLineField(1, np.array([0.0, 1.0, 0.0]))  # u_0 must be 5
    with pytest.raises(GhostConsistencyError):
        hl.apply_half_line(lfr, bad)


def test_field_indexing(lfr):
    f = hl.HalfLineField.dirac(lfr, 3)
    assert f.j_min == 0
    assert f.value(3) == 1.0
    assert f.value(100) == 0.0
    with pytest.raises(IndexError):
        f.value(-1)


def test_trimmed_keeps_minimum_window(lfr):
    f = hl.HalfLineField(1, np.zeros(12))
    t = f.trimmed()
    assert t.values.size == 2


def test_finite_support_exact(lfr, o3):
    for s in (lfr, o3):
        for j0, n in ((1, 7), (4, 11)):
            g = hl.temporal_green(s, n, j0)
            assert g.field.j_max <= j0 + s.r * n
            assert g.value(j0 + s.r * n + 1) == 0.0


def test_whole_line_mass_conserved(lfr, o3):
    for s in (lfr, o3):
        g = hl.temporal_green_whole(s, 60)
        assert abs(np.sum(g.field.values) - 1.0) < 1e-12


def test_temporal_green_zero_steps(lfr):
    g = hl.temporal_green(lfr, 0, 4)
    assert g.value(4) == 1.0
    assert all(g.value(j) == 0.0 for j in (1, 2, 3, 5, 6))


@given(st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=12),
       st.lists(st.floats(-1.0, 1.0), min_size=1, max_size=12),
       st.integers(1, 12))
def test_superposition(lfr, u_int, v_int, nsteps):
    u = make_half_field(lfr, u_int)
    v = make_half_field(lfr, v_int)
    m = max(len(u_int), len(v_int))
    w = make_half_field(lfr, np.pad(u_int, (0, m - len(u_int)))
                        + np.pad(v_int, (0, m - len(v_int))))
    au = hl.apply_half_line(lfr, u, nsteps)
    av = hl.apply_half_line(lfr, v, nsteps)
    aw = hl.apply_half_line(lfr, w, nsteps)
    top = max(au.j_max, av.j_max, aw.j_max)
    for j in range(1, top + 1):
        assert aw.value(j) == pytest.approx(au.value(j) + av.value(j),
                                            abs=1e-12)


def test_green_superposition_identity(o3):
    # u^n_j = sum_{j0} u^0_{j0} G(n, j0, j) for finitely supported data
    rng = np.random.default_rng(5)
    interior = rng.standard_normal(6)
    n = 9
    direct = hl.apply_half_line(o3, make_half_field(o3, interior), n)
    greens = [hl.temporal_green(o3, n, j0) for j0 in range(1, 7)]
    for j in range(1, direct.j_max + 1):
        total = sum(float(c) * g.value(j) for c, g in zip(interior, greens))
        assert direct.value(j) == pytest.approx(total, abs=1e-12)


def test_hq_norm_values(lfr):
    f = make_half_field(lfr, [3.0, -4.0])
    assert hl.hq_norm(f, math.inf) == 4.0
    assert hl.hq_norm(f, 2) == pytest.approx(5.0, abs=1e-14)
    assert hl.hq_norm(f, 1) == pytest.approx(7.0, abs=1e-14)
    with pytest.raises(ValueError):
        hl.hq_norm(f, 0.5)


def test_hq_norm_ignores_ghosts(lfr):
    # the norm is over the interior cells only; ghosts carry rule values
    f = make_half_field(lfr, [1.0])
    assert f.value(0) == 5.0
    assert hl.hq_norm(f, math.inf) == 1.0


def test_growth_experiment_shapes(lfr):
    res = hl.growth_experiment(lfr, 2, [8, 16], 40, record=[10, 20, 40])
    assert set(res.ratios) == {8, 16}
    assert res.ns.tolist() == [10, 20, 40]
    assert res.max_ratio.shape == (3,)
    rows = res.rows
    assert rows[0][0] == 8 and rows[-1][0] == 16
    assert all(len(row) == 3 for row in rows)


def test_growth_experiment_record_consistency(lfr):
    full = hl.growth_experiment(lfr, math.inf, [16], 30)
    sub = hl.growth_experiment(lfr, math.inf, [16], 30, record=[7, 30])
    i7 = np.where(full.ns == 7)[0][0]
    assert sub.ratios[16][0] == pytest.approx(full.ratios[16][i7], abs=0)
    assert sub.ratios[16][1] == pytest.approx(full.ratios[16][-1], abs=0)


def test_growth_experiment_validation(lfr):
    with pytest.raises(ValueError):
        hl.growth_experiment(lfr, 2, [], 10)
    with pytest.raises(ValueError):
        hl.growth_experiment(lfr, 0.5, [4], 10)
    with pytest.raises(ValueError):
        hl.growth_experiment(lfr, 2, [4], 10, record=[0])


def test_loglog_slope_recovers_power():
    ns = np.arange(10, 200)
    vals = 3.0 * ns ** 0.75
    assert loglog_slope(ns, vals, 10, 199) == pytest.approx(0.75, abs=1e-12)


def test_apply_validation(lfr):
    f = hl.HalfLineField.dirac(lfr, 1)
    with pytest.raises(ValueError):
        hl.apply_half_line(lfr, f, -1)
    f2 = hl.HalfLineField(2, np.zeros(3))
    with pytest.raises(ValueError):
        hl.apply_half_line(lfr, f2)
