"""Generator families: the nonlinearity i, its primitive, the conjugate,
and the structural assumption checker."""

import numpy as np
import pytest

from vortexring.errors import ConfigurationError
from vortexring.profiles import (GeneratorPair, check_assumptions, eval_H,
                                 eval_I, eval_J, eval_J_numeric, eval_dJds,
                                 eval_i, make_generator)

ALL_FAMILIES = [
    make_generator("power_law", p=1.0),
    make_generator("power_law", p=2.0),
    make_generator("turkington", alpha=1.0),
    make_generator("beltrami", p=1.0),
    make_generator("mixed", p=1.0),
]


def test_eval_i_examples():
    pl = make_generator("power_law", p=1.0)
    assert eval_i(pl, 2.0, 3.0) == 3.0
    tk = make_generator("turkington", alpha=1.0)
    np.testing.assert_allclose(eval_i(tk, 2.0, 3.0), 1.75, rtol=1e-15)
    for gen in ALL_FAMILIES:
        assert eval_i(gen, 1.3, -1.0) == 0.0
        assert eval_i(gen, 1.3, 0.0) == 0.0


def test_eval_J_examples():
    pl = make_generator("power_law", p=1.0)
    np.testing.assert_allclose(eval_J(pl, 1.0, 2.0), 2.0, rtol=1e-15)
    tk = make_generator("turkington", alpha=1.0)
    np.testing.assert_allclose(eval_J(tk, 2.0, 3.0), 8.0, rtol=1e-15)
    for gen in ALL_FAMILIES:
        assert eval_J(gen, 1.0, -5.0) == 0.0


def test_eval_dJds_examples_and_roundtrips(rng):
    p2 = make_generator("power_law", p=2.0)
    np.testing.assert_allclose(eval_dJds(p2, 1.0, 4.0), 2.0, rtol=1e-14)
    tk = make_generator("turkington", alpha=1.0)
    np.testing.assert_allclose(eval_dJds(tk, 2.0, 3.0), 8.0, rtol=1e-14)
    for gen in ALL_FAMILIES:
        rs = rng.uniform(0.5, 2.0, 30)
        ts = rng.uniform(1e-3, 10.0, 30)
        svals = eval_i(gen, rs, ts)
        back = eval_dJds(gen, rs, svals)
        np.testing.assert_allclose(back, ts, rtol=1e-8)
        # other direction, on values safely inside the range of i
        ss = svals * (1.0 + 1e-3) + 1e-6
        tt = eval_dJds(gen, rs, ss)
        forward = eval_i(gen, rs, tt)
        np.testing.assert_allclose(forward, ss, rtol=1e-8)


def test_numeric_conjugate_matches_closed_forms(rng):
    for gen in ALL_FAMILIES:
        rs = rng.uniform(0.5, 2.0, 12)
        ss = rng.uniform(0.0, 20.0, 12)
        closed = eval_J(gen, rs, ss)
        numeric = np.array([eval_J_numeric(gen, r, s)
                            for r, s in zip(rs, ss)])
        np.testing.assert_allclose(numeric, closed,
                                   rtol=1e-6, atol=1e-9)
        assert eval_J_numeric(gen, 1.0, 0.0) == 0.0


def test_fenchel_young(rng):
    for gen in ALL_FAMILIES:
        rs = rng.uniform(0.5, 2.0, 24)
        ts = rng.uniform(1e-2, 8.0, 24)
        # equality at s = i(r, t)
        ss = eval_i(gen, rs, ts)
        lhs = eval_I(gen, rs, ts) + eval_J(gen, rs, ss)
        np.testing.assert_allclose(lhs, ts * ss, rtol=1e-8, atol=1e-12)
        # inequality elsewhere
        s_other = rng.uniform(0.0, 10.0, 24)
        gap = eval_I(gen, rs, ts) + eval_J(gen, rs, s_other) - ts * s_other
        assert np.all(gap >= -1e-9 * (1.0 + np.abs(ts * s_other)))


def test_J_convex_in_s(rng):
    for gen in ALL_FAMILIES:
        r = 1.2
        s1 = rng.uniform(0.0, 30.0, 50)
        s2 = rng.uniform(0.0, 30.0, 50)
        mid = eval_J(gen, r, 0.5 * (s1 + s2))
        avg = 0.5 * (eval_J(gen, r, s1) + eval_J(gen, r, s2))
        assert np.all(mid <= avg + 1e-12 * (1.0 + np.abs(avg)))


def test_eval_H():
    tk = make_generator("turkington", alpha=1.0)
    for t in (0.3, 1.0, 4.2):
        np.testing.assert_allclose(eval_H(tk, t), t, rtol=1e-14)
    bl = make_generator("beltrami", p=1.0)
    np.testing.assert_allclose(eval_H(bl, 3.0), 3.0, rtol=1e-14)
    for gen in ALL_FAMILIES:
        assert eval_H(gen, 0.0) == 0.0
        assert eval_H(gen, -1.0) == 0.0
    pl = make_generator("power_law", p=2.0)
    assert eval_H(pl, 5.0) == 0.0


def test_H_squared_is_twice_primitive_of_f(rng):
    from scipy.integrate import quad
    for gen in ALL_FAMILIES:
        for t in rng.uniform(0.1, 6.0, 4):
            ref, _ = quad(lambda s: gen.f(s), 0.0, t, limit=200)
            np.testing.assert_allclose(eval_H(gen, t) ** 2, 2.0 * ref,
                                       rtol=1e-10, atol=1e-12)


def test_check_assumptions_families_pass():
    for gen in ALL_FAMILIES:
        report = check_assumptions(gen, n_sample=120)
        assert report["all_pass"], report
    pl = make_generator("power_law", p=1.0)
    report = check_assumptions(pl, n_sample=120)
    d0, d1 = report["a3"]["witness"]
    assert 0.0 < d0 < 1.0
    assert d1 >= 0.0


def test_check_assumptions_rejects_decreasing_g():
    ts = np.linspace(0.0, 10.0, 64)
    bad = GeneratorPair(family="table", table_t=ts,
                        table_f=np.zeros_like(ts), table_g=10.0 - ts)
    report = check_assumptions(bad, n_sample=60)
    assert not report["a1"]["pass"]
    assert not report["all_pass"]


def test_table_family_tracks_closed_form(rng):
    ts = np.linspace(0.0, 60.0, 4001)
    tab = GeneratorPair(family="table", table_t=ts, table_f=np.zeros_like(ts),
                        table_g=ts.copy())
    pl = make_generator("power_law", p=1.0)
    rs = rng.uniform(0.5, 2.0, 6)
    ss = rng.uniform(0.1, 10.0, 6)
    jt = np.array([eval_J_numeric(tab, r, s) for r, s in zip(rs, ss)])
    jc = eval_J(pl, rs, ss)
    np.testing.assert_allclose(jt, jc, rtol=1e-4, atol=1e-6)
    np.testing.assert_allclose(eval_dJds(tab, rs, ss),
                               eval_dJds(pl, rs, ss), rtol=1e-4, atol=1e-6)


def test_make_generator_validation(tmp_path):
    with pytest.raises(ConfigurationError):
        make_generator("no_such_family")
    with pytest.raises(ConfigurationError):
        make_generator("power_law", p=-1.0)
    with pytest.raises(ConfigurationError):
        make_generator("turkington", alpha=0.0)
    path = tmp_path / "tab.csv"
    path.write_text("t,f,g\n0,0,0\n1,0,1\n2,0,2\n")
    gen = make_generator("table", table_path=str(path))
    assert gen.family == "table"
    np.testing.assert_allclose(eval_i(gen, 1.0, 1.5), 1.5, rtol=1e-12)
