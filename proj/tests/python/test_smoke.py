import math

import pytest

import cusp_spectra as cs


def test_version():
    assert cs.__version__.count(".") == 2


def test_phase_integral_matches_closed_form():
    for p in (1.2, 1.5, 1.8):
        assert cs.phase_integral(p) == pytest.approx(cs.phase_integral_closed_form(p), abs=1e-10)
    assert cs.phase_integral(1.5) == pytest.approx(3.642975971831372, abs=1e-10)


def test_interval_ground_state():
    # -lambda^2 with lambda tanh(lambda r) = 1/eps, eps = r = 1
    e = cs.ground_state_interval(1.0, 1.0)
    lam = math.sqrt(-e)
    assert lam * math.tanh(lam) == pytest.approx(1.0, abs=1e-12)


def test_one_dimensional_ground_state():
    s = cs.eigenvalues_A1(cs.OneDParams(p=1.5, n=1, lam=1.0), 2, accuracy=1e-6)
    assert len(s.values) == 2
    assert s.values[0] < s.values[1] < 0.0
    assert s.values[0] == pytest.approx(-2.6026306715, rel=1e-6)


def test_counting_function_monotone():
    P = cs.OneDParams(p=1.2)
    counts = [cs.counting_function(P, e) for e in (1e-2, 1e-3, 1e-4)]
    assert counts == sorted(counts)
    assert counts[0] >= 1


def test_peak_spectrum_near_one_dimensional_limit():
    s = cs.spectrum_T(cs.PeakModelParams(p=1.5, eps=0.1), 1, s_ratio=1.04, tau_elements=12)
    e1 = cs.eigenvalues_A1(cs.OneDParams(p=1.5), 1).values[0]
    assert s.values[0] * 0.1**4 / e1 == pytest.approx(1.0, abs=1e-2)


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        cs.phase_integral(2.5)
    with pytest.raises(cs.BudgetExceeded):
        cs.spectrum_T(cs.PeakModelParams(p=1.5, eps=0.1), 1, max_unknowns=10)


def test_cli_roundtrip():
    code, out, err = cs.run_cli(["weyl"])
    assert code == 0
    assert out.splitlines()[0] == "control,computed,predicted,ratio"
    assert "verdict pass" in err
    code, _, err = cs.run_cli(["weyl", "--bogus", "1"])
    assert code == 2
