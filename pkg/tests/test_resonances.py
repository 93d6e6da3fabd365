import math

import numpy as np
import pytest

from mazer.profiles import ModeProfile
from mazer.resonances import (ResonanceInfo, WindowTooCoarse, find_resonances,
                              predicted_positions, resonance_condition_roots)
from mazer.semiclassical import wkb_integral

PI = math.pi
MESA = ModeProfile("mesa")
SIN = ModeProfile("sinusoidal")


def test_roots_small_ratio_coefficient():
    roots = resonance_condition_roots(1e-6, range(3))
    coef = PI / wkb_integral(1e-6)
    assert coef == pytest.approx(2.0922, abs=2e-4)
    assert roots[0] == pytest.approx(coef * PI / 12, rel=1e-12)
    assert roots[0] == pytest.approx(0.5477, abs=1e-3)
    # consecutive spacing ~ 1.046 pi
    assert roots[1] - roots[0] == pytest.approx(coef * PI / 2, rel=1e-12)
    assert (roots[1] - roots[0]) / PI == pytest.approx(1.046, abs=2e-3)


def test_roots_match_printed_2092_rule():
    roots = resonance_condition_roots(1e-4, range(0, 201))
    for m, r in enumerate(roots):
        assert r == pytest.approx(2.092 * (m * PI / 2 + PI / 12), rel=5e-3)


def test_mesa_single_window():
    found = find_resonances(MESA, 0.01, (2.5 * PI, 3.5 * PI))
    assert len(found) == 1
    r = found[0]
    assert r.index == 3
    assert abs(r.position - 3 * PI) < 0.01
    assert r.fwhm == pytest.approx(0.04, rel=0.2)
    assert not r.shallow
    assert r.peak_value == pytest.approx(1.0, abs=1e-6)


def test_mesa_parity_alternates():
    found = find_resonances(MESA, 0.01, (0.5 * PI, 4.5 * PI))
    assert [r.index for r in found] == [1, 2, 3, 4]
    # odd j: cot zero (odd solution resonant); even j: tan zero
    assert [r.parity for r in found] == ["odd", "even", "odd", "even"]


def test_sinusoidal_window_matches_roots_and_alternates():
    ratio = 0.01
    window = (20 * PI, 23 * PI)
    found = find_resonances(SIN, ratio, window, engine="exact")
    preds = dict(predicted_positions(SIN, ratio, *window))
    assert len(found) >= 2
    for r in found:
        assert r.index in preds
        # detected peak within a tenth of its width of the root
        assert abs(r.position - preds[r.index]) < max(r.fwhm, 0.05)
    parities = [r.parity for r in found]
    assert all(a != b for a, b in zip(parities, parities[1:]))


def test_sinusoidal_widths_exceed_mesa_and_grow():
    ratio = 0.01
    low = find_resonances(SIN, ratio, (20 * PI, 22 * PI), engine="exact")
    high = find_resonances(SIN, ratio, (60 * PI, 62 * PI), engine="exact")
    assert min(r.fwhm for r in low) > 0.04
    assert max(r.fwhm for r in high) > max(r.fwhm for r in low)


def test_engine_independence_of_positions():
    # xi is far above the band here, so both engines must agree to a tenth
    # of a width
    ratio = 0.01
    window = (40 * PI, 41.5 * PI)
    exact = find_resonances(SIN, ratio, window, engine="exact")
    semi = find_resonances(SIN, ratio, window, engine="semiclassical")
    assert len(exact) == len(semi)
    for a, b in zip(exact, semi):
        assert abs(a.position - b.position) < a.fwhm / 10


def test_fwhm_grid_invariance():
    ratio = 0.01
    window = (2.5 * PI, 3.5 * PI)
    a = find_resonances(MESA, ratio, window, grid_step=0.002)[0]
    b = find_resonances(MESA, ratio, window, grid_step=0.001)[0]
    assert abs(a.fwhm - b.fwhm) < 0.01 * a.fwhm


def test_window_too_coarse_raises():
    # 20 predicted resonances but the grid can hold at most 7 maxima
    with pytest.raises(WindowTooCoarse) as exc:
        find_resonances(MESA, 0.01, (0.5 * PI, 20.5 * PI), grid_step=8.0)
    assert len(exc.value.missing) >= 1


def test_empty_window_is_success():
    # below the first mesa resonance: nothing predicted, nothing found
    found = find_resonances(MESA, 0.01, (0.2, 2.0))
    assert found == []


def test_semiclassical_engine_on_mesa_uses_closed_forms():
    a = find_resonances(MESA, 0.01, (2.5 * PI, 3.5 * PI), engine="exact")
    b = find_resonances(MESA, 0.01, (2.5 * PI, 3.5 * PI), engine="semiclassical")
    assert a[0].position == pytest.approx(b[0].position, abs=1e-9)
