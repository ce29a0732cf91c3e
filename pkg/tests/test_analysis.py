import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from rspcat import analysis as an
from rspcat import fockcore as fc
from rspcat import gaussianmodel as gm
from rspcat import protocol as pr
from rspcat.errors import DegenerateCat, ValidationError, VacuumSubtraction


def test_wigner_fock_values():
    assert an.wigner_point(fc.fock(0, 4), 0, 0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert an.wigner_point(fc.fock(1, 4), 0, 0) == pytest.approx(-1 / math.pi, abs=1e-15)
    assert an.w_origin(fc.fock(0, 4)) == pytest.approx(1 / math.pi)
    assert an.w_origin(fc.fock(1, 4)) == pytest.approx(-1 / math.pi)


def _wigner_by_definition(rho, x, p):
    # W(x,p) = (1/pi) int <x+y|rho|x-y> e^{-2ipy} dy
    dim = rho.shape[0]

    def integrand(y, part):
        a = fc.hermite_functions(dim - 1, np.array([x + y]))[:, 0]
        b = fc.hermite_functions(dim - 1, np.array([x - y]))[:, 0]
        val = (a @ rho @ b.conj()) * np.exp(-2j * p * y) / math.pi
        return val.real if part == 0 else val.imag

    from scipy.integrate import quad

    re = quad(integrand, -12, 12, args=(0,), epsabs=1e-13, limit=200)[0]
    return re


@pytest.mark.parametrize("x,p", [(0.0, 0.0), (0.5, -0.3), (1.2, 0.8), (-0.7, 1.5), (2.0, 0.1)])
def test_wigner_matches_definition(x, p):
    one = fc.fock(1, 6).projector().elems
    assert an.wigner_point(fc.fock(1, 6), x, p) == pytest.approx(_wigner_by_definition(one, x, p), abs=1e-8)
    cat = fc.cat(0.9 + 0.3j, -1, 20)
    rho = cat.projector().elems
    assert an.wigner_point(cat, x, p) == pytest.approx(_wigner_by_definition(rho, x, p), abs=1e-8)


def test_wigner_orientation():
    # coherent state at alpha = (x0 + i p0)/sqrt(2) peaks at (x0, p0)
    alpha = (1.0 + 0.5j) / math.sqrt(2)
    g = an.wigner_grid(fc.coherent(alpha, 30), extent=3, resolution=61)
    j, i = np.unravel_index(np.argmax(g.values), g.values.shape)
    assert (g.xs[i], g.ps[j]) == pytest.approx((1.0, 0.5), abs=1e-12)


def test_wigner_normalization(paper_rho):
    for state in (fc.fock(0, 5), fc.cat(1.5, -1, 40), paper_rho, an.tmss_state(8.4, 3)):
        assert an.wigner_grid(state, 7.0, 281).integral() == pytest.approx(1.0, abs=1e-3)


def test_w_origin_matches_point(paper_rho):
    for state in (fc.fock(3, 5), fc.cat(1.1, 1, 30), paper_rho):
        assert an.w_origin(state) == pytest.approx(an.wigner_point(state, 0, 0), abs=1e-12)


def test_negativity_volume():
    assert an.negativity_volume(fc.fock(0, 4)) == 0.0
    assert an.negativity_volume(fc.coherent(0.8, 20)) < 1e-15
    # analytic value for |1>: 2 e^{-1/2} - 1
    assert an.negativity_volume(fc.fock(1, 4), 6.0, 601) == pytest.approx(2 * math.exp(-0.5) - 1, abs=1e-4)


def test_negativity_monotone_under_loss(paper_rho):
    vols = [an.negativity_volume(gm.loss_channel_oracle(paper_rho, eta)) for eta in (1.0, 0.9, 0.7, 0.5)]
    assert all(b <= a for a, b in zip(vols, vols[1:]))


def test_cat_fidelity_examples():
    c = fc.cat(0.8, -1, 30)
    assert an.cat_fidelity(c.projector(), 0.8, -1) == pytest.approx(1.0, abs=1e-12)
    even = fc.cat(0.8, 1, 30).projector()
    assert an.cat_fidelity(even, 0.8, -1) <= 1e-12
    with pytest.raises(DegenerateCat):
        an.cat_fidelity(even, 0.0, -1)


def test_best_amplitude_recovers_cat():
    fit = an.best_amplitude(fc.cat(0.8, -1, 30), -1)
    assert fit.alpha_star == pytest.approx(0.8, abs=1e-4)
    assert fit.fidelity == pytest.approx(1.0, abs=1e-10)
    assert fit.parity == -1
    with pytest.raises(ValidationError):
        an.best_amplitude(fc.cat(0.8, -1, 30), -1, alpha_max=0.05)


def test_best_amplitude_is_local_max(paper_rho):
    fit = an.best_amplitude(paper_rho, -1, 3.0)
    for da in (-0.01, 0.01):
        assert an.cat_fidelity(paper_rho, fit.alpha_star + da, -1) <= fit.fidelity
    assert fit.fidelity == pytest.approx(an.cat_fidelity(paper_rho, fit.alpha_star, -1), abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("r", [0.3, 0.5, 0.8])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_closed_forms_match_overlaps(n, r, alpha):
    parity = 1 if n % 2 == 0 else -1
    vec = pr.bob_pure_conditional(r, n, pr.ProjectionSpec(), pr.pure_tail_cutoff(r, n))
    assert an.tmss_fidelity(r, n, alpha) == pytest.approx(an.cat_fidelity(vec, alpha, parity), abs=1e-10)
    sm = an.smss_state(fc.r_to_db(r), n)
    assert an.smss_fidelity(r, n, alpha) == pytest.approx(an.cat_fidelity(sm, alpha, parity), abs=1e-10)


def test_closed_form_errors():
    with pytest.raises(VacuumSubtraction):
        an.smss_fidelity(0.0, 2, 1.0, "+")
    with pytest.raises(VacuumSubtraction):
        an.tmss_fidelity(0.0, 1, 1.0)


def test_smss_one_photon_small_r():
    # a single subtraction from weak squeezing leaves nearly |1>
    r = 1e-3
    fit = an.best_amplitude(an.smss_state(fc.r_to_db(r), 1), -1, 1.0)
    assert fit.fidelity > 1 - 1e-5


def test_scheme_parity_mismatch_is_zero():
    assert an.tmss_fidelity(0.5, 2, 1.0, "-") == 0.0
    assert an.smss_fidelity(0.5, 3, 1.0, "+") == 0.0


def test_one_photon_trends():
    scan = an.optimal_squeezing(1, "TMSS", np.arange(0.5, 6.01, 0.5))
    assert np.all(np.diff(scan.alphas) > 0)
    assert np.all(np.diff(scan.fidelities) < 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_smss_fidelity_decreases_with_squeezing(n):
    scan = an.optimal_squeezing(n, "SMSS", np.arange(0.1, 10.01, 0.1))
    assert np.all(np.diff(scan.fidelities) < 0)
    assert scan.s_star == pytest.approx(0.1)


def test_large_amplitude_tmss_beats_smss():
    # beyond the amplitude where each n-photon remote state peaks, the
    # remote scheme wins at every amplitude
    for n, alphas in ((2, (2.0, 2.5, 3.0)), (3, (2.5, 3.0)), (4, (2.8, 3.0))):
        for a in alphas:
            ft, _ = an.fidelity_at_amplitude(n, "TMSS", a)
            fs, _ = an.fidelity_at_amplitude(n, "SMSS", a)
            assert ft >= fs


def test_rotation_of_wigner_grid(paper_params):
    rho0 = pr.bob_mixed_conditional(paper_params, pr.ProjectionSpec(theta=0.0), 40)
    rho90 = pr.bob_mixed_conditional(paper_params, pr.ProjectionSpec(theta=math.pi / 2), 40)
    g0 = an.wigner_grid(rho0, 4.0, 81).values
    g90 = an.wigner_grid(rho90, 4.0, 81).values
    # the symmetric square grid maps onto itself under a quarter turn
    assert np.max(np.abs(g0 - np.rot90(g90, 1))) < 1e-6 or np.max(np.abs(g0 - np.rot90(g90, -1))) < 1e-6
