import math

import numpy as np
import pytest

import optomech as om

C = 299792458.0


def nominal_mode(mass_kg=22e-12):
    return om.MechanicalMode(280e3, 8750.0, mass_kg, 300.0)


def test_cavity_decay_rate():
    cav = om.CavityParams()
    assert cav.kappa == pytest.approx(math.pi * C / (2 * 500 * 0.025))
    assert 1.0 / (2 * cav.kappa) == pytest.approx(13.26e-9, rel=5e-3)


def test_no_power_gives_natural_width():
    dyn = om.effective_damping(0.3 * om.CavityParams().kappa, om.CavityParams(power_w=0.0), nominal_mode())
    assert dyn.fwhm_hz == pytest.approx(32.0)
    assert dyn.cooling_ratio_pred == pytest.approx(1.0)


def test_sweep_rows_and_errors():
    cav = om.CavityParams(power_w=2e-3)
    rows = om.sweep_detuning(om.detuning_grid(-1.0, 1.0, 21, cav), cav, nominal_mode())
    assert len(rows) == 21
    assert rows[0].error == "Unstable" and not rows[0].stable
    assert rows[-1].error is None and rows[-1].gamma_eff_hz_fwhm > 32.0


def test_analytic_psd_temperature():
    cav = om.CavityParams(power_w=1e-3)
    mode = nominal_mode()
    dyn = om.effective_damping(cav.kappa / math.sqrt(3), cav, mode)
    psd = om.analytic_psd(om.psd_grid(dyn), mode, dyn)
    assert om.effective_temperature(psd, mode) == pytest.approx(300.0 / dyn.cooling_ratio_pred, rel=0.01)


def test_fit_recovers_lorentzian():
    f = np.linspace(279e3, 281e3, 2001)
    v = om.lorentzian_psd(f, 280e3, 32.0, 6e-23, 1e-27)
    fit = om.fit_peak(om.Spectrum(f, v))
    assert fit.converged
    assert fit.fwhm_hz == pytest.approx(32.0, rel=1e-6)
    assert fit.area == pytest.approx(6e-23, rel=1e-6)


def test_simulation_is_seeded_and_fits():
    cav = om.CavityParams(power_w=6e-3)
    mode = nominal_mode()
    delta = 0.577 * cav.kappa
    a = om.simulate(cav, mode, delta, 0.02, seed=3, record_every=5)
    b = om.simulate(cav, mode, delta, 0.02, seed=3, record_every=5)
    assert np.array_equal(a.samples, b.samples)
    psd = om.estimate_psd(a, segment_length=8192)
    fit = om.fit_peak(psd)
    dyn = om.effective_damping(delta, cav, mode)
    assert fit.center_hz == pytest.approx(dyn.peak_hz, rel=0.01)


def test_errors_are_raised():
    with pytest.raises(om.OptomechError, match="InvalidArgument"):
        om.MechanicalMode(280e3, 8750.0, -1.0)


def test_string_effective_mass_is_half():
    beam = om.BeamModeModel()
    m = om.effective_mass(beam, waist_m=1e-7)
    assert m.mass_kg == pytest.approx(beam.total_mass / 2, rel=1e-3)
    assert beam.shape(np.array([0.0, beam.length_m / 2]), beam.width_m / 2)[0] == pytest.approx(0.0, abs=1e-12)


def test_photothermal_tau():
    assert om.photothermal_tau(om.LayerStack.bragg_mirror()) == pytest.approx(7.6e-9, abs=0.05e-9)


def test_fast_acceptance_subset():
    results = om.run_acceptance(only=[1, 3, 11])
    assert [r.id for r in results] == [1, 3, 11]
    assert all(r.passed for r in results), [str(r) for r in results]
