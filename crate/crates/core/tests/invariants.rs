//! Property tests for the structural invariants the model must keep over
//! its whole parameter space, not just at the design point: stop-band
//! boundary conditions, energy conservation, limiting forms, backend
//! agreement, and the scaling laws of the detection metrics.

use num_complex::Complex64;
use proptest::prelude::*;
use sfwm_core::dispersion::{FiberSpec, Polarization};
use sfwm_core::grating::GratingSpec;
use sfwm_core::metrics::{car, ParasiticRatios};
use sfwm_core::spectrum::{Backend, GridAxis, PairSource, ProcessLabel, PumpConfig};
use sfwm_core::vacuum_omega;
use std::sync::OnceLock;

const BAND_CENTER: f64 = 1.54e-6;

/// Rough group velocity used only to map detunings onto frequencies.
const GROUP_VELOCITY: f64 = 2.05e8;

fn fiber(length: f64) -> FiberSpec<f64> {
    FiberSpec::new(length, 3.3e-5).unwrap()
}

/// A single-band structure probed at detuning `t` in units of its own
/// coupling strength.
fn probe(
    contrast: f64,
    scale: f64,
    length: f64,
    t: f64,
    z_frac: f64,
) -> (FiberSpec<f64>, GratingSpec<f64>, f64, f64) {
    let fiber = fiber(length);
    let grating = GratingSpec::new(&[BAND_CENTER], contrast, scale, length).unwrap();
    let kappa = grating.coupling(0);
    let omega = grating.center_omega(0) + t * kappa * GROUP_VELOCITY;
    (fiber, grating, omega, z_frac * length)
}

/// Design-point source reused across the expensive overlap properties.
fn design_source(with_grating: bool) -> &'static PairSource<f64> {
    static WITH: OnceLock<PairSource<f64>> = OnceLock::new();
    static WITHOUT: OnceLock<PairSource<f64>> = OnceLock::new();
    let build = |grating: Option<GratingSpec<f64>>| {
        let fiber = fiber(0.05);
        let solution = fiber.solve_pump_placement(1.55e-6).unwrap();
        let pump = PumpConfig::from_solution(&solution, 10e-12).unwrap();
        PairSource::new(fiber, grating, pump).unwrap()
    };
    if with_grating {
        WITH.get_or_init(|| {
            build(Some(GratingSpec::new(&[1.54e-6, 1.56e-6], 2.1e-3, 0.5, 0.05).unwrap()))
        })
    } else {
        WITHOUT.get_or_init(|| build(None))
    }
}

/// Frequencies spanning the stop bands, their edges, and the space between.
fn omega_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => (1.535e-6..1.565e-6_f64).prop_map(vacuum_omega),
        2 => (1.5393e-6..1.5407e-6_f64).prop_map(vacuum_omega),
        2 => (1.5593e-6..1.5607e-6_f64).prop_map(vacuum_omega),
    ]
}

fn detuning_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![
        5 => -4.0..4.0_f64,
        1 => 0.995..1.005_f64,
        1 => -1.005..-0.995_f64,
        1 => 4.0..60.0_f64,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// The backward envelope vanishes at the entrance and the forward one
    /// carries a pure propagation phase at the exit, at any detuning.
    #[test]
    fn stop_band_boundary_conditions_hold(
        contrast in 2e-4..4e-3_f64,
        scale in 0.3..1.0_f64,
        length in 0.01..0.1_f64,
        t in detuning_strategy(),
    ) {
        let (fiber, grating, omega, _) = probe(contrast, scale, length, t, 0.0);
        let entrance = grating.response(&fiber, 0, omega, Polarization::Y, 0.0).unwrap();
        prop_assert!(entrance.backward.norm() <= 1e-12);

        let exit = grating.response(&fiber, 0, omega, Polarization::Y, length).unwrap();
        let phase = Complex64::new(0.0, exit.detuning * length).exp();
        prop_assert!((exit.forward - phase).norm() <= 1e-12);
    }

    /// Transmitted plus reflected intensity is unity: the structure is
    /// lossless everywhere, including deep inside the band.
    #[test]
    fn stop_band_response_conserves_energy(
        contrast in 2e-4..4e-3_f64,
        scale in 0.3..1.0_f64,
        length in 0.01..0.1_f64,
        t in detuning_strategy(),
    ) {
        let (fiber, grating, omega, _) = probe(contrast, scale, length, t, 0.0);
        let entrance = grating.response(&fiber, 0, omega, Polarization::Y, 0.0).unwrap();
        let exit = grating.response(&fiber, 0, omega, Polarization::Y, length).unwrap();
        let energy = entrance.forward.norm_sqr() + exit.backward.norm_sqr();
        prop_assert!((energy - 1.0).abs() <= 1e-10, "energy = {energy}");
    }

    /// Coupling-length products in the thousands must not overflow or lose
    /// the energy balance: the closed forms are exponent-shifted.
    #[test]
    fn extreme_coupling_stays_finite(
        contrast in 4e-3..8e-3_f64,
        length in 0.1..0.2_f64,
        t in -2.0..2.0_f64,
        z_frac in 0.0..1.0_f64,
    ) {
        let (fiber, grating, omega, z) = probe(contrast, 1.0, length, t, z_frac);
        prop_assert!(grating.coupling(0) * length > 1000.0);
        let response = grating.response(&fiber, 0, omega, Polarization::Y, z).unwrap();
        prop_assert!(response.forward.norm().is_finite());
        prop_assert!(response.backward.norm().is_finite());

        let entrance = grating.response(&fiber, 0, omega, Polarization::Y, 0.0).unwrap();
        let exit = grating.response(&fiber, 0, omega, Polarization::Y, length).unwrap();
        let energy = entrance.forward.norm_sqr() + exit.backward.norm_sqr();
        prop_assert!((energy - 1.0).abs() <= 1e-10, "energy = {energy}");
        prop_assert!(entrance.forward.norm() <= 1.0 + 1e-12);
    }

    /// Removing the index contrast turns the dressing into a plane wave.
    #[test]
    fn zero_contrast_is_a_plane_wave(
        length in 0.01..0.1_f64,
        lambda in 1.52e-6..1.56e-6_f64,
        z_frac in 0.0..1.0_f64,
    ) {
        let fiber = fiber(length);
        let grating = GratingSpec::new(&[BAND_CENTER], 0.0, 1.0, length).unwrap();
        let z = z_frac * length;
        let response = grating
            .response(&fiber, 0, vacuum_omega(lambda), Polarization::X, z)
            .unwrap();
        let plane = Complex64::new(0.0, response.detuning * z).exp();
        prop_assert!((response.forward - plane).norm() <= 1e-10);
        prop_assert!(response.backward.norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// With the contrast at zero the overlap must equal the bare fiber's,
    /// which is an explicit sinc.
    #[test]
    fn zero_contrast_overlap_is_the_bare_sinc(
        omega_1 in omega_strategy(),
        omega_2 in omega_strategy(),
        process_pick in 0..3_usize,
    ) {
        let process = ProcessLabel::ALL[process_pick];
        let bare = design_source(false);
        let length = 0.05;
        let muted = {
            let grating = GratingSpec::new(&[1.54e-6, 1.56e-6], 0.0, 0.5, length).unwrap();
            PairSource::new(fiber(length), Some(grating), *bare.pump()).unwrap()
        };

        let j_muted = muted
            .phase_match_integral(process, omega_1, omega_2, Backend::ClosedForm)
            .unwrap();
        let j_bare = bare
            .phase_match_integral(process, omega_1, omega_2, Backend::ClosedForm)
            .unwrap();
        prop_assert!((j_muted - j_bare).norm() <= 1e-10 * length);

        let mismatch = bare.uniform_mismatch(process, omega_1, omega_2).unwrap();
        let half = mismatch * length / 2.0;
        let sinc = if half.abs() < 1e-8 { 1.0 } else { half.sin() / half };
        prop_assert!((j_bare.norm() - length * sinc.abs()).abs() <= 1e-10 * length);
    }

    /// Both photons of a co-polarized pair are interchangeable.
    #[test]
    fn copolarized_amplitudes_are_exchange_symmetric(
        omega_1 in omega_strategy(),
        omega_2 in omega_strategy(),
        same_pol in prop::bool::ANY,
    ) {
        let process = if same_pol { ProcessLabel::Xx } else { ProcessLabel::Yy };
        let source = design_source(true);
        let a = source.jsa_point(process, omega_1, omega_2, Backend::ClosedForm).unwrap();
        let b = source.jsa_point(process, omega_2, omega_1, Backend::ClosedForm).unwrap();
        let scale = a.norm().max(b.norm()).max(1e-300);
        prop_assert!((a - b).norm() <= 1e-9 * scale);
    }

    /// The exponent-shifted closed form and brute-force quadrature compute
    /// the same overlap, in and out of the stop bands.
    #[test]
    fn closed_form_matches_quadrature(
        omega_1 in omega_strategy(),
        omega_2 in omega_strategy(),
        process_pick in 0..3_usize,
        with_grating in prop::bool::ANY,
    ) {
        let process = ProcessLabel::ALL[process_pick];
        let source = design_source(with_grating);
        let closed = source
            .phase_match_integral(process, omega_1, omega_2, Backend::ClosedForm)
            .unwrap();
        let quad = source
            .phase_match_integral(process, omega_1, omega_2, Backend::Quadrature)
            .unwrap();
        let scale = closed.norm().max(quad.norm()).max(1e-30);
        prop_assert!(
            (closed - quad).norm() <= 1e-9 * scale,
            "closed = {closed}, quad = {quad}"
        );
    }

    /// Pump-exchange symmetry of the mismatch: the single-pump form cannot
    /// care about photon order.
    #[test]
    fn single_pump_mismatch_is_symmetric(
        lambda_pump in 1.53e-6..1.57e-6_f64,
        lambda_1 in 1.45e-6..1.65e-6_f64,
        lambda_2 in 1.45e-6..1.65e-6_f64,
    ) {
        let fiber = fiber(0.05);
        let pump = vacuum_omega(lambda_pump);
        let a = fiber
            .phase_mismatch_single(pump, vacuum_omega(lambda_1), vacuum_omega(lambda_2), Polarization::X)
            .unwrap();
        let b = fiber
            .phase_mismatch_single(pump, vacuum_omega(lambda_2), vacuum_omega(lambda_1), Polarization::X)
            .unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// CAR is exactly inverse in the composite strength with a ceiling of
    /// 1/zeta^2, reached only when the parasitic ratios vanish.
    #[test]
    fn car_scales_inversely_and_is_bounded(
        zeta_sq in 1e-6..10.0_f64,
        r_x in 0.0..10.0_f64,
        r_y in 0.0..10.0_f64,
    ) {
        let ratios = ParasiticRatios { r_x, r_y };
        let value = car(zeta_sq, &ratios);
        prop_assert!(value <= 1.0 / zeta_sq + 1e-12 * value);
        let product = value * zeta_sq * ratios.car_product();
        prop_assert!((product - 1.0).abs() <= 1e-12);
        let doubled = car(2.0 * zeta_sq, &ratios);
        prop_assert!((doubled - value / 2.0).abs() <= 1e-12 * value);
    }

    /// More parasitic light can only hurt the CAR.
    #[test]
    fn car_is_monotone_in_the_parasitic_ratios(
        zeta_sq in 1e-6..10.0_f64,
        r_x in 0.0..10.0_f64,
        r_y in 0.0..10.0_f64,
        bump in 1e-3..5.0_f64,
    ) {
        let base = ParasiticRatios { r_x, r_y };
        let worse_x = ParasiticRatios { r_x: r_x + bump, r_y };
        let worse_y = ParasiticRatios { r_x, r_y: r_y + bump };
        prop_assert!(car(zeta_sq, &worse_x) < car(zeta_sq, &base));
        prop_assert!(car(zeta_sq, &worse_y) < car(zeta_sq, &base));
    }
}

/// Grid assembly normalizes to unit mass regardless of resolution.
#[test]
fn assembled_grids_have_unit_mass() {
    let source = design_source(true);
    let axis = GridAxis::from_wavelength_window(1.535e-6, 1.565e-6, 128).unwrap();
    for process in ProcessLabel::ALL {
        let grid = source.jsa_grid(process, &axis, Backend::ClosedForm).unwrap();
        assert!(grid.is_normalized());
        assert!((grid.norm_mass() - 1.0).abs() < 1e-9);
    }
}
