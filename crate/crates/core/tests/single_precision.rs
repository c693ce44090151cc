use schwarzschild_lab::frankel::{r_series_converged, ricci_integral_alpha_form};
use schwarzschild_lab::geodesic::integrate_geodesic;
use schwarzschild_lab::{schwarzschild_profile, Params32, Params64};

#[test]
fn f32_tracks_f64() {
    let p32 = Params32::schwarzschild(3, 1.0).unwrap();
    let p64 = Params64::schwarzschild(3, 1.0).unwrap();
    assert_eq!(p32.horizon_radius(), 0.5);

    let j32 = ricci_integral_alpha_form(4, 0.3f32, 1e-5).unwrap().value;
    let j64 = ricci_integral_alpha_form(4, 0.3f64, 1e-12).unwrap().value;
    assert!(((j32 as f64) - j64).abs() < 1e-5 * j64.abs());

    let s32 = r_series_converged(&p32, 5.0, 1e-6).unwrap().value;
    let s64 = r_series_converged(&p64, 5.0, 1e-12).unwrap().value;
    assert!(((s32 as f64) - s64).abs() < 1e-4 * s64.abs());

    let trace = integrate_geodesic(&p32, 1.0, 100.0, 1e-5).unwrap();
    assert!(trace.max_arclength_residual < 1e-4);
    // the first steps off the turning point move r below f32 resolution
    assert!(trace.states.windows(2).all(|w| w[1].r >= w[0].r));
    assert!(trace.last().r > 50.0);

    let prof = schwarzschild_profile(p32).unwrap();
    assert!((prof.phi(2.0) as f64 - schwarzschild_profile(p64).unwrap().phi(2.0)).abs() < 1e-6);
}
