use std::f64::consts::PI;

use curverad::closed_forms::n_circle;
use curverad::geometry::{Curve, FourierCurve, InversionCenter, Transform};
use curverad::quadrature::{convergence_order, integrate_n, ConvergenceClass, QuadratureConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unit circle plus random harmonics 2..=5 of amplitude up to `amp / k`.
fn perturbed_circle(rng: &mut ChaCha8Rng, amp: f64) -> Curve {
    let mut cos = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
    let mut sin = vec![vec![0.0, 0.0], vec![0.0, 1.0]];
    for j in 0..2 {
        for k in 2..=5 {
            let s = amp / k as f64;
            cos[j].push(rng.gen_range(-s..s));
            sin[j].push(rng.gen_range(-s..s));
        }
    }
    Curve::fourier(FourierCurve::new(cos, sin).unwrap())
}

#[test]
fn circle_is_minimal_among_sampled_plane_curves() {
    // Spot check only: every sampled perturbation has n above 2π².
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = QuadratureConfig::default();
    for _ in 0..8 {
        let c = perturbed_circle(&mut rng, 0.15);
        let q = integrate_n(&c, &cfg).unwrap();
        assert!(q.converged);
        assert!(q.value > n_circle(), "{} <= 2π²", q.value);
    }
}

#[test]
fn invariances_hold_on_a_generic_space_curve() {
    let c = Curve::fourier(
        FourierCurve::new(
            vec![vec![0.0, 1.0, 0.1], vec![0.0, 0.0, 0.2], vec![0.3, 0.0, 0.0, 0.25]],
            vec![vec![0.0, 0.0, 0.0, 0.1], vec![0.0, 1.0], vec![0.0, 0.2]],
        )
        .unwrap(),
    );
    let cfg = QuadratureConfig::default();
    let n = integrate_n(&c, &cfg).unwrap();
    assert!(n.converged);
    let transforms = [
        Transform::Reparam { amplitude: 0.3 },
        Transform::plane_rotation(3, 0, 2, 1.1).unwrap(),
        Transform::Scale(0.2),
        Transform::Translate(vec![1.0, -2.0, 0.5]),
        Transform::Invert(InversionCenter(vec![3.0, 0.5, -1.0])),
    ];
    for t in &transforms {
        let m = integrate_n(&c.apply(t).unwrap(), &cfg).unwrap();
        assert!(m.converged, "{}", t.describe());
        assert!(
            (m.value - n.value).abs() <= 1e-8 * n.value,
            "{}: {} vs {}",
            t.describe(),
            m.value,
            n.value
        );
    }
}

#[test]
fn smooth_curves_converge_spectrally() {
    let e = Curve::ellipse(1.0, 0.3)
        .unwrap()
        .apply(&Transform::Reparam { amplitude: 0.5 })
        .unwrap();
    let cfg = QuadratureConfig {
        initial_grid: 8,
        max_grid: 512,
        rel_tol: 1e-14,
        ..QuadratureConfig::default()
    };
    let q = integrate_n(&e, &cfg).unwrap();
    let class = convergence_order(&q.history);
    assert!(matches!(class, ConvergenceClass::Spectral), "{class:?} {:?}", q.history);
    assert!((q.value - (0.3 + 1.0 / 0.3) * PI * PI).abs() < 1e-9 * q.value);
}
