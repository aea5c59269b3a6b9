use memtrack::losses::{
    focal_arl_loss, gaussian_soften, total_loss, tsl_contrastive_loss, GaussianKernel, LossParts, LossWeights,
    Temperature, TemperatureMode,
};
use memtrack::{BinaryMask, Embedding, SoftMask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn kernel_matches_closed_form() {
    let k = GaussianKernel::<f64>::new(1.0, 5).unwrap();
    let mut raw = Vec::new();
    for v in -2i32..=2 {
        for u in -2i32..=2 {
            raw.push((-((u * u + v * v) as f64) / 2.0).exp() / (2.0 * std::f64::consts::PI));
        }
    }
    let z: f64 = raw.iter().sum();
    for (w, r) in k.weights().iter().zip(&raw) {
        assert!((w - r / z).abs() < 1e-15);
    }
    assert!((k.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // High-precision value of the normalized center weight.
    assert!((k.weight(0, 0) - 0.162_102_821_637_126_63).abs() < 1e-15);
}

fn shift(m: &BinaryMask, dx: usize, dy: usize) -> BinaryMask {
    BinaryMask::from_fn(m.width(), m.height(), |x, y| x >= dx && y >= dy && m.get(x - dx, y - dy))
}

#[test]
fn softening_commutes_with_translation() {
    let k = GaussianKernel::<f64>::new(1.0, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (w, h) = (24, 24);
    for _ in 0..100 {
        let (dx, dy) = (rng.gen_range(0..3), rng.gen_range(0..3));
        // Foreground stays far enough from the border that neither the mask
        // nor its shifted copy sees the padding.
        let m = BinaryMask::from_fn(w, h, |x, y| (5..16).contains(&x) && (5..16).contains(&y) && rng.gen_bool(0.5));
        let a = gaussian_soften(&shift(&m, dx, dy), &k);
        let b = gaussian_soften(&m, &k);
        for y in 0..h {
            for x in 0..w {
                let shifted = if x >= dx && y >= dy { b.get(x - dx, y - dy) } else { 0.0 };
                assert!((a.get(x, y) - shifted).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn constant_masks_are_fixed_points() {
    let k = GaussianKernel::<f64>::new(1.0, 5).unwrap();
    for m in [BinaryMask::empty(9, 7), BinaryMask::full(9, 7)] {
        let s = gaussian_soften(&m, &k);
        let target = if m.is_empty() { 0.0 } else { 1.0 };
        assert!(s.values().iter().all(|v| (v - target).abs() < 1e-9));
    }
}

/// Soft-target binary cross-entropy, mean over pixels, same clamping.
fn bce(p: &[f64], y: &[f64]) -> f64 {
    let eps = 1e-7;
    let mut acc = 0.0;
    for (&p, &y) in p.iter().zip(y) {
        let p = p.clamp(eps, 1.0 - eps);
        acc += -(y * p.ln() + (1.0 - y) * (1.0 - p).ln());
    }
    acc / p.len() as f64
}

#[test]
fn focal_without_focusing_is_bce() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let (w, h) = (rng.gen_range(1..9), rng.gen_range(1..9));
        let p: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let y: Vec<f64> = (0..w * h).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let got = focal_arl_loss(&SoftMask::new(w, h, p.clone()).unwrap(), &SoftMask::new(w, h, y.clone()).unwrap(), 0.0)
            .unwrap();
        assert!((got - bce(&p, &y)).abs() < 1e-9);
    }
    let half = SoftMask::filled(1, 1, 0.5).unwrap();
    let got = focal_arl_loss(&half, &half, 2.0).unwrap();
    assert!((got - 0.25 * 2f64.ln()).abs() < 1e-9);
}

fn unit_with_cos(c: f64) -> Embedding<f64> {
    Embedding::new(vec![c, (1.0 - c * c).sqrt(), 0.0]).unwrap()
}

#[test]
fn contrastive_against_high_precision_values() {
    let x = Embedding::new(vec![1.0, 0.0, 0.0]).unwrap();
    let texts: Vec<_> = [0.9, 0.1, -0.2].into_iter().map(unit_with_cos).collect();
    // -ln softmax((0.9, 0.1, -0.2)/tau)[0], evaluated at 40 digits.
    let cases = [(0.01, 1.804_852_189_542_617_1e-35), (0.5, 0.272_085_838_279_612_43)];
    for (tau, want) in cases {
        let got = tsl_contrastive_loss(&x, 0, &texts, tau).unwrap();
        assert!((got - want).abs() < 1e-12, "tau {tau}: {got} vs {want}");
    }
}

#[test]
fn contrastive_invariances_in_both_modes() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for mode in [TemperatureMode::InverseScale, TemperatureMode::Literal] {
        let tau = Temperature { value: 100.0, mode }.tau();
        for _ in 0..200 {
            let k = rng.gen_range(1..6);
            let x = Embedding::new((0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let texts: Vec<_> = (0..k)
                .map(|_| Embedding::new((0..6).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap())
                .collect();
            let pos = rng.gen_range(0..k);
            let base = tsl_contrastive_loss(&x, pos, &texts, tau).unwrap();
            let scaled = tsl_contrastive_loss(&x.scaled(rng.gen_range(0.01..50.0)), pos, &texts, tau).unwrap();
            assert!((base - scaled).abs() < 1e-12);
            assert!(base >= -1e-12);
            if k == 1 {
                assert_eq!(base, 0.0);
            }
        }
        let x = Embedding::new(vec![0.0, 0.0, 1.0]).unwrap();
        let texts: Vec<_> = (0..7).map(|i| unit_with_cos(-0.5 + 0.1 * i as f64)).collect();
        let uniform = tsl_contrastive_loss(&x, 3, &texts, tau).unwrap();
        assert!((uniform - 7f64.ln()).abs() < 1e-12);
    }
}

#[test]
fn total_reconstruction_and_omission() {
    let w = LossWeights::default();
    assert_eq!((w.lambda_arl, w.lambda_tsl), (20.0, 0.1));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let parts: LossParts<f64> = LossParts {
            arl: rng.gen_range(0.0..2.0),
            iou: rng.gen_range(0.0..2.0),
            dice: rng.gen_range(0.0..1.0),
            occ: rng.gen_range(0.0..2.0),
            tsl: rng.gen_range(0.0..5.0),
        };
        let r = total_loss(parts, w, true).unwrap();
        let want = 20.0 * parts.arl + parts.iou + parts.dice + parts.occ + 0.1 * parts.tsl;
        assert!((r.total - want).abs() < 1e-9);
        let r = total_loss(parts, w, false).unwrap();
        assert_eq!(r.l_tsl, 0.0);
        assert!((r.total - (want - 0.1 * parts.tsl)).abs() < 1e-9);

        let doubled = LossWeights { lambda_arl: 40.0, ..w };
        let d = total_loss(parts, doubled, true).unwrap().total - total_loss(parts, w, true).unwrap().total;
        assert!((d - 20.0 * parts.arl).abs() < 1e-9);
    }
}
