use corner_contact_web::{glide_check, Bounce, CornerCones};
use std::f64::consts::{FRAC_PI_2, PI};

const SQUARE: [f64; 8] = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];

#[test]
fn square_corner_cones() {
    let c = CornerCones::new(&SQUARE, 0, &[1.0, 0.0, 0.0, 1.0]).unwrap();
    let t = c.tangent();
    assert!((t[0]).abs() < 1e-12 && (t[1] - FRAC_PI_2).abs() < 1e-12);
    let n = c.normal();
    assert!((n[0] - PI).abs() < 1e-12 && (n[1] - FRAC_PI_2).abs() < 1e-12);
    assert!(c.polars_agree());
}

#[test]
fn shear_keeps_polars_paired() {
    let c = CornerCones::new(&SQUARE, 2, &[1.0, 0.5, 0.0, 1.0]).unwrap();
    assert!(c.polars_agree());
    // the shear opens the corner at (1, 1): both edges still bound it
    assert_eq!(c.pushed_tangent().len(), 2);
}

#[test]
fn glide_verdicts() {
    assert_eq!(glide_check(0.0).unwrap()[0], 1.0);
    assert_eq!(glide_check(55.0).unwrap()[0], 1.0);
    assert_eq!(glide_check(-55.0).unwrap()[0], 1.0);
    assert_eq!(glide_check(90.0).unwrap()[0], 0.0);
    assert_eq!(glide_check(180.0).unwrap()[0], 0.0);
    // margin sign follows the verdict
    assert!(glide_check(30.0).unwrap()[1] > 0.0);
    assert!(glide_check(120.0).unwrap()[1] < 0.0);
}

#[test]
fn bounce_touches_the_floor_and_leaves() {
    let b = Bounce::new(1.0).unwrap();
    assert!(b.frame_count() > 100);
    assert_eq!(b.triangles().len() % 3, 0);
    let touched: Vec<usize> = (0..b.frame_count()).filter(|&k| b.in_contact(k)).collect();
    assert!(!touched.is_empty());
    let low = |k: usize| b.positions(k).chunks(2).map(|p| p[1]).fold(f64::INFINITY, f64::min);
    assert!(low(b.frame_count() - 1) > low(touched[0]));
    assert!((0..b.frame_count()).all(|k| low(k) > 0.0));
}
