//! Acceptance-scale exact values, kept as a separate target so the heavy
//! sweeps are easy to run in isolation.

use finfam_core::ramsey::{ramsey_exact, RamseyExact};

#[test]
fn pigeonhole_thresholds_up_to_four() {
    for c in 1..=4u32 {
        for r in 1..=4u32 {
            assert_eq!(
                ramsey_exact(&[1], c, r, 20).unwrap(),
                RamseyExact::Exact(c * (r - 1) + 1),
                "c={c} r={r}"
            );
        }
    }
}

#[test]
fn triangle_threshold_is_six() {
    assert_eq!(ramsey_exact(&[2], 2, 3, 10).unwrap(), RamseyExact::Exact(6));
}

#[test]
fn thresholds_are_monotone_in_colors_and_radius() {
    let mut values = vec![];
    for c in 1..=4u32 {
        let mut row = vec![];
        for r in 1..=4u32 {
            let RamseyExact::Exact(v) = ramsey_exact(&[1], c, r, 20).unwrap() else {
                panic!("expected exact value");
            };
            row.push(v);
        }
        values.push(row);
    }
    for row in &values {
        for r in 1..4 {
            assert!(row[r] >= row[r - 1]);
        }
    }
    for c in 1..4 {
        for (r, &v) in values[c].iter().enumerate() {
            assert!(v >= values[c - 1][r]);
        }
    }
}
