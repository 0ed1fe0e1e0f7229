//! Reduced homology is unchanged by every elementary collapse of `N(S) ↘ N(SG)`.

use kneser_morse_core::complex::DEFAULT_FACE_CAP;
use kneser_morse_core::pipeline::{collapse_s_to_sg_with, BettiCheck};

fn per_step(k: u32) {
    let c = collapse_s_to_sg_with(k, BettiCheck::PerStep, DEFAULT_FACE_CAP).unwrap();
    assert_eq!(c.all_betti_preserved(), Some(true), "k = {k}");
}

#[test]
fn every_step_k2() {
    per_step(2);
}

#[test]
fn every_step_k3() {
    per_step(3);
}
