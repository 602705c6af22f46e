//! Re-measures the constants stored in the library: the interpolation-weight
//! constant `B` and the hypercube BH base constants.
//!
//! cargo run --release -p lowdeg --example calibrate

use lowdeg::bh::{bh_scan, BhSetting, MAX_SCAN_DEGREE};
use lowdeg::remez::sweep_l1;

fn main() {
    let mut worst_b: f64 = 0.0;
    for k in 2..=64 {
        let b = sweep_l1(k, 4096) / (k as f64).ln();
        worst_b = worst_b.max(b);
        if k <= 8 || k % 16 == 0 {
            println!("K = {k:2}  max ||c||_1 / ln K = {b:.6}");
        }
    }
    println!("B measured {worst_b:.6}, with 10% headroom {:.6}", 1.1 * worst_b);

    for d in 1..=MAX_SCAN_DEGREE {
        let mut worst: f64 = 0.0;
        for n in d..=12 {
            let rep = bh_scan(BhSetting::Cube, n, 2, d, 2000, 1000 + n as u64).expect("feasible");
            worst = worst.max(rep.max_ratio);
        }
        println!("d = {d}  cube max ratio {worst:.6}  base {:.4}", (1.1 * worst).max(1.1));
    }
}
