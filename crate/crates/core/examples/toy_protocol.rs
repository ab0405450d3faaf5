//! Runs the synthetic protocols and prints PSNR/SSIM before and after.
//!
//! Usage: cargo run --release -p dereflect-core --example toy_protocol

use dereflect_core::pipeline::SYNTHETIC_EPSILON;
use dereflect_core::{blend, evaluate, make_toy_example, suppress, BlendParams, SuppressionParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("toy", 800, 1u64, 0.7, 2.0, 0.11),
        ("pair1", 512, 11, 0.7, 4.0, 0.03),
        ("pair1", 512, 11, 0.5, 4.0, 0.03),
        ("pair2", 512, 22, 0.7, 4.0, 0.03),
        ("pair2", 512, 22, 0.5, 4.0, 0.03),
    ];
    for (name, size, seed, w, sigma, h) in cases {
        let (t, r) = make_toy_example(size, size, seed)?;
        let y = blend(&t, &r, &BlendParams::new(w, sigma)?)?;
        let reference = t.map(|v| w * v);
        let out = suppress(&y, &SuppressionParams::new(h, SYNTHETIC_EPSILON)?);
        let before = evaluate(&reference, &y)?;
        let after = evaluate(&reference, &out)?;
        println!(
            "{name:6} {size}px w={w} sigma={sigma} h={h}: psnr {:.3} -> {:.3} dB, ssim {:.4} -> {:.4}",
            before.psnr_db, after.psnr_db, before.ssim, after.ssim
        );
    }
    Ok(())
}
