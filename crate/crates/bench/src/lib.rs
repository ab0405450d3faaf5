//! Inputs shared by the benchmarks.

use dereflect_core::{blend, make_toy_example, BlendParams, ImageTensor};

/// Grid sizes timed by the benchmarks, as `(height, width)`.
pub const SIZES: [(usize, usize); 3] = [(256, 256), (512, 512), (1080, 1440)];

/// Deterministic synthetic blend of the given size.
pub fn toy_blend(height: usize, width: usize) -> ImageTensor {
    let (t, r) = make_toy_example(height, width, 0).expect("benchmark sizes exceed the toy minimum");
    blend(&t, &r, &BlendParams::new(0.7, 4.0).expect("valid blend")).expect("layers share a shape")
}
