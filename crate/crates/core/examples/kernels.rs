//! Gaussian and linear kernels, Gram matrices and the median heuristic.

use k2st::kernels::{gram, median_heuristic, Kernel};
use k2st::{KernelSpec, Points};

fn main() -> k2st::Result<()> {
    let pts = Points::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 2.0], [3.0, 1.0]])?;

    let h = median_heuristic(&pts)?;
    println!("median heuristic bandwidth: {h:.4}");

    let gaussian = Kernel::Gaussian { bandwidth: h };
    println!("k(p0, p1) = {:.4}", gaussian.eval(pts.row(0), pts.row(1))?);

    let g = gram(&gaussian, &pts, &pts)?;
    println!("gaussian gram:\n{g:.3}");
    println!("linear gram:\n{:.1}", gram(&Kernel::Linear, &pts, &pts)?);

    // A spec resolves its bandwidth against whatever pool it is handed.
    let resolved = KernelSpec::gaussian_median().resolve(&pts)?;
    println!("resolved: {:?}", resolved.kernel);
    Ok(())
}
