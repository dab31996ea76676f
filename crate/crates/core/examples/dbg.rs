use philap::fd::fd_solve;
use philap::nfunction::PhiSpec;
use philap::problem::*;
use std::sync::Arc;

fn main() {
    let phi = PhiSpec::power(2.0).unwrap();
    let nl = NonlinearitySpec::power(1.0).unwrap();
    let rho = RadialFn::new("12/(1+r^2)", Arc::new(|r: f64| 12.0 / (1.0 + r * r)));
    for m in [128usize, 256, 512, 1024, 2048] {
        let s = fd_solve(&phi, &nl, &rho, 3, 1.0, 2.0, m, 1e-13).unwrap();
        let (mut worst, mut at) = (0.0f64, 0.0);
        for (i, &r) in s.radii.iter().enumerate() {
            let e = (s.v[i] - (1.0 + r * r)).abs();
            if e > worst { worst = e; at = r; }
        }
        println!("M={m:5} err={worst:.3e} at r={at:.3} sweeps={}", s.sweeps);
    }
}
