// Compare the analytic PPO loss gradient with central finite differences.
//
//     cargo run --example gradient_check

use pccsched::agents::{gradcheck, GradcheckReport};

pub fn run_example() -> GradcheckReport {
    let r = gradcheck(0, 16, 1e-5);
    println!(
        "{} parameters, max relative error {:.2e}, max absolute error {:.2e}, {} samples on the clip plateau",
        r.n_params, r.max_rel_error, r.max_abs_error, r.clipped_samples
    );
    r
}

#[allow(dead_code)]
fn main() {
    run_example();
}
