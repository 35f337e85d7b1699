// Runs every randomized check at `n = 3`, first as is and then on the
// corrupted inputs, and prints one JSON report per line.

use toda_duality::verify::{run_all, VerifyConfig};
use toda_duality::Result;

/// Returns `(passed, failed_controls, total)`.
pub fn run() -> Result<(usize, usize, usize)> {
    let config = VerifyConfig { n: 3, seed: 11, trials: 5, ..VerifyConfig::default() };
    let reports = run_all(&config)?;
    for r in &reports {
        println!("{}", r.to_json_line());
    }
    let controls = run_all(&VerifyConfig { corrupted: true, ..config })?;
    let caught = controls.iter().filter(|r| !r.passed).count();
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} checks passed; {caught}/{} corrupted inputs rejected", reports.len(), controls.len());
    Ok((passed, caught, reports.len()))
}

#[allow(dead_code)]
fn main() {
    match run() {
        Ok((passed, caught, total)) if passed == total && caught == total => {}
        Ok(_) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
