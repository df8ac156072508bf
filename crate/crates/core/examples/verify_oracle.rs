// Gaussian-model self checks with their measured values.

use abcreg::verify::{verify_all, Tolerances};

pub fn run_example() -> abcreg::Result<()> {
    for r in verify_all(&Tolerances::default(), 1)? {
        println!(
            "{} {:<70} {}  [{}]",
            if r.passed { "ok  " } else { "FAIL" },
            r.name,
            r.measured_text(),
            r.expected
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
