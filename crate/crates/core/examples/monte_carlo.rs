//! A small seeded experiment run twice with different worker counts; the
//! CSV output does not depend on the number of workers.

use pseudoshrink::simlab::{run_experiment, ExperimentConfig};

pub fn run() -> pseudoshrink::Result<()> {
    let text = "kind = rosv\nn = 40\nc = 2, 3\nreps = 8\nseed = 17\nmethods = plugin, mp, equal\n";
    let mut cfg = ExperimentConfig::from_kv(text)?;
    let one = run_experiment(&cfg)?.to_csv()?;
    cfg.workers = 4;
    let four = run_experiment(&cfg)?.to_csv()?;
    print!("{one}");
    println!("identical across worker counts: {}", one == four);

    let mut v = ExperimentConfig::from_kv("kind = vconv\nn = 60\nc = 2\nreps = 5\nt = 1\n")?;
    v.workers = 2;
    print!("{}", run_experiment(&v)?.to_csv()?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> pseudoshrink::Result<()> {
    run()
}
