//! Runs a small config through the lab runner twice and confirms the outputs match
//! byte for byte.

use zklab::lab::{run, LabConfig};

const CONFIG: &str = r#"
seed = 17
mode = "mc"
trials = 2000

[[experiments]]
kind = "counterexample"
eps_zk = "1/2"
eps_s = "1/4"
delta = "1/1024"
reps = 64
p = 4

[[experiments]]
kind = "coin-transform"
name = "coins-noisy"
eta = "1/64"
q = 32

[[experiments]]
kind = "chernoff-audit"
trials = 5000
"#;

fn main() -> anyhow::Result<()> {
    let dir = std::env::temp_dir().join("zklab-example");
    let mut digests = Vec::new();
    for pass in 0..2 {
        let out = dir.join(format!("pass{pass}"));
        let cfg = LabConfig::from_toml_str(CONFIG)?.with_overrides(None, None, Some(out.clone()));
        let manifest = run(&cfg)?;
        let mut bytes = std::fs::read(out.join("manifest.json"))?;
        for f in &manifest.files {
            bytes.extend(std::fs::read(out.join(f))?);
        }
        println!("pass {pass}: {} files, all passed: {}", manifest.files.len(), manifest.all_passed);
        for e in &manifest.experiments {
            println!("  {:24} {:?}", e.name, e.status);
        }
        digests.push(bytes);
    }
    println!("identical outputs: {}", digests[0] == digests[1]);
    Ok(())
}
