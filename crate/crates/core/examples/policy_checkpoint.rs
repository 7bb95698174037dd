// Save a policy to the plain-text checkpoint format and load it back.
//
//     cargo run --example policy_checkpoint

use pccsched::agents::{checkpoint, PolicyParams};

pub fn run_example() -> pccsched::Result<()> {
    let params = PolicyParams::init(30, 4, 64, 11);
    let dir = std::env::temp_dir().join(format!("pccsched-ckpt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| pccsched::Error::Io { path: dir.clone(), source: e })?;
    let path = dir.join("policy.txt");
    checkpoint::save(&params, &path)?;
    let loaded = checkpoint::load(&path)?;
    assert_eq!(loaded, params);
    let text = checkpoint::to_text(&params);
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("... {} parameters, fingerprint {:016x}", loaded.data.len(), loaded.fingerprint());
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

#[allow(dead_code)]
fn main() -> pccsched::Result<()> {
    run_example()
}
