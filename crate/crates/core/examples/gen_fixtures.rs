//! Regenerates `fixtures/derived.json` from the oracle.

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = tailrisk::oracle::derived_fixtures()?;
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/derived.json");
    std::fs::write(&path, tailrisk::oracle::fixtures_json(&fixtures))?;
    println!("wrote {} fixtures to {}", fixtures.len(), path.display());
    Ok(())
}
