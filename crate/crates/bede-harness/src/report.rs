//! Machine-readable output: CSV tables carrying a `#` metadata line with the
//! seed, crate version, and configuration fingerprint.

use crate::config::MCConfig;
use crate::mc::EfficiencyStudy;

/// Metadata line prefixed to every emitted table.
pub fn metadata_line(seed: u64, fingerprint: u64) -> String {
    format!(
        "# seed={seed} version={} config={fingerprint:016x}",
        env!("CARGO_PKG_VERSION")
    )
}

/// Render an efficiency study as CSV. Fully deterministic for a fixed
/// config: float fields use shortest round-trip formatting.
pub fn efficiency_csv(config: &MCConfig, study: &EfficiencyStudy) -> String {
    let mut out = String::new();
    out.push_str(&metadata_line(config.seed, config.fingerprint()));
    out.push('\n');
    out.push_str("alpha,beta,n_mse,relative_efficiency,failures,flagged\n");
    out.push_str(&format!(
        "0,0,{},1,{},{}\n",
        study.reference_n_mse,
        study.reference_failures,
        study.reference_failures > study.replications / 100
    ));
    for row in &study.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.pair.alpha, row.pair.beta, row.n_mse, row.relative_efficiency, row.failures,
            row.flagged
        ));
    }
    out
}
