//! Friendly device-pair names and their resolution into full [`PairSpec`]s.

use anyhow::{bail, Context, Result};
use direx_core::devices::{GameKind, PairSpec};

pub const DEFAULT_GAMMA: f64 = 0.0;
pub const DEFAULT_B0_SEED: u64 = 0xB0;

/// Extra parameters some named pairs need.
#[derive(Debug, Default, Clone)]
pub struct PairOptions {
    pub fa: Option<String>,
    pub fb: Option<String>,
    pub gamma: Option<f64>,
    pub b0_seed: Option<u64>,
    /// Block length a cheating pair commits to (the guessing game's `k`).
    pub cheating_k: Option<u64>,
}

/// Maps a pair name to its spec for the given game. Accepted names:
/// `honest`, `all-zeros`, `shared-uniform`, `deterministic` (with `fa`/`fb`
/// response tables), and `cheating` (guessing game only).
pub fn resolve_pair(name: &str, game: GameKind, opts: &PairOptions) -> Result<PairSpec> {
    match name {
        "honest" => Ok(match game {
            GameKind::Chsh => PairSpec::HonestChsh,
            GameKind::Extended => PairSpec::HonestExtended,
        }),
        "all-zeros" => Ok(PairSpec::AllZeros { game }),
        "shared-uniform" => Ok(PairSpec::SharedUniform { game }),
        "deterministic" => {
            let len = match game {
                GameKind::Chsh => 2,
                GameKind::Extended => 4,
            };
            let fa = parse_table(opts.fa.as_deref().context("deterministic pair needs --fa")?, len)?;
            let fb = parse_table(opts.fb.as_deref().context("deterministic pair needs --fb")?, len)?;
            Ok(PairSpec::Deterministic { game, fa, fb })
        }
        "cheating" => {
            if game != GameKind::Chsh {
                bail!("the cheating pair plays the plain CHSH game only");
            }
            let k = opts
                .cheating_k
                .context("the cheating pair needs a block length (the guessing game's k)")?;
            Ok(PairSpec::CheatingLowEntropy {
                gamma: opts.gamma.unwrap_or(DEFAULT_GAMMA),
                k,
                b0_seed: opts.b0_seed.unwrap_or(DEFAULT_B0_SEED),
            })
        }
        other => bail!(
            "unknown pair {other:?} (expected honest, all-zeros, shared-uniform, \
             deterministic, or cheating)"
        ),
    }
}

/// Parses a response table written as a 0/1 string, one output bit per
/// input symbol (inputs 0,1 for CHSH; A0,A1,B0,B1 for the extended game).
fn parse_table(table: &str, len: usize) -> Result<Vec<bool>> {
    if table.len() != len || !table.chars().all(|c| c == '0' || c == '1') {
        bail!("response table {table:?} must be a {len}-character 0/1 string");
    }
    Ok(table.chars().map(|c| c == '1').collect())
}
