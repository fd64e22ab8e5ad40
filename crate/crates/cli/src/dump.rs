use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qseries_core::builders::{build_q1_hat, SeriesBank, SpinProvider, SpinSign, SwapProvider};
use qseries_core::character::qbar_closed;
use qseries_core::determinant::casorati;
use qseries_core::fixtures::{all_fixtures, FIXTURE_DEPTH};
use qseries_core::root_data::parse_tuple;
use qseries_core::{AlgebraContext, AlgebraType};

pub const SELECTOR_HELP: &str =
    "q:<alg>:<J> | qhat:C<n>:0|0b | r:<alg>:<node>:<signs> | char:<alg>:<J>, \
with <alg> like B2 and J like 2,2b,1b";

pub fn parse_algebra(s: &str) -> Result<AlgebraContext> {
    let (ty, rank) = s.split_at(1.min(s.len()));
    let ty: AlgebraType = ty.parse().map_err(|e| anyhow!("{e}"))?;
    let rank: usize = rank.parse().with_context(|| format!("bad rank in {s:?}"))?;
    AlgebraContext::new(ty, rank).map_err(|e| anyhow!("{e}"))
}

/// Canonical text for a selector at truncation `degree`.
pub fn dump(selector: &str, degree: u32) -> Result<String> {
    let parts: Vec<&str> = selector.split(':').collect();
    let (kind, rest) = parts
        .split_first()
        .ok_or_else(|| anyhow!("empty selector; expected {SELECTOR_HELP}"))?;
    let ctx = parse_algebra(
        rest.first()
            .ok_or_else(|| anyhow!("missing algebra; expected {SELECTOR_HELP}"))?,
    )?;
    let tuple = |k: usize| -> Result<_> {
        let s = rest
            .get(k)
            .ok_or_else(|| anyhow!("missing argument; expected {SELECTOR_HELP}"))?;
        parse_tuple(s).map_err(|e| anyhow!("{e}"))
    };
    match (*kind, rest.len()) {
        ("q", 2) => {
            Ok(casorati(&ctx, &tuple(1)?, degree, 0, &SeriesBank::new())?.to_canonical_string())
        }
        ("qhat", 2) => {
            let odd = match rest[1] {
                "0" => false,
                "0b" => true,
                other => bail!("hatted part must be 0 or 0b, got {other:?}"),
            };
            Ok(build_q1_hat(&ctx, odd, degree)?.to_canonical_string())
        }
        ("r", 3) => {
            let node: usize = rest[1]
                .parse()
                .with_context(|| format!("bad node {:?}", rest[1]))?;
            let eps: SpinSign = rest[2].parse().map_err(|e| anyhow!("{e}"))?;
            let s = SwapProvider::new()
                .spin_series(&ctx, node, &eps, degree)
                .ok_or_else(|| anyhow!("no R-series provider for {ctx} node {node} {eps}"))?;
            Ok(s.to_canonical_string())
        }
        ("char", 2) => Ok(format!("{}\n", qbar_closed(&ctx, &tuple(1)?)?)),
        _ => bail!("unknown selector {selector:?}; expected {SELECTOR_HELP}"),
    }
}

/// Rewrites every stored fixture under `dir`; returns the file names.
pub fn regen_fixtures(dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut names = Vec::new();
    for f in all_fixtures(FIXTURE_DEPTH)? {
        let path = dir.join(f.file_name());
        std::fs::write(&path, f.text()).with_context(|| format!("writing {}", path.display()))?;
        names.push(f.file_name());
    }
    Ok(names)
}
