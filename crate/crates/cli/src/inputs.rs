use std::fs;
use std::sync::Arc;

use anyhow::{Context, Result};
use forecastq::solver::HardDistributionCertificate;
use forecastq::{FinitePair, InputDistribution, PartialFunction, RandomizedForecastTree};

use crate::manifest::RunManifest;

/// Reads an input file and records its digest in the manifest.
pub fn read(path: &str, manifest: &mut RunManifest) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {path}"))?;
    manifest.record_input(path, &bytes);
    String::from_utf8(bytes).with_context(|| format!("{path} is not UTF-8"))
}

pub fn function(path: &str, manifest: &mut RunManifest) -> Result<Arc<PartialFunction>> {
    let text = read(path, manifest)?;
    Ok(Arc::new(PartialFunction::parse(&text).with_context(|| format!("parsing function {path}"))?))
}

pub fn distribution(f: &Arc<PartialFunction>, path: &str, manifest: &mut RunManifest) -> Result<InputDistribution> {
    let text = read(path, manifest)?;
    InputDistribution::parse(f.clone(), &text).with_context(|| format!("parsing distribution {path}"))
}

pub fn tree(path: &str, manifest: &mut RunManifest) -> Result<RandomizedForecastTree> {
    let text = read(path, manifest)?;
    RandomizedForecastTree::parse(&text).with_context(|| format!("parsing tree {path}"))
}

pub fn pair(path: &str, manifest: &mut RunManifest) -> Result<FinitePair> {
    let text = read(path, manifest)?;
    FinitePair::parse(&text).with_context(|| format!("parsing pair {path}"))
}

pub fn certificate(path: &str, manifest: &mut RunManifest) -> Result<HardDistributionCertificate> {
    let text = read(path, manifest)?;
    HardDistributionCertificate::parse(&text).with_context(|| format!("parsing certificate {path}"))
}
