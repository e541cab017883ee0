//! The bundled self-check: value identity, policy ordering, sign suites and
//! network derivative checks, reported as a pass/fail table.

use std::io::Write;

use crate::config::RunConfig;
use crate::error::Result;
use crate::gradcheck::{self, GradReport};
use crate::learner::network_sizes;
use crate::oracle::{identity_report, standard_samples, OracleSettings};
use crate::signs::{self, SignHooks};

pub const IDENTITY_REL_TOL: f64 = 1e-3;
pub const ORDERING_TOL: f64 = 1e-2;
pub const IDENTITY_STARTS: usize = 20;
pub const GRAD_NETS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn print<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(w, "{tag}  {:width$}  {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Which groups of checks to run.
#[derive(Clone, Copy)]
pub struct VerifyOptions {
    pub identity: bool,
    pub signs: bool,
    pub gradients: bool,
    pub hooks: SignHooks,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            identity: true,
            signs: true,
            gradients: true,
            hooks: SignHooks::default(),
        }
    }
}

fn identity_gammas(cfg: &RunConfig) -> Vec<f64> {
    let mut g = vec![0.5, 0.95, cfg.gamma];
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn grad_check(name: &str, r: &GradReport) -> Check {
    let mut detail = format!("params {:.2e}, input {:.2e}", r.params, r.input);
    if let Some(m) = r.mixed {
        detail.push_str(&format!(", mixed {m:.2e}"));
    }
    Check {
        name: name.to_string(),
        passed: r.passed(),
        detail,
    }
}

pub fn run(cfg: &RunConfig, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::default();
    if opts.identity {
        let samples = standard_samples(IDENTITY_STARTS, cfg.seed, cfg);
        for gamma in identity_gammas(cfg) {
            let settings = OracleSettings::from_config(cfg).with_gamma(gamma);
            let lr = identity_report(&samples, &settings, cfg)?;
            let worst = lr
                .rows
                .iter()
                .map(|r| r.gap / (1.0 + r.v.abs()))
                .fold(0.0, f64::max);
            report.checks.push(Check {
                name: format!("value identity (gamma {gamma})"),
                passed: lr.within(IDENTITY_REL_TOL),
                detail: format!("{} rollouts, worst gap/(1+|V|) {worst:.2e}", lr.rows.len()),
            });
            let (qualifying, reversed) = lr.ordering(ORDERING_TOL);
            report.checks.push(Check {
                name: format!("policy ordering (gamma {gamma})"),
                passed: reversed == qualifying,
                detail: format!("{reversed}/{qualifying} pairs reverse J"),
            });
        }
    }
    if opts.signs {
        for s in signs::run_all(cfg.seed, &opts.hooks) {
            report.checks.push(Check {
                name: format!("sign: {}", s.case.name()),
                passed: s.passed(),
                detail: format!("{} violations in {} samples", s.violations, s.checked[0] + s.checked[1]),
            });
        }
    }
    if opts.gradients {
        let (f_sizes, j_sizes) = network_sizes(cfg);
        let f = gradcheck::run_shape(&f_sizes, GRAD_NETS, cfg.seed, false)?;
        report.checks.push(grad_check("gradients: dynamics net", &f));
        let j = gradcheck::run_shape(&j_sizes, GRAD_NETS, cfg.seed.wrapping_add(1), true)?;
        report.checks.push(grad_check("gradients: deviation net", &j));
    }
    Ok(report)
}
