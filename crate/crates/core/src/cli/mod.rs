//! Batch verification suites behind the `qwick` binary.

mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

pub use report::{digest, format_residual, report_schema_version, validate_report, Case, Params, Report, Status, Summary, Table};

use crate::cmapkernel::{
    beta_perturbation_probe, combinatorial_identity_check, permutation_cancellation, s_p_operator, strategy_equivalence_check,
};
use crate::combinatorics::{enumerate_sjn, twin_classes};
use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockVector};
use crate::normlab::{haagerup_minimal_n, haagerup_tail, haagerup_tail_brute, AmplifiedTensor, Grading, NormLab};
use crate::qtensor::{parse_rational, LinMap, QPoly, QSpace, Residual, Scalar, Tensor, DEFAULT_CEILING};
use crate::sampling::{random_gauss_tensor, split_rng};

/// Environment variable naming the default report directory.
pub const OUT_DIR_ENV: &str = "QWICK_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Suite {
    Identities,
    PermutationLemma,
    Combinatorial,
    Norms,
    Khintchine,
    Haagerup,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::PermutationLemma => "permutation-lemma",
            Suite::Combinatorial => "combinatorial",
            Suite::Norms => "norms",
            Suite::Khintchine => "khintchine",
            Suite::Haagerup => "haagerup",
        }
    }

    pub fn needs_float(self) -> bool {
        matches!(self, Suite::Norms | Suite::Khintchine | Suite::Haagerup)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "qwick", about = "Verify identities and estimate norms on q-deformed Fock spaces")]
pub struct RunConfig {
    /// Dimension d of the one-particle space.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// `symbolic` or `p/r` in exact mode, a decimal in float mode.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[arg(long, default_value_t = 3)]
    pub max_n: usize,
    #[arg(long, default_value_t = 3)]
    pub max_k: usize,
    /// Fock truncation N; defaults to max-n + max-k.
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Suites to run; all suites of the mode when omitted.
    #[arg(long, value_enum)]
    pub suite: Vec<Suite>,
    /// Report directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "qwick-reports")]
    pub out: PathBuf,
    /// Residual tolerance for float-mode identities.
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
}

/// The value of `q` a run uses.
#[derive(Clone, Debug, PartialEq)]
pub enum QChoice {
    Symbolic,
    Rational(num_rational::BigRational),
    Float(f64),
}

/// A checked configuration.
#[derive(Clone, Debug)]
pub struct Plan {
    pub config: RunConfig,
    pub q: QChoice,
    pub truncation: usize,
    pub suites: Vec<Suite>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<Plan> {
        if self.dim == 0 {
            return Err(Error::Config("--dim must be at least 1".into()));
        }
        let q = match (self.mode, self.q.as_deref()) {
            (Mode::Exact, None | Some("symbolic") | Some("q")) => QChoice::Symbolic,
            (Mode::Exact, Some(s)) => QChoice::Rational(
                parse_rational(s).ok_or_else(|| Error::Config(format!("exact mode needs q as p/r, got {s:?}")))?,
            ),
            (Mode::Float, None) => QChoice::Float(0.5),
            (Mode::Float, Some(s)) => QChoice::Float(
                s.parse::<f64>().map_err(|_| Error::Config(format!("float mode needs a decimal q, got {s:?}")))?,
            ),
        };
        match &q {
            QChoice::Rational(r) if num_traits::Signed::abs(r) >= num_traits::One::one() => {
                return Err(Error::Config(format!("|q| must be below 1, got {r}")));
            }
            QChoice::Float(v) if !(v.abs() < 1.0) => return Err(Error::Config(format!("|q| must be below 1, got {v}"))),
            _ => {}
        }
        let legs = self.max_n + self.max_k;
        if legs > DEFAULT_CEILING {
            return Err(Error::Config(format!("max-n + max-k = {legs} exceeds the ceiling {DEFAULT_CEILING}")));
        }
        let truncation = self.truncation.unwrap_or(legs);
        if truncation < legs {
            return Err(Error::Config(format!("truncation {truncation} is below max-n + max-k = {legs}")));
        }
        let mut suites = self.suite.clone();
        if suites.is_empty() {
            suites = [Suite::Identities, Suite::PermutationLemma, Suite::Combinatorial, Suite::Norms, Suite::Khintchine, Suite::Haagerup]
                .into_iter()
                .filter(|s| self.mode == Mode::Float || !s.needs_float())
                .collect();
        }
        suites.sort();
        suites.dedup();
        if self.mode == Mode::Exact {
            if let Some(s) = suites.iter().find(|s| s.needs_float()) {
                return Err(Error::Config(format!("suite {} needs --mode float", s.name())));
            }
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::Config("--tolerance must be nonnegative".into()));
        }
        Ok(Plan { config: self.clone(), q, truncation, suites })
    }
}

impl Plan {
    fn params(&self) -> Params {
        let c = &self.config;
        let q = match &self.q {
            QChoice::Symbolic => "q".to_string(),
            QChoice::Rational(r) => r.to_string(),
            QChoice::Float(v) => v.to_string(),
        };
        Params {
            dim: c.dim,
            q,
            mode: match c.mode {
                Mode::Exact => "exact".into(),
                Mode::Float => "float".into(),
            },
            max_n: c.max_n,
            max_k: c.max_k,
            truncation: self.truncation,
            seed: c.seed,
            tolerance: c.tolerance,
        }
    }

    /// Run every suite; reports come back in suite order.
    pub fn execute(&self) -> Result<Vec<Report>> {
        self.suites.par_iter().map(|&s| self.run_suite(s)).collect()
    }

    pub fn run_suite(&self, suite: Suite) -> Result<Report> {
        match &self.q {
            QChoice::Symbolic => self.run_in(suite, &QSpace::symbolic(self.config.dim)),
            QChoice::Rational(r) => self.run_in(suite, &QSpace::at_rational(self.config.dim, r.clone())?),
            QChoice::Float(v) => {
                let space = QSpace::numeric(self.config.dim, *v)?;
                match suite {
                    Suite::Norms => self.norms(NormLab::from_space(space)),
                    Suite::Khintchine => self.khintchine(),
                    Suite::Haagerup => self.haagerup(NormLab::from_space(space)),
                    _ => self.run_in(suite, &space),
                }
            }
        }
    }

    fn run_in<S: Scalar>(&self, suite: Suite, space: &QSpace<S>) -> Result<Report> {
        let (cases, notes) = match suite {
            Suite::Identities => (identity_cases(space, self)?, BTreeMap::new()),
            Suite::PermutationLemma => (permutation_lemma_cases(self.config.max_n + self.config.max_k + 1)?, BTreeMap::new()),
            Suite::Combinatorial => combinatorial_cases(space, self)?,
            _ => return Err(Error::Config(format!("suite {} needs --mode float", suite.name()))),
        };
        Ok(Report::new(suite.name(), self.params(), cases, Vec::new(), notes))
    }

    fn tol(&self) -> f64 {
        self.config.tolerance
    }

    fn norms(&self, lab: NormLab) -> Result<Report> {
        let c = &self.config;
        let mut cases = Vec::new();
        let mut rows = Vec::new();
        let free = NormLab::new(c.dim, 0.0)?;
        for total in 0..=c.max_n + c.max_k {
            for n in 0..=total {
                let k = total - n;
                let v = lab.rstar_norm(n, k)?;
                let z = free.rstar_norm(n, k)?;
                let ok = v.rstar.is_finite() && v.rstar >= 1.0 - 1e-12 && (z.rstar - 1.0).abs() <= 1e-12;
                let inputs = format!("rstar_norm n={n} k={k} d={} q={}", c.dim, lab.q());
                cases.push(
                    Case::new(format!("rstar_norm[{n},{k}]"), &inputs, format!("{:.3e}", (z.rstar - 1.0).abs()), ok)
                        .with_value(json!({ "rstar": v.rstar, "r": v.r, "rstar_at_zero": z.rstar })),
                );
                rows.push(vec![n as f64, k as f64, v.rstar, v.r, z.rstar]);
            }
        }
        for n in 0..=c.max_n + c.max_k {
            let ok = lab.gram_factor(n).is_ok();
            cases.push(Case::new(format!("gram_positive[{n}]"), &format!("gram n={n}"), if ok { "0" } else { "not positive definite" }, ok));
        }
        let p2 = lab.space().pqn(2)?;
        let v = lab.qop_norm(&p2, &Grading::Flat(2), &Grading::Flat(2))?;
        let expected = 1.0 + lab.q().abs();
        cases.push(Case::new("qop_norm[P2 flat]", "P_q^2 flat", format!("{:.3e}", (v - expected).abs()), (v - expected).abs() < 1e-10));

        let e1 = AmplifiedTensor::from_tensor(Tensor::basis(c.dim, &[0]));
        let mut traces = Vec::new();
        for q in [0.0, lab.q()] {
            let trace = NormLab::new(c.dim, q)?.wick_norm_estimate(&e1, 30)?;
            let limit = 2.0 / (1.0 - q).sqrt();
            let err = (trace.estimate() - limit).abs() / limit;
            let ok = err < 0.01 && trace.is_nondecreasing(1e-12);
            cases.push(
                Case::new(format!("wick_norm[e1,q={q}]"), &format!("e1 q={q} N=30"), format!("{err:.3e}"), ok)
                    .with_value(json!({ "estimate": trace.estimate(), "limit": limit, "converged": trace.converged() })),
            );
            traces.push(trace);
        }
        let table = Table {
            name: "rstar".into(),
            columns: ["n", "k", "rstar", "r", "rstar_at_zero"].map(String::from).to_vec(),
            rows,
        };
        let mut notes = BTreeMap::new();
        notes.insert("scope".into(), json!("norms on the truncated L2 Fock space; completely bounded and CMAP constants are not computed"));
        notes.insert("wick_traces".into(), serde_json::to_value(&traces).map_err(|e| Error::Report(e.to_string()))?);
        Ok(Report::new(Suite::Norms.name(), self.params(), cases, vec![table], notes))
    }

    fn khintchine(&self) -> Result<Report> {
        let c = &self.config;
        let max_n = c.max_n.min(4);
        let mut cases = Vec::new();
        let mut rows = Vec::new();
        let mut notes = BTreeMap::new();
        let mut qs = vec![0.3, 0.5, 0.7];
        if let QChoice::Float(v) = self.q {
            if !qs.contains(&v) {
                qs.push(v);
            }
        }
        for &q in &qs {
            let lab = NormLab::new(c.dim, q)?;
            let mut best = vec![0.0f64; max_n + 1];
            for sample in 0..50u64 {
                let n = sample as usize % (max_n + 1);
                let m = 1 + (sample as usize / (max_n + 1)) % 2;
                let mut r = split_rng(c.seed, sample);
                let xi = AmplifiedTensor::random(&mut r, m, n, c.dim)?;
                let rep = lab.khintchine_report(&xi, self.truncation.max(n + 2))?;
                best[n] = best[n].max(rep.ratio_per_level);
                let inputs = format!("khintchine q={q} seed={} sample={sample} n={n} m={m}", c.seed);
                cases.push(
                    Case::new(format!("lower[q={q},#{sample}]"), &inputs, format!("{:.3e}", (rep.lhs - rep.estimate).max(0.0)), rep.lower_holds)
                        .with_value(json!({ "n": n, "m": m, "lhs": rep.lhs, "estimate": rep.estimate, "ratio": rep.ratio, "converged": rep.converged })),
                );
                rows.push(vec![q, sample as f64, n as f64, m as f64, rep.lhs, rep.estimate, rep.ratio, rep.ratio_per_level]);
            }
            let explosive = best.windows(2).any(|w| w[1] > 2.0 * w[0]);
            cases.push(Case::new(format!("trend[q={q}]"), &format!("trend q={q}"), format!("{best:?}"), !explosive));
            notes.insert(format!("max_ratio_per_level[q={q}]"), json!(best));
        }
        let table = Table {
            name: "samples".into(),
            columns: ["q", "sample", "n", "m", "lhs", "estimate", "ratio", "ratio_per_level"].map(String::from).to_vec(),
            rows,
        };
        Ok(Report::new(Suite::Khintchine.name(), self.params(), cases, vec![table], notes))
    }

    fn haagerup(&self, lab: NormLab) -> Result<Report> {
        let c = &self.config;
        let mut cases = Vec::new();
        let mut rows = Vec::new();
        for t in [0.25, 0.5, 1.0, 2.0] {
            for n in 0..=10 {
                let closed = haagerup_tail(n, t, 1.0)?;
                let brute = haagerup_tail_brute(n, t, 1.0)?;
                let err = (closed - brute).abs();
                cases.push(Case::new(format!("tail[n={n},t={t}]"), &format!("tail n={n} t={t}"), format!("{err:.3e}"), err <= 1e-10));
                rows.push(vec![n as f64, t, closed, brute]);
            }
        }
        let (eps, t) = (0.01, 0.5);
        let first = haagerup_minimal_n(eps, t, 1.0)?;
        let again = haagerup_minimal_n(eps, t, 1.0)?;
        let ok = first == again
            && haagerup_tail_brute(first, t, 1.0)? <= eps
            && (first == 0 || haagerup_tail_brute(first - 1, t, 1.0)? > eps);
        cases.push(Case::new("minimal_n[eps=0.01,t=0.5]", "minimal n eps=0.01 t=0.5", "0", ok).with_value(json!({ "n": first })));

        let n = c.max_n.min(self.truncation);
        let rep = lab.haagerup_tail_report(n, t, 1.0, eps, self.truncation.min(6))?;
        cases.push(Case::new("gamma_weights", &format!("weights t={t}"), format!("{:.3e}", rep.weight_error), rep.weight_error <= 1e-12));
        let gerr = (rep.gamma_norm - 1.0).abs();
        cases.push(Case::new("gamma_norm", &format!("gamma norm t={t}"), format!("{gerr:.3e}"), gerr <= 1e-10));
        let terr = (rep.t_nt_norm - 1.0).abs();
        cases.push(Case::new(format!("t_nt_norm[n={n}]"), &format!("T_n,t n={n} t={t}"), format!("{terr:.3e}"), terr <= 1e-10));
        let table = Table { name: "tail".into(), columns: ["n", "t", "closed", "brute"].map(String::from).to_vec(), rows };
        let mut notes = BTreeMap::new();
        notes.insert("scope".into(), json!("norms on the truncated L2 Fock space; completely bounded and CMAP constants are not computed"));
        notes.insert("report".into(), serde_json::to_value(&rep).map_err(|e| Error::Report(e.to_string()))?);
        Ok(Report::new(Suite::Haagerup.name(), self.params(), cases, vec![table], notes))
    }
}

fn residual_case<S: Scalar>(name: String, r: &Residual, tol: f64) -> Case {
    Case::from_residual::<S>(name.clone(), &name, r, tol)
}

/// Residual of two maps.
fn map_residual<S: Scalar>(a: &LinMap<S>, b: &LinMap<S>) -> Result<Residual> {
    let mut r = Residual::new();
    r.absorb_maps(a, b)?;
    Ok(r)
}

fn identity_cases<S: Scalar>(space: &QSpace<S>, plan: &Plan) -> Result<Vec<Case>> {
    let c = &plan.config;
    let (d, tol, legs) = (space.dim(), plan.tol(), c.max_n + c.max_k);
    let mut cases = Vec::new();
    for total in 0..=legs {
        for a in 0..=total {
            let b = total - a;
            let rhs = space.pqn(a)?.kron(&*space.pqn(b)?).compose(&*space.rstar(a, b)?)?;
            cases.push(residual_case::<S>(format!("factorization[{a},{b}]"), &map_residual(&*space.pqn(total)?, &rhs)?, tol));
        }
    }
    for total in 0..=legs {
        for a in 0..=total {
            for b in 0..=total - a {
                let cc = total - a - b;
                let r = map_residual(&space.rstar3(a, b, cc)?, &space.rstar3_right(a, b, cc)?)?;
                cases.push(residual_case::<S>(format!("splitting[{a},{b},{cc}]"), &r, tol));
            }
        }
    }
    for total in 0..=(c.max_n + 1).min(legs) {
        for s in 0..=total {
            let j = total - s;
            cases.push(residual_case::<S>(format!("composition[{s},{j}]"), &space.pairing_composition_check(s, j)?, tol));
        }
    }
    for n in 0..=(c.max_n + 1).min(plan.truncation) {
        let mut rng = split_rng(c.seed, 100 + n as u64);
        let xi = random_gauss_tensor::<S>(&mut rng, n, d, true);
        let out = space.wick_operator(&xi, n)?.apply(&FockVector::vacuum(d, n))?;
        let r = out.residual(&FockVector::from_tensor(&xi, n)?)?;
        cases.push(residual_case::<S>(format!("wick_vacuum[{n}]"), &r, tol));
    }
    for n in 0..=c.max_n {
        for k in 0..=c.max_k {
            let mut rng = split_rng(c.seed, 200 + (n * 16 + k) as u64);
            let xi = random_gauss_tensor::<S>(&mut rng, n, d, true);
            let eta = random_gauss_tensor::<S>(&mut rng, k, d, true);
            let product = space.wick_product_vector(&xi, &eta)?;
            let via_operator = space.wick_operator(&xi, n + k)?.apply(&FockVector::from_tensor(&eta, n + k)?)?;
            cases.push(residual_case::<S>(format!("wick_product[{n},{k}]"), &product.residual(&via_operator)?, tol));
        }
    }
    let top = c.max_n.max(1) + 1;
    for x in 0..d {
        for y in 0..d {
            let (ex, ey) = (Tensor::<S>::basis(d, &[x]), Tensor::<S>::basis(d, &[y]));
            let a = space.annihilation(&ex, top)?;
            let ad = space.creation(&ey, top)?;
            let lhs = a.compose(&ad)?.sub(&ad.compose(&a)?.scale(space.q()))?;
            let inner = if x == y { S::one() } else { S::zero() };
            let r = lhs.residual_on_levels(&FockOperator::identity(d, top).scale(&inner), top - 1)?;
            cases.push(residual_case::<S>(format!("q_commutation[{x},{y}]"), &r, tol));
        }
    }
    let mut rng = split_rng(c.seed, 300);
    let v = random_gauss_tensor::<S>(&mut rng, 1, d, true);
    let (ad, a) = (space.creation(&v, top)?, space.annihilation(&v, top)?);
    let mut r = Residual::new();
    for m in 0..top {
        let x = FockVector::from_tensor(&random_gauss_tensor::<S>(&mut rng, m, d, true), top)?;
        let y = FockVector::from_tensor(&random_gauss_tensor::<S>(&mut rng, m + 1, d, true), top)?;
        let diff = space.fock_inner(&ad.apply(&x)?, &y)?.sub_ref(&space.fock_inner(&x, &a.apply(&y)?)?);
        r.absorb(&diff);
    }
    cases.push(residual_case::<S>("adjointness".into(), &r, tol));
    Ok(cases)
}

/// Exhaustive check of the twin lemma on `1 ≤ n ≤ max_n`.
pub fn permutation_lemma_cases(max_n: usize) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for n in 1..=max_n {
        let mut counterexamples = 0usize;
        let mut checked = 0usize;
        for j in 0..=n {
            for perm in enumerate_sjn(n, j)? {
                checked += 1;
                let twins = twin_classes(&perm, j)?;
                let expected = if j >= 1 && perm.at(j) == 1 { j - 1 } else { j + 1 };
                if twins != [expected] {
                    counterexamples += 1;
                }
            }
        }
        cases.push(
            Case::new(format!("twins[n={n}]"), &format!("twins n={n}"), counterexamples.to_string(), counterexamples == 0)
                .with_value(json!({ "checked": checked })),
        );
    }
    Ok(cases)
}

fn combinatorial_cases<S: Scalar>(space: &QSpace<S>, plan: &Plan) -> Result<(Vec<Case>, BTreeMap<String, serde_json::Value>)> {
    let c = &plan.config;
    let (d, tol, legs) = (space.dim(), plan.tol(), c.max_n + c.max_k);
    let mut cases = Vec::new();
    let mut labels = Vec::new();
    for p in 0..=legs {
        let s = s_p_operator(space, p)?;
        let label = if s == LinMap::identity(p, d) && p == 0 {
            "Id"
        } else if s.is_zero() {
            "0"
        } else if !S::is_exact() && s.data().iter().all(|v| v.magnitude() <= tol) {
            "0"
        } else {
            "nonzero"
        };
        let expected = if p == 0 { "Id" } else { "0" };
        labels.push(label);
        cases.push(Case::new(format!("s_p[{p}]"), &format!("S_p p={p}"), label, label == expected).with_value(json!(label)));
    }
    for p in 0..=legs {
        let rep = permutation_cancellation(p)?;
        cases.push(
            Case::new(format!("permutation_groups[{p}]"), &format!("groups p={p}"), rep.violations.len().to_string(), rep.passed())
                .with_value(json!({ "groups": rep.groups, "contributions": rep.contributions })),
        );
    }
    for j in 0..legs {
        let hit = beta_perturbation_probe(space, j)?;
        let ok = hit.is_some_and(|p| p <= j + 1);
        cases.push(Case::new(format!("beta_probe[{j}]"), &format!("beta probe j={j}"), format!("{hit:?}"), ok));
    }
    for n in 0..=c.max_n {
        for k in 0..=c.max_k {
            for j in 0..=n.min(k) {
                let r = strategy_equivalence_check(space, j, n, k, c.seed)?;
                cases.push(residual_case::<S>(format!("strategies[j={j},n={n},k={k}]"), &r, tol));
            }
        }
    }
    for n in 0..=c.max_n {
        for k in 0..=c.max_k {
            let check = combinatorial_identity_check(space, n, k, c.seed)?;
            let mut case = residual_case::<S>(format!("identity[n={n},k={k}]"), &check.residual, tol);
            let levels: Vec<String> = check.level_residuals.iter().map(|(_, r)| format_residual::<S>(r)).collect();
            case = case.with_value(json!({ "inputs": check.inputs, "full_basis": check.full_basis, "levels": levels }));
            cases.push(case);
        }
    }
    let mut notes = BTreeMap::new();
    notes.insert("s_p".into(), json!(labels));
    Ok((cases, notes))
}

/// Parse the command line, run, write reports and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let plan = match config.validate() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("qwick: {e}");
            return 2;
        }
    };
    let reports = match plan.execute() {
        Ok(r) => r,
        Err(e @ (Error::Config(_) | Error::InvalidQ(_))) => {
            eprintln!("qwick: {e}");
            return 2;
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            return 1;
        }
    };
    let mut ok = true;
    for report in &reports {
        match report.write(&plan.config.out) {
            Ok(paths) => {
                let s = &report.summary;
                println!("{:<18} {}/{} passed -> {}", report.suite, s.passed, s.total, paths[0].display());
                if let Some(f) = &s.first_failure {
                    println!("  first failure: {} (residual {})", f.name, f.residual);
                }
            }
            Err(e) => {
                eprintln!("could not write report: {e}");
                return 1;
            }
        }
        ok &= report.passed();
    }
    if ok {
        0
    } else {
        1
    }
}

/// Evaluate an exact map at `q = value` in the float backend.
pub fn eval_map(m: &LinMap<QPoly>, q: f64) -> LinMap<Complex64> {
    m.map_entries(|p| p.eval_f64(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("qwick").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn rejects_norms_in_exact_mode() {
        let c = config(&["--suite", "norms", "--out", "x"]);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_q() {
        assert!(config(&["--q", "0.5", "--out", "x"]).validate().is_err());
        assert!(config(&["--q", "3/2", "--out", "x"]).validate().is_err());
        assert!(config(&["--mode", "float", "--q", "1.0", "--out", "x"]).validate().is_err());
        assert!(config(&["--truncation", "2", "--out", "x"]).validate().is_err());
        assert!(config(&["--dim", "0", "--out", "x"]).validate().is_err());
    }

    #[test]
    fn default_suites_follow_mode() {
        let p = config(&["--out", "x"]).validate().unwrap();
        assert_eq!(p.suites, vec![Suite::Identities, Suite::PermutationLemma, Suite::Combinatorial]);
        let p = config(&["--mode", "float", "--out", "x"]).validate().unwrap();
        assert_eq!(p.suites.len(), 6);
        assert_eq!(p.q, QChoice::Float(0.5));
    }

    #[test]
    fn combinatorial_suite_lists_s_p() {
        let p = config(&["--suite", "combinatorial", "--max-n", "2", "--max-k", "2", "--out", "x"]).validate().unwrap();
        let rep = p.run_suite(Suite::Combinatorial).unwrap();
        assert!(rep.passed(), "{:?}", rep.summary.first_failure);
        assert_eq!(rep.summary.notes["s_p"], json!(["Id", "0", "0", "0", "0"]));
    }

    #[test]
    fn permutation_lemma_small() {
        assert!(permutation_lemma_cases(5).unwrap().iter().all(Case::passed));
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(main_with_args(["qwick", "--suite", "norms", "--out", out]), 2);
        assert_eq!(main_with_args(["qwick", "--bogus"]), 2);
        let args = ["qwick", "--suite", "permutation-lemma", "--max-n", "2", "--max-k", "2", "--out", out];
        assert_eq!(main_with_args(args), 0);
        let text = std::fs::read_to_string(dir.path().join("permutation-lemma.json")).unwrap();
        assert_eq!(validate_report(&text).unwrap().suite, "permutation-lemma");
    }
}
