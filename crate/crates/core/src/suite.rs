//! Randomized property suite over a seeded corpus of generated systems.
//!
//! System `i` of the corpus is drawn from its own ChaCha8 stream
//! `(seed, i)`, so the corpus and the report do not depend on how many worker
//! threads run it.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{cesaro_limit, FunctionalGraph};
use crate::error::{Error, Result};
use crate::generate::{generate_identity, generate_with_rng, rng_for, Profile};
use crate::lattice::Component;
use crate::mixing::{
    analyze, exhaustive_component_decisions, is_ergodic, is_ergodic_by_sequences, is_weak_mixing,
    is_weak_mixing_by_sequences, product_sequence, weak_mixing_via_kvn, MixingReport,
};
use crate::operators::{mat_mul, Ceps};
use crate::schema::SystemFile;
use crate::tensor::{component_decompose, tensor_ceps, tensor_component, tensor_component_of, tensor_elements, TensorSpace};

/// Exhaustive component-pair enumeration runs up to this dimension.
pub const EXHAUSTIVE_MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub max_dim: usize,
    pub profiles: Vec<Profile>,
    pub horizon: usize,
    /// Worker threads; `None` uses the rayon default. Not part of the report.
    #[serde(skip)]
    pub jobs: Option<usize>,
}

impl SuiteConfig {
    pub fn new(seed: u64, count: usize, max_dim: usize) -> Self {
        SuiteConfig {
            seed,
            count,
            max_dim,
            profiles: Profile::ALL.to_vec(),
            horizon: 1000,
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be at least 1".into()));
        }
        if self.max_dim == 0 {
            return Err(Error::InvalidConfig("max_dim must be at least 1".into()));
        }
        if self.profiles.is_empty() {
            return Err(Error::InvalidConfig("at least one profile is required".into()));
        }
        if self.horizon < 100 {
            return Err(Error::InvalidConfig(format!("horizon must be at least 100 (got {})", self.horizon)));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// System `index` of the corpus and its profile.
///
/// Profiles rotate with the index. Identity-profile systems alternate between
/// `T = I` and a random partition, starting with `T = I`.
pub fn corpus_system(config: &SuiteConfig, index: usize) -> (Profile, Ceps) {
    let k = config.profiles.len();
    let profile = config.profiles[index % k];
    let mut rng = rng_for(config.seed, index as u64);
    let n = rng.gen_range(1..=config.max_dim);
    let sys = match profile {
        Profile::Identity => generate_identity(&mut rng, n, (index / k).is_multiple_of(2)),
        p => generate_with_rng(&mut rng, n, p),
    };
    (profile, sys)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckCount {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strata {
    pub ergodic_only: usize,
    pub weak_mixing: usize,
    pub neither: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Defect {
    pub check: String,
    pub system_index: usize,
    pub profile: Profile,
    pub detail: String,
    pub system: SystemFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<SystemFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub max_dim: usize,
    pub horizon: usize,
    pub profiles: Vec<Profile>,
    pub checks: BTreeMap<String, CheckCount>,
    pub strata: Strata,
    pub strata_by_profile: BTreeMap<String, Strata>,
    pub defects: Vec<Defect>,
}

impl SuiteReport {
    pub fn failures(&self) -> usize {
        self.checks.values().map(|c| c.failed).sum()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

pub mod checks {
    pub const ROUTE_AGREEMENT: &str = "ergodic_routes_agree";
    pub const BASIS_REDUCTION: &str = "basis_pairs_match_all_component_pairs";
    pub const WEAK_MIXING_IMPLIES_ERGODIC: &str = "weak_mixing_implies_ergodic";
    pub const SELF_TENSOR: &str = "weak_mixing_iff_self_tensor_ergodic";
    pub const WEAK_MIXING_TIMES_ERGODIC: &str = "weak_mixing_times_ergodic_is_ergodic";
    pub const PRODUCT_ERGODIC_FACTORS: &str = "ergodic_product_has_ergodic_factors";
    pub const PRODUCT_WEAK_MIXING_FACTORS: &str = "weak_mixing_product_has_weak_mixing_factors";
    pub const PRODUCT_LIMITS: &str = "ergodic_product_limits_factor";
    pub const TENSOR_VALID: &str = "tensor_product_is_valid_system";
    pub const TENSOR_COMPONENTS: &str = "tensor_of_components_is_component";
    pub const RECTANGLES: &str = "rectangle_join_reconstructs_component";
    pub const BIRKHOFF: &str = "ergodic_limit_identities";
    pub const KVN_AGREEMENT: &str = "kvn_agrees_with_weak_mixing";
    pub const ROUND_TRIP: &str = "system_file_round_trip";
    pub const CLOSED_FORM: &str = "basis_pair_closed_form_matches_sequences";
}

/// Check name and, on failure, its detail and offending system.
type CheckResult = (&'static str, Option<(String, Option<SystemFile>)>);

struct Outcome {
    index: usize,
    profile: Profile,
    report: Option<MixingReport>,
    results: Vec<CheckResult>,
}

struct Recorder {
    results: Vec<CheckResult>,
}

impl Recorder {
    fn check(&mut self, name: &'static str, outcome: Result<Option<String>>) {
        self.check_with(name, outcome, None);
    }

    fn check_with(&mut self, name: &'static str, outcome: Result<Option<String>>, partner: Option<&Ceps>) {
        let failure = match outcome {
            Ok(None) => None,
            Ok(Some(detail)) => Some(detail),
            Err(e) => Some(format!("error: {e}")),
        };
        self.results
            .push((name, failure.map(|d| (d, partner.map(SystemFile::from_ceps)))));
    }
}

fn expect(ok: bool, detail: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(detail)
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let run = || -> Vec<Outcome> { (0..config.count).into_par_iter().map(|i| run_one(config, i)).collect() };
    let outcomes = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut checks: BTreeMap<String, CheckCount> = BTreeMap::new();
    let mut strata = Strata::default();
    let mut strata_by_profile: BTreeMap<String, Strata> =
        config.profiles.iter().map(|p| (p.name().to_owned(), Strata::default())).collect();
    let mut defects = Vec::new();
    for outcome in outcomes {
        if let Some(r) = &outcome.report {
            let by_profile = strata_by_profile.get_mut(outcome.profile.name()).expect("known profile");
            for s in [&mut strata, by_profile] {
                match (r.ergodic, r.weak_mixing) {
                    (_, true) => s.weak_mixing += 1,
                    (true, false) => s.ergodic_only += 1,
                    (false, false) => s.neither += 1,
                }
            }
        }
        let (_, system) = corpus_system(config, outcome.index);
        for (name, failure) in outcome.results {
            let count = checks.entry(name.to_owned()).or_default();
            match failure {
                None => count.passed += 1,
                Some((detail, partner)) => {
                    count.failed += 1;
                    defects.push(Defect {
                        check: name.to_owned(),
                        system_index: outcome.index,
                        profile: outcome.profile,
                        detail,
                        system: SystemFile::from_ceps(&system),
                        partner,
                    });
                }
            }
        }
    }
    Ok(SuiteReport {
        seed: config.seed,
        count: config.count,
        max_dim: config.max_dim,
        horizon: config.horizon,
        profiles: config.profiles.clone(),
        checks,
        strata,
        strata_by_profile,
        defects,
    })
}

fn run_one(config: &SuiteConfig, index: usize) -> Outcome {
    let (profile, a) = corpus_system(config, index);
    let partner_index = (index + 1) % config.count;
    let (_, b) = corpus_system(config, partner_index);
    let mut rec = Recorder { results: Vec::new() };
    let n = a.dimension();

    rec.check(checks::ROUND_TRIP, round_trip(&a));
    rec.check(checks::BIRKHOFF, birkhoff(&a));

    let report = match analyze(&a) {
        Ok(r) => r,
        Err(e) => {
            rec.check(checks::ROUTE_AGREEMENT, Err(e));
            return Outcome {
                index,
                profile,
                report: None,
                results: rec.results,
            };
        }
    };
    rec.check(
        checks::ROUTE_AGREEMENT,
        Ok(expect(report.route_agreement, || {
            format!(
                "operator_equality={} component_limits={} witnesses={}",
                report.routes.operator_equality,
                report.routes.component_limits,
                serde_json::to_string(&report.witnesses).unwrap_or_default()
            )
        })),
    );
    rec.check(
        checks::WEAK_MIXING_IMPLIES_ERGODIC,
        Ok(expect(!report.weak_mixing || report.ergodic, || {
            "weak_mixing=true but ergodic=false".into()
        })),
    );
    rec.check(checks::CLOSED_FORM, closed_form(&a));
    if n <= EXHAUSTIVE_MAX_DIM {
        rec.check(
            checks::BASIS_REDUCTION,
            exhaustive_component_decisions(&a).map(|(erg, wm)| {
                expect(erg == report.ergodic && wm == report.weak_mixing, || {
                    format!(
                        "exhaustive (ergodic={erg}, weak_mixing={wm}) vs basis (ergodic={}, weak_mixing={})",
                        report.ergodic, report.weak_mixing
                    )
                })
            }),
        );
    }

    rec.check(
        checks::SELF_TENSOR,
        tensor_ceps(&a, &a).and_then(|aa| analyze(&aa)).map(|r| {
            expect(r.ergodic == report.weak_mixing, || {
                format!("weak_mixing(A)={} but ergodic(A⊗A)={}", report.weak_mixing, r.ergodic)
            })
        }),
    );

    let product = tensor_ceps(&a, &b);
    rec.check_with(
        checks::TENSOR_VALID,
        Ok(product.as_ref().err().map(ToString::to_string)),
        Some(&b),
    );
    if let Ok(ab) = &product {
        product_checks(&mut rec, config, index, &a, &b, ab, &report);
    }

    rec.check(checks::TENSOR_COMPONENTS, tensor_components(config, index, n, b.dimension()));
    rec.check(checks::RECTANGLES, rectangles(config, index, n, b.dimension()));
    rec.check(checks::KVN_AGREEMENT, kvn_agreement(&a, config.horizon));

    Outcome {
        index,
        profile,
        report: Some(report),
        results: rec.results,
    }
}

fn product_checks(
    rec: &mut Recorder,
    config: &SuiteConfig,
    index: usize,
    a: &Ceps,
    b: &Ceps,
    ab: &Ceps,
    ra: &MixingReport,
) {
    let (rb, rab) = match (analyze(b), analyze(ab)) {
        (Ok(rb), Ok(rab)) => (rb, rab),
        (Err(e), _) | (_, Err(e)) => {
            rec.check_with(checks::PRODUCT_ERGODIC_FACTORS, Err(e), Some(b));
            return;
        }
    };
    rec.check_with(
        checks::PRODUCT_ERGODIC_FACTORS,
        Ok(expect(!rab.ergodic || (ra.ergodic && rb.ergodic), || {
            format!("ergodic(A⊗B)=true with ergodic(A)={} ergodic(B)={}", ra.ergodic, rb.ergodic)
        })),
        Some(b),
    );
    rec.check_with(
        checks::PRODUCT_WEAK_MIXING_FACTORS,
        Ok(expect(!rab.weak_mixing || (ra.weak_mixing && rb.weak_mixing), || {
            format!(
                "weak_mixing(A⊗B)=true with weak_mixing(A)={} weak_mixing(B)={}",
                ra.weak_mixing, rb.weak_mixing
            )
        })),
        Some(b),
    );
    if ra.weak_mixing && rb.ergodic {
        rec.check_with(
            checks::WEAK_MIXING_TIMES_ERGODIC,
            Ok(expect(rab.ergodic, || "weak mixing A, ergodic B, but A⊗B not ergodic".into())),
            Some(b),
        );
    }
    if rab.ergodic {
        rec.check_with(checks::PRODUCT_LIMITS, product_limits(config, index, a, b), Some(b));
    }
}

fn closed_form(sys: &Ceps) -> Result<Option<String>> {
    let erg = (is_ergodic(sys)?, is_ergodic_by_sequences(sys)?);
    let wm = (is_weak_mixing(sys)?, is_weak_mixing_by_sequences(sys)?);
    Ok(expect(erg.0 == erg.1 && wm.0 == wm.1, || {
        format!("closed form {:?} {:?} vs sequences {:?} {:?}", erg.0, wm.0, erg.1, wm.1)
    }))
}

fn round_trip(sys: &Ceps) -> Result<Option<String>> {
    let text = SystemFile::from_ceps(sys).to_json();
    let again = SystemFile::from_ceps(&SystemFile::parse(&text)?.to_ceps()?).to_json();
    Ok(expect(text == again, || "re-serialized system differs".into()))
}

/// `L_S^2 = L_S`, `S L_S = L_S`, `T L_S = T`.
fn birkhoff(sys: &Ceps) -> Result<Option<String>> {
    let l = FunctionalGraph::new(sys.s()).ergodic_limit_matrix();
    let t = sys.t().matrix();
    let mut failed = Vec::new();
    if mat_mul(&l, &l) != l {
        failed.push("L_S^2 != L_S");
    }
    if mat_mul(&sys.s().matrix(), &l) != l {
        failed.push("S L_S != L_S");
    }
    if mat_mul(&t, &l) != t {
        failed.push("T L_S != T");
    }
    Ok(expect(failed.is_empty(), || failed.join(", ")))
}

/// For a few basis pairs, the product Cesaro limit factors as
/// `(T1 p1 T1 q1) ⊗ (T2 p2 T2 q2)`.
fn product_limits(config: &SuiteConfig, index: usize, a: &Ceps, b: &Ceps) -> Result<Option<String>> {
    let mut rng = rng_for(config.seed ^ 0x5eed_0001, index as u64);
    let (n, m) = (a.dimension(), b.dimension());
    for _ in 0..4 {
        let (p1, q1) = (Component::basis(n, rng.gen_range(0..n)), Component::basis(n, rng.gen_range(0..n)));
        let (p2, q2) = (Component::basis(m, rng.gen_range(0..m)), Component::basis(m, rng.gen_range(0..m)));
        let seq = product_sequence(a, (&p1, &q1), b, (&p2, &q2))?;
        let limit = cesaro_limit(&seq)?;
        let left = a.t().apply_component(&p1)?.f_product(&a.t().apply_component(&q1)?)?;
        let right = b.t().apply_component(&p2)?.f_product(&b.t().apply_component(&q2)?)?;
        let expected = tensor_elements(&left, &right);
        if limit != expected {
            return Ok(Some(format!(
                "p1={p1:?} q1={q1:?} p2={p2:?} q2={q2:?}: limit {limit} != {expected}"
            )));
        }
    }
    Ok(None)
}

fn random_component<R: Rng>(rng: &mut R, n: usize) -> Component {
    Component::new((0..n).map(|_| rng.gen_bool(0.5)).collect()).expect("n >= 1")
}

fn tensor_components(config: &SuiteConfig, index: usize, n: usize, m: usize) -> Result<Option<String>> {
    let mut rng = rng_for(config.seed ^ 0x5eed_0002, index as u64);
    for _ in 0..8 {
        let (p, q) = (random_component(&mut rng, n), random_component(&mut rng, m));
        let product = tensor_elements(&p.to_element(), &q.to_element());
        if !product.is_component() || tensor_component_of(&p.to_element(), &q.to_element())? != tensor_component(&p, &q) {
            return Ok(Some(format!("p={p:?} q={q:?}: product {product} is not the tensor component")));
        }
    }
    Ok(None)
}

fn rectangles(config: &SuiteConfig, index: usize, n: usize, m: usize) -> Result<Option<String>> {
    let mut rng = rng_for(config.seed ^ 0x5eed_0003, index as u64);
    let space = TensorSpace::new(n, m)?;
    for _ in 0..8 {
        let u = random_component(&mut rng, space.dimension());
        if !component_decompose(space, &u)?.verified {
            return Ok(Some(format!("u={u:?} in {n}x{m}: rectangle join differs from u")));
        }
    }
    Ok(None)
}

/// On the pair `(delta_0, delta_0)`: tail-zero deviation iff the KvN run holds;
/// a stalled Cesaro check is only allowed when the tail deviation is nonzero.
fn kvn_agreement(sys: &Ceps, horizon: usize) -> Result<Option<String>> {
    let n = sys.dimension();
    let d0 = Component::basis(n, 0);
    let seq = crate::dynamics::seq_t_skp_q(sys, &d0, &d0)?;
    let alpha = sys.t().apply_component(&d0)?.f_product(&sys.t().apply_component(&d0)?)?;
    let tail_zero = seq.period().iter().all(|a| a == &alpha);
    if horizon < seq.preperiod().len() + seq.period().len() {
        return Ok(None);
    }
    match weak_mixing_via_kvn(sys, &d0, &d0, horizon) {
        Ok(check) => {
            let beyond_zero = check.extraction.components[seq.preperiod().len()..]
                .iter()
                .all(Component::is_zero);
            Ok(expect(check.holds == tail_zero && (!tail_zero || beyond_zero), || {
                format!("kvn holds={} but tail-zero deviation={tail_zero}", check.holds)
            }))
        }
        Err(Error::CesaroNotVanishing { checkpoint, .. }) => Ok(expect(!tail_zero, || {
            format!("Cesaro stall reported at {checkpoint} for a tail-zero deviation")
        })),
        Err(e) => Err(e),
    }
}
