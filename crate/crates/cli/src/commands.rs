use std::io::Write;

use baernstein::dual::{
    apply_functional, day_norm_sq, day_norm_sq_bruteforce, discretize_norming, dual_norm, extract_norming,
    NormingFunctional, DAY_BRUTEFORCE_GUARD,
};
use baernstein::exact::{decimal, decimal_sqrt, parse_rational, rational_serde, Rational};
use baernstein::family::{family_trace, member_with_guard, validate_explicit, FamilyKind, Point, Space};
use baernstein::primal::{norm_sq_with_guard, BRUTEFORCE_GUARD};
use baernstein::probes::{self, DeltaReport};
use baernstein::renorm::{kt_renorm_sq, tree_norm_sq, triple_norm_sq_extended, y_norm_sq};
use baernstein::{norm_sq_bruteforce, par, sampling, FamilySpec, Ordinal, SparseVector};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{load_json, CliError, CliResult, Format, Settings};
use crate::Common;

pub const DEFAULT_SEED: u64 = 7;
const ORACLE_SUPPORT: usize = 8;
const DAY_ORACLE_SUPPORT: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    #[value(name = "schreier-flat")]
    SchreierFlat,
    #[value(name = "separation-base")]
    SeparationBase,
    #[value(name = "separation-triple")]
    SeparationTriple,
    #[value(name = "dual-non2r")]
    DualNon2r,
    #[value(name = "dual-triple-non2r")]
    DualTripleNon2r,
    #[value(name = "lemma42")]
    Lemma42,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DayOutput {
    #[serde(with = "rational_serde")]
    pub day_norm_sq: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RenormOutput {
    #[serde(with = "rational_serde")]
    pub triple_norm_sq: Rational,
    #[serde(with = "rational_serde")]
    pub norm_sq: Rational,
    #[serde(with = "rational_serde")]
    pub l2_sq: Rational,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct KtOutput {
    #[serde(with = "rational_serde")]
    pub kt_renorm_sq: Rational,
}

pub struct Context {
    settings: Settings,
    alpha: Option<Ordinal>,
    k: Option<u32>,
    depth: Option<usize>,
    ordered: bool,
    seed: u64,
}

impl Context {
    pub fn new(settings: Settings, common: &Common) -> CliResult<Self> {
        let alpha = match &common.alpha {
            Some(text) => Some(text.parse::<Ordinal>()?),
            None => None,
        };
        Ok(Context {
            settings,
            alpha,
            k: common.k,
            depth: common.depth,
            ordered: common.ordered,
            seed: common.seed.unwrap_or(DEFAULT_SEED),
        })
    }

    fn family(&self) -> CliResult<FamilySpec> {
        let spec = match (&self.settings.family, &self.alpha, self.depth) {
            (Some(value), _, _) => serde_json::from_value::<FamilySpec>(value.clone())
                .map_err(|e| CliError::Domain(format!("family: {e}")))?,
            (None, Some(alpha), Some(depth)) => FamilySpec::transfinite(alpha.clone(), self.k.unwrap_or(1), depth)?,
            _ => return Err(CliError::Usage("missing --family (or --alpha with --depth)".into())),
        };
        if self.ordered {
            return Ok(spec.with_ordered(true)?);
        }
        Ok(spec)
    }

    fn digits(&self) -> usize {
        self.settings.digits
    }

    fn write(&self, text: &str) -> CliResult<()> {
        match &self.settings.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
            }
        }
    }

    /// Emits `value` as JSON, with presentation decimals under `"decimal"`.
    fn emit<T: Serialize>(&self, value: &T, decimals: &[(&str, String)]) -> CliResult<()> {
        let mut v = serde_json::to_value(value).expect("serializable");
        if !decimals.is_empty() {
            let shown: serde_json::Map<String, Value> =
                decimals.iter().map(|(k, d)| (k.to_string(), Value::String(d.clone()))).collect();
            if let Value::Object(map) = &mut v {
                map.insert("decimal".into(), Value::Object(shown));
            }
        }
        self.write(&(serde_json::to_string_pretty(&v).expect("serializable") + "\n"))
    }

    pub fn norm(&self, vector: &str, bruteforce: bool) -> CliResult<()> {
        let spec = self.family()?;
        let x: SparseVector = load_json(vector, "vector")?;
        let r = if bruteforce {
            norm_sq_bruteforce(&spec, &x)?
        } else {
            norm_sq_with_guard(&spec, &x, self.settings.norm_guard())?
        };
        let d = self.digits();
        self.emit(&r, &[("norm_sq", decimal(&r.norm_sq, d)), ("norm", decimal_sqrt(&r.norm_sq, d))])
    }

    pub fn dualnorm(&self, vector: &str) -> CliResult<()> {
        let spec = self.family()?;
        let y: SparseVector = load_json(vector, "vector")?;
        let r = dual_norm(&spec, &y, &self.settings.dual_options())?;
        if !r.converged {
            eprintln!("warning: bracket did not reach the tolerance");
        }
        let d = self.digits();
        self.emit(
            &r,
            &[
                ("lower", decimal(&r.lower, d)),
                ("upper", decimal(&r.upper, d)),
                ("value", decimal(&r.value, d)),
                ("gap", decimal(&r.gap, d)),
            ],
        )
    }

    pub fn daynorm(&self, vector: &str, bruteforce: bool) -> CliResult<()> {
        let y: SparseVector = load_json(vector, "vector")?;
        let v = if bruteforce {
            day_norm_sq_bruteforce(&y)?
        } else {
            day_norm_sq(&y)
        };
        let d = self.digits();
        let shown = [("day_norm_sq", decimal(&v, d)), ("day_norm", decimal_sqrt(&v, d))];
        self.emit(&DayOutput { day_norm_sq: v }, &shown)
    }

    pub fn renorm(&self, vector: &str, extra: u32) -> CliResult<()> {
        let alpha = self
            .alpha
            .clone()
            .ok_or_else(|| CliError::Usage("renorm needs --alpha".into()))?;
        let k = self.k.unwrap_or(1);
        let x: SparseVector = load_json(vector, "vector")?;
        let out = RenormOutput {
            triple_norm_sq: triple_norm_sq_extended(&alpha, k, &x, extra)?,
            norm_sq: tree_norm_sq(&alpha, k, &x)?,
            l2_sq: x.l2_sq(),
        };
        let d = self.digits();
        let shown = [
            ("triple_norm_sq", decimal(&out.triple_norm_sq, d)),
            ("norm_sq", decimal(&out.norm_sq, d)),
            ("l2_sq", decimal(&out.l2_sq, d)),
        ];
        self.emit(&out, &shown)
    }

    pub fn ktnorm(&self, vector: &str) -> CliResult<()> {
        let x: SparseVector = load_json(vector, "vector")?;
        let v = kt_renorm_sq(&x)?;
        let shown = [("kt_renorm_sq", decimal(&v, self.digits()))];
        self.emit(&KtOutput { kt_renorm_sq: v }, &shown)
    }

    pub fn ynorm(&self, vector: &str, dual_vector: &str) -> CliResult<()> {
        let x: SparseVector = load_json(vector, "vector")?;
        let y: SparseVector = load_json(dual_vector, "dual vector")?;
        let iv = y_norm_sq(&x, &y, &self.settings.dual_options())?;
        let d = self.digits();
        let shown = [("lower", decimal(&iv.lower, d)), ("upper", decimal(&iv.upper, d))];
        self.emit(&iv, &shown)
    }

    pub fn member(&self, set: &str) -> CliResult<()> {
        let spec = self.family()?;
        let set: Vec<Point> = load_json(set, "set")?;
        let v = member_with_guard(&spec, &set, self.settings.max_ground)?;
        self.emit(&v, &[])
    }

    pub fn trace(&self, ground: &str) -> CliResult<()> {
        let spec = self.family()?;
        let ground: Vec<Point> = load_json(ground, "ground")?;
        let sets = family_trace(&spec, &ground, self.settings.max_ground)?;
        self.emit(&sets, &[])
    }

    /// Explicit listings get the full report; the other kinds are valid by construction.
    pub fn validate(&self) -> CliResult<()> {
        let value = self
            .settings
            .family
            .clone()
            .ok_or_else(|| CliError::Usage("missing --family".into()))?;
        if value.get("kind").and_then(Value::as_str) == Some("explicit") {
            #[derive(Deserialize)]
            struct Listing {
                sets: Vec<Vec<Point>>,
                ground: Option<Vec<Point>>,
            }
            let listing: Listing =
                serde_json::from_value(value).map_err(|e| CliError::Domain(format!("family: {e}")))?;
            let ground = listing
                .ground
                .unwrap_or_else(|| listing.sets.iter().flatten().cloned().collect());
            let report = validate_explicit(&listing.sets, &ground);
            self.emit(&report, &[])?;
            if !report.is_valid() {
                return Err(CliError::Domain(format!("invalid family: {}", report.summary())));
            }
            return Ok(());
        }
        self.family()?;
        self.emit(&json!({"hereditary": true, "singletons": true, "violations": []}), &[])
    }

    pub fn extract(&self, vector: &str) -> CliResult<()> {
        let spec = self.family()?;
        let x: SparseVector = load_json(vector, "vector")?;
        self.emit(&extract_norming(&spec, &x)?, &[])
    }

    pub fn discretize(&self, functional: &str) -> CliResult<()> {
        let f: NormingFunctional = load_json(functional, "functional")?;
        self.emit(&discretize_norming(&f), &[])
    }

    pub fn apply(&self, functional: &str, vector: &str) -> CliResult<()> {
        let f: NormingFunctional = load_json(functional, "functional")?;
        let x: SparseVector = load_json(vector, "vector")?;
        let a = apply_functional(&f, &x);
        let d = self.digits();
        let sign = if a.is_negative() { "-" } else { "" };
        let shown = [
            ("value", format!("{sign}{}", decimal_sqrt(&a.value_sq(), d))),
            ("value_sq", decimal(&a.value_sq(), d)),
        ];
        self.emit(&a, &shown)
    }

    pub fn probe(&self, scenario: Scenario, count: u64, delta: &str, n_max: u64) -> CliResult<()> {
        let opts = self.settings.dual_options();
        let report = match scenario {
            Scenario::SchreierFlat => probes::scenario_schreier_flat()?,
            Scenario::SeparationBase | Scenario::SeparationTriple => {
                let mut both = probes::scenario_separation(count)?;
                let pick = usize::from(scenario == Scenario::SeparationTriple);
                both.swap_remove(pick)
            }
            Scenario::DualNon2r => probes::scenario_dual_non2r(false, &opts)?,
            Scenario::DualTripleNon2r => probes::scenario_dual_non2r(true, &opts)?,
            Scenario::Lemma42 => {
                let delta = parse_rational(delta)?;
                let r = probes::scenario_lemma42(&delta, n_max, &opts)?;
                return match self.settings.format.unwrap_or(Format::Csv) {
                    Format::Csv => self.write(&r.to_csv(self.digits())),
                    Format::Json => self.emit(&r, &[]),
                };
            }
        };
        self.emit_report(&report)
    }

    fn emit_report(&self, report: &DeltaReport) -> CliResult<()> {
        for c in report.checks.iter().filter(|c| !c.holds) {
            eprintln!("check failed: {}", c.claim);
        }
        match self.settings.format.unwrap_or(Format::Csv) {
            Format::Csv => self.write(&report.to_csv(self.digits())),
            Format::Json => self.emit(report, &[]),
        }
    }

    /// Random instances, drawn in trial order from the seed.
    fn oracle_instances(&self, trials: usize) -> CliResult<Vec<(FamilySpec, SparseVector)>> {
        let max_support = self.settings.max_support.unwrap_or(ORACLE_SUPPORT);
        if max_support > BRUTEFORCE_GUARD {
            return Err(baernstein::Error::GuardExceeded {
                what: "oracle support",
                size: max_support,
                guard: BRUTEFORCE_GUARD,
            }
            .into());
        }
        let fixed = match &self.settings.family {
            Some(_) => Some(self.family()?),
            None => None,
        };
        let mut rng = sampling::rng(self.seed);
        let mut out = Vec::with_capacity(trials);
        for trial in 0..trials {
            let size = rng.gen_range(1..=max_support);
            let spec = match &fixed {
                Some(spec) => spec.clone(),
                None => match trial % 3 {
                    0 => FamilySpec::schreier1(),
                    1 => {
                        let ground = sampling::nat_points(&mut rng, 12, max_support);
                        sampling::hereditary_family(&mut rng, &ground, 4, 4)
                    }
                    _ => {
                        let alpha = sampling::small_ordinal(&mut rng);
                        FamilySpec::transfinite(alpha, rng.gen_range(1..=2), 3)?
                    }
                },
            };
            let x = random_vector_for(&mut rng, &spec, size)?;
            out.push((spec, x));
        }
        Ok(out)
    }

    pub fn oracle_norm(&self, trials: usize) -> CliResult<()> {
        let instances = self.oracle_instances(trials)?;
        let verdicts: Vec<CliResult<bool>> = par::map(&instances, |(spec, x)| {
            // values and tie-broken certificates must both match
            Ok(norm_sq_with_guard(spec, x, BRUTEFORCE_GUARD)? == norm_sq_bruteforce(spec, x)?)
        });
        self.report_agreements(verdicts)
    }

    pub fn oracle_day(&self, trials: usize) -> CliResult<()> {
        let max_support = self.settings.max_support.unwrap_or(DAY_ORACLE_SUPPORT);
        if max_support > DAY_BRUTEFORCE_GUARD {
            return Err(baernstein::Error::GuardExceeded {
                what: "oracle support",
                size: max_support,
                guard: DAY_BRUTEFORCE_GUARD,
            }
            .into());
        }
        let mut rng = sampling::rng(self.seed);
        let vectors: Vec<SparseVector> = (0..trials)
            .map(|_| {
                let size = rng.gen_range(1..=max_support);
                sampling::nat_vector(&mut rng, 20, size, true)
            })
            .collect();
        let verdicts: Vec<CliResult<bool>> =
            par::map(&vectors, |y| Ok(day_norm_sq(y) == day_norm_sq_bruteforce(y)?));
        self.report_agreements(verdicts)
    }

    fn report_agreements(&self, verdicts: Vec<CliResult<bool>>) -> CliResult<()> {
        let total = verdicts.len();
        let mut agreed = 0;
        for (trial, v) in verdicts.into_iter().enumerate() {
            if v? {
                agreed += 1;
            } else {
                eprintln!("disagreement at trial {trial}");
            }
        }
        self.write(&format!("agreements: {agreed}/{total}\n"))?;
        if agreed < total {
            return Err(CliError::Domain(format!("{} of {total} trials disagree", total - agreed)));
        }
        Ok(())
    }
}

fn random_vector_for<R: Rng>(rng: &mut R, spec: &FamilySpec, size: usize) -> CliResult<SparseVector> {
    Ok(match spec.kind() {
        FamilyKind::Schreier1 => sampling::nat_vector(rng, 12, size, true),
        FamilyKind::Explicit(e) => {
            let points: Vec<Point> = e.ground().choose_multiple(rng, size).cloned().collect();
            sampling::vector_on(rng, spec.space(), &points, true)
        }
        FamilyKind::Transfinite(t) => {
            let alphabet = t.alphabet.unwrap_or(3);
            let capacity = (alphabet as f64).powi(t.depth as i32);
            let size = size.min(capacity as usize);
            let mut points = sampling::tuple_points(rng, t.depth, alphabet, size);
            if t.kt {
                points.retain(Point::is_branch_valid);
                if points.is_empty() {
                    points.push(Point::Tuple(vec![1; t.depth]));
                }
            }
            sampling::vector_on(rng, Space::Tuple { depth: t.depth }, &points, true)
        }
    })
}
