//! k-uniformity verification over subset sweeps.
//!
//! Every verdict is computed along BOTH routes — partial-trace purity and
//! the invariant reconstruction — and the two must agree to 1e-10 (exactly,
//! in exact mode). A disagreement is an implementation bug, never a data
//! verdict, and aborts the run.
//!
//! Exact-mode states are judged by rational equality with zero tolerance;
//! everything else by `|π_S - 2^{-|S|}| ≤ tolerance`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::pauli::purity_via_invariants;
use crate::reduce::{partial_trace, purity, ExactRatio, Purity};
use crate::state::{PureState, QubitSubset};
use crate::REPORT_SCHEMA_VERSION;

/// Largest k the dual-path check supports (the invariant route caps at 6).
pub const MAX_CHECK_K: usize = 6;
/// Default tolerance for float-mode verdicts.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Both purity routes must agree this tightly or the run aborts.
const CONSISTENCY_TOL: f64 = 1e-10;

/// Which subset sizes a check sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Only size-k subsets; smaller sizes are implied by monotonicity.
    SizeKOnly,
    /// Every size 1..=k.
    AllSizes,
}

/// Which arithmetic the verdicts use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    Float,
}

impl Arithmetic {
    pub fn as_str(self) -> &'static str {
        match self {
            Arithmetic::Exact => "exact",
            Arithmetic::Float => "float",
        }
    }
}

/// One subset's verdict, carrying both purity routes.
#[derive(Clone, Debug)]
pub struct SubsetVerdict {
    pub subset: QubitSubset,
    pub purity_trace: Purity,
    pub purity_invariant: Purity,
    /// `1 / 2^{|S|}`.
    pub target: ExactRatio,
    /// `|purity_trace - target|`.
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct UniformityReport {
    pub n_qubits: usize,
    pub k: usize,
    pub mode: Arithmetic,
    pub check_mode: CheckMode,
    /// 0.0 in exact mode.
    pub tolerance: f64,
    pub is_k_uniform: bool,
    pub max_deviation: f64,
    /// Stamped when `k > floor(n/2)`, where no state can be k-uniform.
    pub impossible_k: bool,
    /// Sorted lexicographically within each size, sizes ascending.
    pub verdicts: Vec<SubsetVerdict>,
}

impl UniformityReport {
    /// Verdicts of size exactly `k`.
    pub fn size_k_verdicts(&self) -> impl Iterator<Item = &SubsetVerdict> {
        self.verdicts.iter().filter(move |v| v.subset.len() == self.k)
    }

    /// First failing subset (the minimal witness under the report ordering).
    pub fn first_failure(&self) -> Option<&SubsetVerdict> {
        self.verdicts.iter().find(|v| !v.pass)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson::from(self)).expect("report serialization")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ReportJson::from(self)).expect("report serialization")
    }
}

/// Checks k-uniformity with auto-selected arithmetic (exact for exact-mode
/// states) and the given subset sweep and tolerance.
pub fn check_uniformity(
    psi: &PureState,
    k: usize,
    mode: CheckMode,
    tolerance: f64,
) -> Result<UniformityReport> {
    check_uniformity_opts(psi, k, mode, tolerance, None)
}

/// As [`check_uniformity`] but with the arithmetic forced. Forcing `Exact`
/// on a non-exact state fails with [`Error::NotUniformMagnitude`].
pub fn check_uniformity_opts(
    psi: &PureState,
    k: usize,
    mode: CheckMode,
    tolerance: f64,
    arithmetic: Option<Arithmetic>,
) -> Result<UniformityReport> {
    let n = psi.n_qubits();
    if k == 0 || k > n || k > MAX_CHECK_K {
        return Err(Error::InvalidOrder { k, max: n.min(MAX_CHECK_K) });
    }
    let arithmetic = match arithmetic {
        Some(Arithmetic::Exact) if !psi.is_exact() => return Err(Error::NotUniformMagnitude),
        Some(a) => a,
        None => {
            if psi.is_exact() {
                Arithmetic::Exact
            } else {
                Arithmetic::Float
            }
        }
    };
    let tolerance = match arithmetic {
        Arithmetic::Exact => 0.0,
        Arithmetic::Float => tolerance,
    };

    let sizes: Vec<usize> = match mode {
        CheckMode::SizeKOnly => vec![k],
        CheckMode::AllSizes => (1..=k).collect(),
    };
    let mut subsets = Vec::new();
    for size in sizes {
        subsets.extend(QubitSubset::all_of_size(n, size));
    }

    let results = par::map_slice(&subsets, |subset| verdict(psi, subset, arithmetic, tolerance));
    let mut verdicts = Vec::with_capacity(results.len());
    for r in results {
        verdicts.push(r?);
    }

    let is_k_uniform = verdicts.iter().filter(|v| v.subset.len() == k).all(|v| v.pass);
    let max_deviation = verdicts.iter().map(|v| v.deviation).fold(0.0f64, f64::max);
    Ok(UniformityReport {
        n_qubits: n,
        k,
        mode: arithmetic,
        check_mode: mode,
        tolerance,
        is_k_uniform,
        max_deviation,
        impossible_k: k > n / 2,
        verdicts,
    })
}

fn verdict(
    psi: &PureState,
    subset: &QubitSubset,
    arithmetic: Arithmetic,
    tolerance: f64,
) -> Result<SubsetVerdict> {
    let trace = purity(&partial_trace(psi, subset)?);
    let invariant = purity_via_invariants(psi, subset)?;

    if (trace.value - invariant.value).abs() > CONSISTENCY_TOL {
        return Err(Error::InternalInconsistency(format!(
            "purity routes disagree on {subset}: trace {} vs invariants {}",
            trace.value, invariant.value
        )));
    }
    if let (Some(a), Some(b)) = (trace.exact, invariant.exact) {
        if !a.eq_value(&b) {
            return Err(Error::InternalInconsistency(format!(
                "exact purity routes disagree on {subset}: {}/{} vs {}/{}",
                a.num, a.den, b.num, b.den
            )));
        }
    }

    let target = ExactRatio::new(1, 1i128 << subset.len());
    let deviation = (trace.value - target.as_f64()).abs();
    let pass = match arithmetic {
        Arithmetic::Exact => trace.exact.expect("exact mode").eq_value(&target),
        Arithmetic::Float => deviation <= tolerance,
    };
    Ok(SubsetVerdict {
        subset: subset.clone(),
        purity_trace: trace,
        purity_invariant: invariant,
        target,
        deviation,
        pass,
    })
}

/// Trace-path purities for every subset of the given size, sorted.
pub fn purity_table(psi: &PureState, size: usize) -> Result<Vec<(QubitSubset, Purity)>> {
    let n = psi.n_qubits();
    if size == 0 || size > n || size > MAX_CHECK_K {
        return Err(Error::InvalidOrder { k: size, max: n.min(MAX_CHECK_K) });
    }
    let subsets = QubitSubset::all_of_size(n, size);
    let results = par::map_slice(&subsets, |s| partial_trace(psi, s).map(|rho| purity(&rho)));
    let mut out = Vec::with_capacity(subsets.len());
    for (subset, r) in subsets.into_iter().zip(results) {
        out.push((subset, r?));
    }
    Ok(out)
}

// ---------------------------------------------------------------- JSON form

#[derive(Serialize)]
struct ReportJson {
    schema_version: u32,
    n_qubits: usize,
    k: usize,
    mode: &'static str,
    tolerance: f64,
    is_k_uniform: bool,
    max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
    verdicts: Vec<VerdictJson>,
}

#[derive(Serialize)]
struct VerdictJson {
    subset: Vec<usize>,
    purity: PurityJson,
    target: RatioJson,
    pass: bool,
}

#[derive(Serialize)]
#[serde(untagged)]
enum PurityJson {
    Exact(RatioJson),
    Float(f64),
}

#[derive(Serialize)]
struct RatioJson {
    num: i64,
    den: i64,
}

pub(crate) fn ratio_json(r: &ExactRatio) -> Option<(i64, i64)> {
    let red = r.reduced();
    match (i64::try_from(red.num), i64::try_from(red.den)) {
        (Ok(num), Ok(den)) => Some((num, den)),
        _ => None,
    }
}

pub(crate) fn purity_to_json(p: &Purity) -> serde_json::Value {
    match p.exact.as_ref().and_then(ratio_json) {
        Some((num, den)) => serde_json::json!({ "num": num, "den": den }),
        None => serde_json::json!(p.value),
    }
}

impl From<&UniformityReport> for ReportJson {
    fn from(r: &UniformityReport) -> Self {
        let verdicts = r
            .verdicts
            .iter()
            .map(|v| VerdictJson {
                subset: v.subset.indices().to_vec(),
                purity: match v.purity_trace.exact.as_ref().and_then(ratio_json) {
                    Some((num, den)) => PurityJson::Exact(RatioJson { num, den }),
                    None => PurityJson::Float(v.purity_trace.value),
                },
                target: {
                    let (num, den) = ratio_json(&v.target).expect("small target ratio");
                    RatioJson { num, den }
                },
                pass: v.pass,
            })
            .collect();
        ReportJson {
            schema_version: REPORT_SCHEMA_VERSION,
            n_qubits: r.n_qubits,
            k: r.k,
            mode: r.mode.as_str(),
            tolerance: r.tolerance,
            is_k_uniform: r.is_k_uniform,
            max_deviation: r.max_deviation,
            warning: r.impossible_k.then(|| {
                format!(
                    "k = {} exceeds floor(n/2) = {}; no {}-qubit state can be {}-uniform",
                    r.k,
                    r.n_qubits / 2,
                    r.n_qubits,
                    r.k
                )
            }),
            verdicts,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::from_entries(2, &[("00", h, 0.0), ("11", h, 0.0)]).unwrap()
    }

    #[test]
    fn bell_is_1_uniform() {
        let report = check_uniformity(&bell(), 1, CheckMode::SizeKOnly, DEFAULT_TOLERANCE).unwrap();
        assert!(report.is_k_uniform);
        assert_eq!(report.verdicts.len(), 2);
        assert_eq!(report.mode, Arithmetic::Exact);
        assert_eq!(report.tolerance, 0.0);
        for v in &report.verdicts {
            assert!(v.purity_trace.exact.unwrap().eq_value(&ExactRatio::new(1, 2)));
            assert!(v.pass);
        }
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn product_state_fails_with_half_deviation() {
        let s = PureState::from_entries(2, &[("00", 1.0, 0.0)]).unwrap();
        let report = check_uniformity(&s, 1, CheckMode::SizeKOnly, DEFAULT_TOLERANCE).unwrap();
        assert!(!report.is_k_uniform);
        assert!((report.max_deviation - 0.5).abs() < 1e-12);
        assert_eq!(report.first_failure().unwrap().subset.indices(), &[1]);
    }

    #[test]
    fn impossible_k_is_stamped_not_silent() {
        let report = check_uniformity(&bell(), 2, CheckMode::SizeKOnly, DEFAULT_TOLERANCE).unwrap();
        assert!(report.impossible_k);
        assert!(!report.is_k_uniform); // purity of the full pair is 1
        let json = report.to_json();
        assert!(json.contains("warning"));
    }

    #[test]
    fn all_sizes_mode_counts() {
        let report = check_uniformity(&bell(), 2, CheckMode::AllSizes, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(report.verdicts.len(), 3); // {1}, {2}, {1,2}
    }

    #[test]
    fn forced_float_on_exact_state() {
        let report =
            check_uniformity_opts(&bell(), 1, CheckMode::SizeKOnly, 1e-10, Some(Arithmetic::Float))
                .unwrap();
        assert_eq!(report.mode, Arithmetic::Float);
        assert!(report.is_k_uniform);
    }

    #[test]
    fn forced_exact_on_float_state_rejected() {
        let s = PureState::from_entries(1, &[("0", 0.6, 0.0), ("1", 0.8, 0.0)]).unwrap();
        assert!(matches!(
            check_uniformity_opts(&s, 1, CheckMode::SizeKOnly, 1e-10, Some(Arithmetic::Exact)),
            Err(Error::NotUniformMagnitude)
        ));
    }

    #[test]
    fn bad_k_rejected() {
        assert!(matches!(
            check_uniformity(&bell(), 0, CheckMode::SizeKOnly, 1e-10),
            Err(Error::InvalidOrder { .. })
        ));
        assert!(matches!(
            check_uniformity(&bell(), 3, CheckMode::SizeKOnly, 1e-10),
            Err(Error::InvalidOrder { .. })
        ));
    }

    #[test]
    fn purity_table_bell() {
        let table = purity_table(&bell(), 1).unwrap();
        assert_eq!(table.len(), 2);
        for (_, p) in &table {
            assert!(p.exact.unwrap().eq_value(&ExactRatio::new(1, 2)));
        }
    }

    #[test]
    fn json_field_order_is_stable() {
        let report = check_uniformity(&bell(), 1, CheckMode::SizeKOnly, 1e-10).unwrap();
        let json = report.to_json();
        let n = json.find("\"n_qubits\"").unwrap();
        let k = json.find("\"k\"").unwrap();
        let mode = json.find("\"mode\"").unwrap();
        let tol = json.find("\"tolerance\"").unwrap();
        let uni = json.find("\"is_k_uniform\"").unwrap();
        let dev = json.find("\"max_deviation\"").unwrap();
        let ver = json.find("\"verdicts\"").unwrap();
        let schema = json.find("\"schema_version\"").unwrap();
        assert!(schema < n && n < k && k < mode && mode < tol && tol < uni && uni < dev && dev < ver);
        assert!(json.contains("\"num\": 1"));
        assert!(json.contains("\"den\": 2"));
    }
}
