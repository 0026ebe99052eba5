//! Search over ±1 sign assignments on a fixed support.
//!
//! The objective is the total invariant mass `Σ_{1 ≤ |T| ≤ k} F_T` of the
//! signed superposition — non-negative, and zero exactly when the state is
//! k-uniform. Internally everything is integer arithmetic: each
//! sign-dependent Pauli string contributes `(Σ_pairs s_i s_j ±1)²` to
//! `objective · r²`, so zero detection is exact and tie-breaking is total.
//!
//! Z-only strings are sign-independent (the signs square away) and fold into
//! a constant; odd-Y strings vanish identically on real states and are
//! skipped.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oa::OrthogonalArray;
use crate::par;
use crate::state::QubitSubset;

/// Cost-control cap on k for sign-search objectives.
pub const MAX_SEARCH_K: usize = 4;
/// Default evaluation budget for the exhaustive search (supports r ≤ 21).
pub const DEFAULT_EXHAUSTIVE_LIMIT: u64 = 1 << 20;

/// ±1 signs aligned to sorted support rows, canonicalized to `signs[0] = +1`
/// (negating every sign is the same state up to global phase).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn from_signs(mut signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::MalformedSigns { message: "empty sign vector".into() });
        }
        if let Some(&bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::MalformedSigns { message: format!("entry {bad} is not ±1") });
        }
        if signs[0] == -1 {
            for s in &mut signs {
                *s = -*s;
            }
        }
        Ok(SignVector { signs })
    }

    pub fn all_plus(len: usize) -> Result<Self> {
        Self::from_signs(vec![1; len])
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_all_plus(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    /// One `+`/`-` character per row.
    pub fn to_line(&self) -> String {
        self.signs.iter().map(|&s| if s == 1 { '+' } else { '-' }).collect()
    }

    /// Parses a `+`/`-` line (whitespace ignored).
    pub fn parse(text: &str) -> Result<Self> {
        let mut signs = Vec::new();
        for c in text.chars() {
            match c {
                '+' => signs.push(1),
                '-' => signs.push(-1),
                c if c.is_whitespace() => {}
                other => {
                    return Err(Error::MalformedSigns {
                        message: format!("invalid character {other:?}"),
                    })
                }
            }
        }
        Self::from_signs(signs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMethod {
    Exhaustive,
    Local,
}

impl SearchMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMethod::Exhaustive => "exhaustive",
            SearchMethod::Local => "local",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub best_signs: SignVector,
    pub objective: f64,
    pub achieved_k_uniform: bool,
    pub evaluations: u64,
    pub method: SearchMethod,
    /// True only when the whole canonical space was enumerated.
    pub certificate: bool,
}

// ---------------------------------------------------------------- objective

/// One sign-dependent Pauli string: `⟨P⟩ · r = Σ s_i s_j sgn` over pairs.
struct PairString {
    /// `(i, j, sgn)`: row i pairs with row j = index of `row_i XOR flip`.
    pairs: Vec<(u32, u32, i8)>,
}

/// Precomputed integer objective for a fixed support.
struct ObjectiveCtx {
    r: usize,
    /// `Σ acc²` over sign-independent (Z-only) strings.
    constant_num: i128,
    strings: Vec<PairString>,
    /// For each row, `(string index, i, j, sgn)` of every pair touching it.
    touching: Vec<Vec<(u32, u32, u32, i8)>>,
}

impl ObjectiveCtx {
    fn build(a: &OrthogonalArray, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_SEARCH_K {
            return Err(Error::InvalidOrder { k, max: MAX_SEARCH_K });
        }
        let n = a.factors();
        if k > n {
            return Err(Error::InvalidOrder { k, max: n });
        }
        let rows = a.rows();
        let r = rows.len();
        let row_index: std::collections::HashMap<u64, u32> =
            rows.iter().enumerate().map(|(i, &row)| (row, i as u32)).collect();

        let mut constant_num: i128 = 0;
        let mut strings = Vec::new();
        for size in 1..=k {
            for subset in QubitSubset::all_of_size(n, size) {
                for code in 0..3usize.pow(size as u32) {
                    let mut flip = 0u64;
                    let mut phase = 0u64;
                    let mut y_count = 0u32;
                    let mut c = code;
                    for &q in subset.indices() {
                        let bit = 1u64 << (n - q);
                        match c % 3 {
                            0 => flip |= bit,
                            1 => {
                                flip |= bit;
                                phase |= bit;
                                y_count += 1;
                            }
                            _ => phase |= bit,
                        }
                        c /= 3;
                    }
                    if y_count % 2 == 1 {
                        continue; // vanishes identically for real signs
                    }
                    if flip == 0 {
                        // Z-only: signs square away, the value is fixed
                        let acc: i64 = rows
                            .iter()
                            .map(|&row| if (row & phase).count_ones() % 2 == 1 { -1i64 } else { 1 })
                            .sum();
                        constant_num += i128::from(acc) * i128::from(acc);
                        continue;
                    }
                    let mut pairs = Vec::new();
                    for (i, &row) in rows.iter().enumerate() {
                        if let Some(&j) = row_index.get(&(row ^ flip)) {
                            let sgn: i8 =
                                if (row & phase).count_ones() % 2 == 1 { -1 } else { 1 };
                            pairs.push((i as u32, j, sgn));
                        }
                    }
                    if !pairs.is_empty() {
                        strings.push(PairString { pairs });
                    }
                }
            }
        }

        let mut touching: Vec<Vec<(u32, u32, u32, i8)>> = vec![Vec::new(); r];
        for (sidx, s) in strings.iter().enumerate() {
            for &(i, j, sgn) in &s.pairs {
                touching[i as usize].push((sidx as u32, i, j, sgn));
                if i != j {
                    touching[j as usize].push((sidx as u32, i, j, sgn));
                }
            }
        }
        Ok(ObjectiveCtx { r, constant_num, strings, touching })
    }

    /// Per-string accumulators `acc_P = Σ s_i s_j sgn` for the given signs.
    fn accumulators(&self, signs: &[i8]) -> Vec<i64> {
        self.strings
            .iter()
            .map(|s| {
                s.pairs
                    .iter()
                    .map(|&(i, j, sgn)| {
                        i64::from(signs[i as usize]) * i64::from(signs[j as usize]) * i64::from(sgn)
                    })
                    .sum()
            })
            .collect()
    }

    /// `objective · r²` as an exact integer.
    fn num(&self, accs: &[i64]) -> i128 {
        self.constant_num + accs.iter().map(|&a| i128::from(a) * i128::from(a)).sum::<i128>()
    }

    fn eval(&self, signs: &[i8]) -> i128 {
        self.num(&self.accumulators(signs))
    }

    fn to_objective(&self, num: i128) -> f64 {
        num as f64 / (self.r as f64 * self.r as f64)
    }
}

/// `Σ_{1 ≤ |T| ≤ k} F_T` of the signed superposition over the array's rows.
/// Zero iff that state is k-uniform.
pub fn objective(a: &OrthogonalArray, signs: &SignVector, k: usize) -> Result<f64> {
    if signs.len() != a.runs() {
        return Err(Error::MalformedSigns {
            message: format!("{} signs for {} rows", signs.len(), a.runs()),
        });
    }
    let ctx = ObjectiveCtx::build(a, k)?;
    Ok(ctx.to_objective(ctx.eval(signs.signs())))
}

// ---------------------------------------------------------------- exhaustive

/// Enumerates every canonical sign vector (2^(r-1) candidates) and returns
/// the global minimum; deterministic, ties to the lowest candidate index.
pub fn search_exhaustive(a: &OrthogonalArray, k: usize, limit: u64) -> Result<SearchOutcome> {
    let r = a.runs();
    let budget_bits = 63.min(limit.ilog2() as usize);
    if r == 0 || r - 1 > budget_bits {
        return Err(Error::SupportTooLarge { rows: r, max_rows: budget_bits + 1 });
    }
    let ctx = ObjectiveCtx::build(a, k)?;
    let total: u64 = 1u64 << (r - 1);
    let chunk: u64 = 1 << 12;
    let n_chunks = total.div_ceil(chunk) as usize;

    let best_per_chunk = par::map_indexed(n_chunks, |ci| {
        let start = ci as u64 * chunk;
        let end = total.min(start + chunk);
        let mut signs = vec![1i8; r];
        let mut best: Option<(i128, u64)> = None;
        for mask in start..end {
            for (bit, s) in signs[1..].iter_mut().enumerate() {
                *s = if (mask >> bit) & 1 == 1 { -1 } else { 1 };
            }
            let num = ctx.eval(&signs);
            if best.map_or(true, |(b, _)| num < b) {
                best = Some((num, mask));
            }
        }
        best.expect("non-empty chunk")
    });
    let (best_num, best_mask) =
        best_per_chunk.into_iter().min_by_key(|&(num, mask)| (num, mask)).expect("chunks exist");

    let mut signs = vec![1i8; r];
    for bit in 0..r - 1 {
        signs[bit + 1] = if (best_mask >> bit) & 1 == 1 { -1 } else { 1 };
    }
    Ok(SearchOutcome {
        best_signs: SignVector::from_signs(signs)?,
        objective: ctx.to_objective(best_num),
        achieved_k_uniform: best_num == 0,
        evaluations: total,
        method: SearchMethod::Exhaustive,
        certificate: true,
    })
}

// ---------------------------------------------------------------- local

struct Descent {
    signs: Vec<i8>,
    num: i128,
    evaluations: u64,
    /// Objective numerator after each accepted flip (strictly decreasing).
    trace: Vec<i128>,
}

/// Steepest single-flip descent; flips only strictly improving moves, ties
/// broken by the lowest flip index. Integer arithmetic throughout.
fn descend(ctx: &ObjectiveCtx, mut signs: Vec<i8>) -> Descent {
    let mut accs = ctx.accumulators(&signs);
    let mut num = ctx.num(&accs);
    let mut evaluations = 1u64;
    let mut trace = Vec::new();

    while num > 0 {
        let mut best: Option<(i128, usize)> = None;
        for t in 1..ctx.r {
            // delta of flipping s_t: every touched string loses 2 * (its
            // pair mass through t)
            let mut delta: i128 = 0;
            let mut cur_string = u32::MAX;
            let mut d: i64 = 0;
            let mut flush = |sidx: u32, d: i64, delta: &mut i128| {
                if sidx != u32::MAX && d != 0 {
                    let old = i128::from(accs[sidx as usize]);
                    let new = old - 2 * i128::from(d);
                    *delta += new * new - old * old;
                }
            };
            for &(sidx, i, j, sgn) in &ctx.touching[t] {
                if sidx != cur_string {
                    flush(cur_string, d, &mut delta);
                    cur_string = sidx;
                    d = 0;
                }
                d += i64::from(signs[i as usize]) * i64::from(signs[j as usize]) * i64::from(sgn);
            }
            flush(cur_string, d, &mut delta);
            evaluations += 1;
            if delta < 0 && best.map_or(true, |(b, _)| delta < b) {
                best = Some((delta, t));
            }
        }
        let Some((delta, t)) = best else { break };
        // apply: update accumulators of the touched strings, then the sign
        let mut cur_string = u32::MAX;
        let mut d: i64 = 0;
        let mut updates: Vec<(u32, i64)> = Vec::new();
        for &(sidx, i, j, sgn) in &ctx.touching[t] {
            if sidx != cur_string {
                if cur_string != u32::MAX && d != 0 {
                    updates.push((cur_string, d));
                }
                cur_string = sidx;
                d = 0;
            }
            d += i64::from(signs[i as usize]) * i64::from(signs[j as usize]) * i64::from(sgn);
        }
        if cur_string != u32::MAX && d != 0 {
            updates.push((cur_string, d));
        }
        for (sidx, d) in updates {
            accs[sidx as usize] -= 2 * d;
        }
        signs[t] = -signs[t];
        num += delta;
        debug_assert_eq!(num, ctx.num(&accs));
        trace.push(num);
    }
    Descent { signs, num, evaluations, trace }
}

/// Greedy descent from seeded random sign vectors (restart 0 is all-plus),
/// restarts independent and reduced deterministically: best objective wins,
/// ties to the lowest restart index.
pub fn search_local(
    a: &OrthogonalArray,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let ctx = ObjectiveCtx::build(a, k)?;
    let r = ctx.r;

    let outcomes = par::map_indexed(restarts, |restart| {
        let start = if restart == 0 {
            vec![1i8; r]
        } else {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut signs: Vec<i8> =
                (0..r).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            signs[0] = 1;
            signs
        };
        descend(&ctx, start)
    });

    let mut evaluations = 0u64;
    let mut best: Option<(i128, usize)> = None;
    for (idx, d) in outcomes.iter().enumerate() {
        evaluations += d.evaluations;
        if best.map_or(true, |(b, _)| d.num < b) {
            best = Some((d.num, idx));
        }
    }
    let (best_num, best_idx) = best.expect("restarts >= 1");
    let winner = &outcomes[best_idx];
    Ok(SearchOutcome {
        best_signs: SignVector::from_signs(winner.signs.clone())?,
        objective: ctx.to_objective(best_num),
        achieved_k_uniform: best_num == 0,
        evaluations,
        method: SearchMethod::Local,
        certificate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(factors: usize, rows: Vec<u64>) -> OrthogonalArray {
        OrthogonalArray::new(factors, rows).unwrap()
    }

    #[test]
    fn bell_support_is_already_1_uniform() {
        let a = rows(2, vec![0b00, 0b11]);
        let all_plus = SignVector::all_plus(2).unwrap();
        assert_eq!(objective(&a, &all_plus, 1).unwrap(), 0.0);
    }

    #[test]
    fn constant_column_cannot_be_fixed_by_signs() {
        let a = rows(2, vec![0b00, 0b01]);
        for mask in 0..2u8 {
            let signs = SignVector::from_signs(vec![1, if mask == 0 { 1 } else { -1 }]).unwrap();
            assert!(objective(&a, &signs, 1).unwrap() > 0.0);
        }
    }

    #[test]
    fn exhaustive_finds_signing_of_full_factorial_n2() {
        // frozen by enumeration: minimum 0, e.g. signs +-++ (rows 00,01,10,11)
        let a = rows(2, (0..4).collect());
        let out = search_exhaustive(&a, 1, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
        assert!(out.certificate);
        assert_eq!(out.method, SearchMethod::Exhaustive);
        assert_eq!(out.evaluations, 8);
        assert_eq!(out.objective, 0.0);
        assert!(out.achieved_k_uniform);
        assert_eq!(out.best_signs.to_line(), "+-++");
        assert_eq!(objective(&a, &out.best_signs, 1).unwrap(), 0.0);
    }

    #[test]
    fn exhaustive_certifies_no_2_uniform_4_qubit_signing() {
        // even-weight support, frozen by enumeration: min objective = 2 exactly
        let even: Vec<u64> = (0..16).filter(|x: &u64| x.count_ones() % 2 == 0).collect();
        let a = rows(4, even);
        let out = search_exhaustive(&a, 2, DEFAULT_EXHAUSTIVE_LIMIT).unwrap();
        assert!(out.certificate);
        assert!(!out.achieved_k_uniform);
        assert_eq!(out.objective, 2.0);
    }

    #[test]
    fn exhaustive_budget_enforced() {
        let a = rows(5, (0..32).collect());
        assert!(matches!(
            search_exhaustive(&a, 1, 1 << 20),
            Err(Error::SupportTooLarge { rows: 32, .. })
        ));
    }

    #[test]
    fn local_restart_zero_is_all_plus() {
        let a = rows(2, vec![0b00, 0b11]);
        let out = search_local(&a, 1, 1, 12345).unwrap();
        assert!(out.achieved_k_uniform);
        assert!(out.best_signs.is_all_plus());
        assert!(!out.certificate);
    }

    #[test]
    fn local_fixes_full_factorial_n2() {
        let a = rows(2, (0..4).collect());
        let out = search_local(&a, 1, 8, 7).unwrap();
        assert!(out.achieved_k_uniform, "objective {}", out.objective);
        assert_eq!(objective(&a, &out.best_signs, 1).unwrap(), 0.0);
    }

    #[test]
    fn local_cannot_fix_constant_column() {
        let a = rows(3, vec![0b000, 0b001, 0b010, 0b011]);
        let out = search_local(&a, 1, 16, 3).unwrap();
        assert!(!out.achieved_k_uniform);
        assert!(out.objective > 0.0);
    }

    #[test]
    fn seed_determinism() {
        let a = rows(3, vec![0b000, 0b011, 0b101, 0b110]);
        let a2 = a.clone();
        let o1 = search_local(&a, 2, 12, 99).unwrap();
        let o2 = search_local(&a2, 2, 12, 99).unwrap();
        assert_eq!(o1.best_signs, o2.best_signs);
        assert_eq!(o1.objective, o2.objective);
        assert_eq!(o1.evaluations, o2.evaluations);
    }

    #[test]
    fn global_phase_invariance() {
        let a = rows(2, (0..4).collect());
        let ctx = ObjectiveCtx::build(&a, 1).unwrap();
        for mask in 0..16u8 {
            let signs: Vec<i8> =
                (0..4).map(|i| if (mask >> i) & 1 == 1 { -1 } else { 1 }).collect();
            let negated: Vec<i8> = signs.iter().map(|&s| -s).collect();
            assert_eq!(ctx.eval(&signs), ctx.eval(&negated));
        }
    }

    #[test]
    fn descent_strictly_decreases() {
        let a = rows(3, (0..8).collect());
        let ctx = ObjectiveCtx::build(&a, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut signs: Vec<i8> =
                (0..8).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            signs[0] = 1;
            let start_num = ctx.eval(&signs);
            let d = descend(&ctx, signs);
            let mut prev = start_num;
            for &v in &d.trace {
                assert!(v < prev, "flip did not strictly decrease: {prev} -> {v}");
                prev = v;
            }
            assert_eq!(d.num, prev);
        }
    }

    #[test]
    fn sign_vector_canonicalization_and_io() {
        let v = SignVector::from_signs(vec![-1, 1, -1]).unwrap();
        assert_eq!(v.to_line(), "+-+");
        let parsed = SignVector::parse(" +- + ").unwrap();
        assert_eq!(parsed.signs(), &[1, -1, 1]);
        assert!(SignVector::parse("+x").is_err());
        assert!(SignVector::from_signs(vec![]).is_err());
    }
}
