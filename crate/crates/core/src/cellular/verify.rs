use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    basis_index, coordinates, murphy_basis_matrix, transition_matrices, CellError, MurphyBasis, Seminormal, Setting,
    TransitionMatrices,
};
use crate::engine::{random_element, Algebra, CosetChoice, Element, Key};
use crate::linalg::RatMatrix;
use crate::scalars::{Coeff, Poly, Specialization, Variant};
use crate::symgrp::{beta, gamma};
use crate::tabcomb::{
    coeff_d_t, coeff_deg_trace, dominates_pair, enum_multipartitions, enum_std_tableaux, eps_murphy_coeff,
    last_box_coeff_forms, seminormal_last_coeff, seminormal_norm, seminormal_trace_coeff, StdTableau,
};

#[derive(Clone, Debug, Serialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct Failure {
    pub lambda: String,
    pub s: String,
    pub t: String,
    pub expected: String,
    pub got: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
}

impl Failure {
    fn general(case: impl Into<String>, expected: String, got: String) -> Self {
        Failure { lambda: String::new(), s: String::new(), t: String::new(), expected, got, case: Some(case.into()) }
    }

    fn at(s: &StdTableau, t: &StdTableau, expected: String, got: String) -> Self {
        Failure { lambda: s.shape().to_string(), s: s.to_string(), t: t.to_string(), expected, got, case: None }
    }

    fn with_case(mut self, case: impl Into<String>) -> Self {
        self.case = Some(case.into());
        self
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Report {
    pub check: String,
    pub variant: Variant,
    pub ell: usize,
    pub n: usize,
    pub specialization: String,
    pub status: Status,
    /// Number of individual identities compared.
    pub checked: usize,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    fn finish<C: Coeff>(check: &str, setting: &Setting<C>, n: usize, mut tally: Tally, start: Instant) -> Self {
        tally.failures.sort();
        Report {
            check: check.to_string(),
            variant: setting.variant(),
            ell: setting.ell(),
            n,
            specialization: setting.describe(),
            status: if tally.failures.is_empty() { Status::Pass } else { Status::Fail },
            checked: tally.checked,
            failures: tally.failures,
            elapsed_ms: Some(start.elapsed().as_millis() as u64),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// One line: check, sizes, status and failure count.
    pub fn summary(&self) -> String {
        format!(
            "{} {} ell={} n={} [{}]: {} ({} checked, {} failures)",
            self.check,
            self.variant,
            self.ell,
            self.n,
            self.specialization,
            if self.passed() { "pass" } else { "fail" },
            self.checked,
            self.failures.len()
        )
    }
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<Failure>,
}

impl Tally {
    fn record(&mut self, ok: bool, failure: impl FnOnce() -> Failure) {
        self.checked += 1;
        if !ok {
            self.failures.push(failure());
        }
    }

    fn elements<C: Coeff>(
        &mut self,
        setting: &Setting<C>,
        case: impl Into<String>,
        got: &Element<C>,
        want: &Element<C>,
    ) {
        self.record(got == want, || Failure::general(case, setting.show_element(want), setting.show_element(got)));
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

fn mul_all<C: Coeff>(alg: &Algebra<C>, xs: &[&Element<C>]) -> Element<C> {
    let mut out = xs[0].clone();
    for x in &xs[1..] {
        out = alg.mul(&out, x).expect("same rank");
    }
    out
}

fn commutator_case<C: Coeff>(setting: &Setting<C>, tally: &mut Tally, case: String, x: &Element<C>, y: &Element<C>) {
    let alg = setting.alg();
    tally.elements(setting, case, &alg.mul(x, y).expect("same rank"), &alg.mul(y, x).expect("same rank"));
}

/// Defining relations, Jucys–Murphy commutation rules and the shift
/// identities for `T_{γ_{n-1,k}}` at rank `n`.
pub fn verify_relations<C: Coeff>(setting: &Setting<C>, n: usize) -> Result<Report, CellError> {
    let start = Instant::now();
    let alg = setting.alg();
    let variant = setting.variant();
    let mut tally = Tally::default();
    let one = Element::one(n);
    let t: Vec<Element<C>> = (1..n).map(|i| alg.t(i, n)).collect::<Result<_, _>>()?;
    let l: Vec<Element<C>> = (1..=n).map(|k| alg.l(k, n)).collect::<Result<_, _>>()?;
    let scalar = |c: &C| Element::scalar(n, c.clone());

    let mut cyc = one.clone();
    for q in alg.cyclo() {
        cyc = alg.mul(&cyc, &(&l[0] - &scalar(q)))?;
    }
    tally.elements(setting, "cyclotomic", &cyc, &Element::zero(n));

    let q = alg.q().clone();
    let mut q_minus_one = q.clone();
    q_minus_one -= &C::one();
    for (i, ti) in t.iter().enumerate() {
        let sq = alg.mul(ti, ti)?;
        let want = match variant {
            Variant::NonDegenerate => &ti.scale(&q_minus_one) + &scalar(&q),
            Variant::Degenerate => one.clone(),
        };
        tally.elements(setting, format!("quadratic T{}", i + 1), &sq, &want);
        for (j, tj) in t.iter().enumerate().skip(i + 2) {
            commutator_case(setting, &mut tally, format!("T{} T{}", i + 1, j + 1), ti, tj);
        }
        if let Some(tn) = t.get(i + 1) {
            tally.elements(
                setting,
                format!("braid T{} T{}", i + 1, i + 2),
                &mul_all(alg, &[ti, tn, ti]),
                &mul_all(alg, &[tn, ti, tn]),
            );
        }
    }
    match variant {
        Variant::NonDegenerate => {
            let q_inv = setting.lift(&Poly::q_pow(-1))?;
            if let Some(t1) = t.first() {
                tally.elements(
                    setting,
                    "T0 T1 T0 T1",
                    &mul_all(alg, &[&l[0], t1, &l[0], t1]),
                    &mul_all(alg, &[t1, &l[0], t1, &l[0]]),
                );
            }
            for (i, ti) in t.iter().enumerate().skip(1) {
                commutator_case(setting, &mut tally, format!("T0 T{}", i + 1), &l[0], ti);
            }
            for (k, tk) in t.iter().enumerate() {
                let want = mul_all(alg, &[tk, &l[k], tk]).scale(&q_inv);
                tally.elements(setting, format!("L{} from L{}", k + 2, k + 1), &l[k + 1], &want);
            }
        }
        Variant::Degenerate => {
            for (i, si) in t.iter().enumerate() {
                let want = &mul_all(alg, &[si, &l[i], si]) + si;
                tally.elements(setting, format!("L{} from L{}", i + 2, i + 1), &l[i + 1], &want);
                for (k, lk) in l.iter().enumerate() {
                    if k != i && k != i + 1 {
                        commutator_case(setting, &mut tally, format!("s{} L{}", i + 1, k + 1), si, lk);
                    }
                }
            }
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            commutator_case(setting, &mut tally, format!("L{} L{}", i + 1, j + 1), &l[i], &l[j]);
        }
    }
    let a = &alg.cyclo()[1.min(alg.ell() - 1)];
    let mut partial = vec![one.clone()];
    for lk in &l {
        let next = alg.mul(partial.last().unwrap(), &(lk - &scalar(a)))?;
        partial.push(next);
    }
    for (i, ti) in t.iter().enumerate() {
        let prod = alg.mul(&l[i], &l[i + 1])?;
        let sum = &l[i] + &l[i + 1];
        commutator_case(setting, &mut tally, format!("T{} with L{}L{}", i + 1, i + 1, i + 2), ti, &prod);
        commutator_case(setting, &mut tally, format!("T{} with L{}+L{}", i + 1, i + 1, i + 2), ti, &sum);
        for (j, f) in partial.iter().enumerate().skip(1) {
            if j != i + 1 {
                commutator_case(setting, &mut tally, format!("T{} with prod_(k<={j}) (L_k - a)", i + 1), ti, f);
            }
        }
    }

    for k in 1..n {
        let g = alg.t_w(&gamma(n - 1, k, n).expect("in range"));
        for i in k + 1..n {
            tally.elements(
                setting,
                format!("gamma({},{}) T{i}", n - 1, k),
                &alg.mul(&g, &t[i - 1])?,
                &alg.mul(&t[i - 2], &g)?,
            );
        }
        if variant == Variant::NonDegenerate {
            let h = alg.mul(&g, &alg.t_w(&beta(k, n - 1, n).expect("in range")))?;
            let d = alg.mackey_decompose(&h, CosetChoice::RightMinimal)?;
            let want = Element::scalar(n - 1, setting.lift(&Poly::q_pow((n - k) as i32))?);
            tally.elements(setting, format!("p0 of gamma({},{}) beta({k},{})", n - 1, k, n - 1), &d.lower[0], &want);
            for (j, p) in d.lower.iter().enumerate().skip(1) {
                tally.elements(setting, format!("p{j} of gamma beta, k={k}"), p, &Element::zero(n - 1));
            }
        }
    }
    Ok(Report::finish("relations", setting, n, tally, start))
}

/// Decomposition followed by reconstruction is the identity on every basis
/// key, and both coset factorizations give the same buckets.
pub fn verify_mackey<C: Coeff>(setting: &Setting<C>, n: usize) -> Result<Report, CellError> {
    let start = Instant::now();
    let alg = setting.alg();
    let tallies: Vec<Tally> = alg
        .basis(n)
        .into_par_iter()
        .map(|k| {
            let mut tally = Tally::default();
            let case = k.to_string();
            let h = Element::from_key(k, C::one());
            let d = alg.mackey_decompose(&h, CosetChoice::RightMinimal).expect("positive rank");
            tally.elements(setting, format!("reconstruct {case}"), &alg.reconstruct(&d, n), &h);
            let mirrored = alg.mackey_decompose(&h, CosetChoice::LeftMinimal).expect("positive rank");
            for (b, (x, y)) in mirrored.lower.iter().zip(&d.lower).enumerate() {
                tally.elements(setting, format!("mirrored p{b} {case}"), x, y);
            }
            if n >= 2 {
                tally.elements(
                    setting,
                    format!("mirrored middle {case}"),
                    &alg.middle_image(&mirrored, n),
                    &alg.middle_image(&d, n),
                );
            }
            tally
        })
        .collect();
    let mut tally = Tally::default();
    tallies.into_iter().for_each(|t| tally.merge(t));
    Ok(Report::finish("mackey", setting, n, tally, start))
}

/// Iterated and direct traces agree on the basis, and the trace is symmetric
/// on `pairs` seeded random products.
pub fn verify_tau_equivalence<C: Coeff>(
    setting: &Setting<C>,
    n: usize,
    seed: u64,
    pairs: usize,
) -> Result<Report, CellError> {
    let start = Instant::now();
    let alg = setting.alg();
    let mut tally = Tally::default();
    let basis_results: Vec<(String, C, C)> = alg
        .basis(n)
        .into_par_iter()
        .map(|k| {
            let h = Element::from_key(k.clone(), C::one());
            (k.to_string(), alg.tau_direct(&h), alg.tau_iterated(&h))
        })
        .collect();
    for (case, direct, iterated) in basis_results {
        tally.record(direct == iterated, || {
            Failure::general(format!("basis {case}"), setting.show(&direct), setting.show(&iterated))
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(Element<C>, Element<C>)> =
        (0..pairs).map(|_| (random_element(alg, n, &mut rng), random_element(alg, n, &mut rng))).collect();
    let sym: Vec<(usize, C, C)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, (x, y))| {
            let xy = alg.tau_direct(&alg.mul(x, y).expect("same rank"));
            let yx = alg.tau_direct(&alg.mul(y, x).expect("same rank"));
            (i, xy, yx)
        })
        .collect();
    for (i, xy, yx) in sym {
        tally.record(xy == yx, || Failure::general(format!("random pair {i}"), setting.show(&xy), setting.show(&yx)));
    }
    Ok(Report::finish("tau-equiv", setting, n, tally, start))
}

/// One row of the trace table.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TraceRow {
    pub lambda: String,
    pub s: String,
    pub t: String,
    pub tau_engine: String,
    pub tau_formula: String,
    pub equal: bool,
}

/// Closed-form trace of `m_st` for the variant of the setting.
pub fn trace_formula(s: &StdTableau, t: &StdTableau, variant: Variant) -> Poly {
    if s != t {
        return Poly::zero();
    }
    match variant {
        Variant::NonDegenerate => coeff_d_t(t),
        Variant::Degenerate => coeff_deg_trace(t),
    }
}

/// `τ(m_st)` from the engine beside its closed form, in pair order.
pub fn trace_rows<C: Coeff>(setting: &Setting<C>, basis: &MurphyBasis<C>) -> Result<Vec<TraceRow>, CellError> {
    let alg = setting.alg();
    basis
        .elements
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let (s, t) = basis.pairs.pair(i);
            let got = alg.tau_direct(m);
            let want = setting.lift(&trace_formula(s, t, setting.variant()))?;
            Ok(TraceRow {
                lambda: s.shape().to_string(),
                s: s.to_string(),
                t: t.to_string(),
                tau_engine: setting.show(&got),
                tau_formula: setting.show(&want),
                equal: got == want,
            })
        })
        .collect()
}

fn require_variant<C: Coeff>(setting: &Setting<C>, check: &str, variant: Variant) -> Result<(), CellError> {
    if setting.variant() == variant {
        Ok(())
    } else {
        Err(CellError::WrongVariant { check: check.to_string(), variant: setting.variant() })
    }
}

fn verify_traces<C: Coeff>(setting: &Setting<C>, basis: &MurphyBasis<C>, check: &str) -> Result<Report, CellError> {
    let start = Instant::now();
    let mut tally = Tally::default();
    for (i, row) in trace_rows(setting, basis)?.into_iter().enumerate() {
        let (s, t) = basis.pairs.pair(i);
        tally.record(row.equal, || Failure::at(s, t, row.tau_formula.clone(), row.tau_engine.clone()));
    }
    Ok(Report::finish(check, setting, basis.n, tally, start))
}

/// `τ(m_st) = δ_st d_t` in the non-degenerate algebra.
pub fn verify_theorem1<C: Coeff>(setting: &Setting<C>, basis: &MurphyBasis<C>) -> Result<Report, CellError> {
    require_variant(setting, "theorem1", Variant::NonDegenerate)?;
    verify_traces(setting, basis, "theorem1")
}

/// `τ(m_st) = δ_st ∏_i [l(t,i) = 1]` in the degenerate algebra.
pub fn verify_theorem2<C: Coeff>(setting: &Setting<C>, basis: &MurphyBasis<C>) -> Result<Report, CellError> {
    require_variant(setting, "theorem2", Variant::Degenerate)?;
    verify_traces(setting, basis, "theorem2")
}

/// The Murphy element of two rank-`m` tableaux, rank 0 included.
fn lower_murphy<'a, C: Coeff>(lower: &'a MurphyBasis<C>, s: &StdTableau, t: &StdTableau) -> &'a Element<C> {
    lower.get(s, t).expect("restricted tableaux are standard")
}

/// `ε_n(m_st) = E·m_{s↓t↓}` when `k(s) = k(t)`, and `0` otherwise.
pub fn verify_eps_murphy<C: Coeff>(
    setting: &Setting<C>,
    basis: &MurphyBasis<C>,
    lower: &MurphyBasis<C>,
) -> Result<Report, CellError> {
    let start = Instant::now();
    let alg = setting.alg();
    let n = basis.n;
    let results: Vec<Result<Option<Failure>, CellError>> = basis
        .elements
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let (s, t) = basis.pairs.pair(i);
            let got = alg.epsilon(m)?;
            let want = if s.k_of() == t.k_of() {
                let e = setting.lift(&eps_murphy_coeff(t, setting.variant()))?;
                lower_murphy(lower, &s.restrict(n - 1), &t.restrict(n - 1)).scale(&e)
            } else {
                Element::zero(n - 1)
            };
            Ok((got != want).then(|| Failure::at(s, t, setting.show_element(&want), setting.show_element(&got))))
        })
        .collect();
    let mut tally = Tally::default();
    for r in results {
        let f = r?;
        tally.checked += 1;
        tally.failures.extend(f);
    }
    Ok(Report::finish("eps-murphy", setting, n, tally, start))
}

/// The generators `1, T_1, …, T_{n-1}, L_1, …, L_n` used by the cellularity check.
fn cellular_generators(alg: &Algebra<BigRational>, n: usize) -> Result<Vec<(String, Element<BigRational>)>, CellError> {
    let mut out = vec![("1".to_string(), Element::one(n))];
    for i in 1..n {
        out.push((format!("T{i}"), alg.t(i, n)?));
    }
    for k in 1..=n {
        out.push((format!("L{k}"), alg.l(k, n)?));
    }
    Ok(out)
}

/// For every generator `g` and every `m_st`, the Murphy expansion of
/// `m_st g` is `Σ_v r_tv m_sv` with `r_tv` independent of `s`, plus terms
/// on strictly more dominant shapes.
pub fn verify_cellularity(
    setting: &Setting<BigRational>,
    basis: &MurphyBasis<BigRational>,
) -> Result<Report, CellError> {
    let start = Instant::now();
    let alg = setting.alg();
    let n = basis.n;
    let pairs = &basis.pairs;
    let inverse = murphy_basis_matrix(alg, basis).inverse().ok_or(CellError::Singular)?;
    let index = basis_index(alg, n);
    let gens = cellular_generators(alg, n)?;
    let mut tally = Tally::default();
    for (name, g) in &gens {
        let rows: Vec<Vec<BigRational>> = basis
            .elements
            .par_iter()
            .map(|m| {
                let v = coordinates(&alg.mul(m, g).expect("same rank"), &index);
                inverse.mul(&RatMatrix::from_columns(v.len(), &[v])).column(0)
            })
            .collect();
        let mut reference: HashMap<(usize, usize), Vec<BigRational>> = HashMap::new();
        for (i, coords) in rows.iter().enumerate() {
            let (li, si, ti) = pairs.pairs[i];
            let (s, t) = pairs.pair(i);
            let lambda = &pairs.shapes[li];
            let mut same_row = vec![BigRational::zero(); pairs.tableaux[li].len()];
            for (j, c) in coords.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (lj, sj, tj) = pairs.pairs[j];
                let mu = &pairs.shapes[lj];
                if lj == li && sj == si {
                    same_row[tj] = c.clone();
                    continue;
                }
                let ok = lj != li && mu.dominates(lambda)?;
                tally.record(ok, || {
                    let (u, v) = pairs.pair(j);
                    Failure::at(s, t, "0".to_string(), c.to_string())
                        .with_case(format!("{name}: support on ({u}, {v})"))
                });
            }
            let first = reference.entry((li, ti)).or_insert_with(|| same_row.clone());
            let agree = *first == same_row;
            tally.record(agree, || {
                Failure::at(s, t, format!("{first:?}"), format!("{same_row:?}"))
                    .with_case(format!("{name}: row coefficients depend on s"))
            });
        }
    }
    Ok(Report::finish("cellular", setting, n, tally, start))
}

/// The default point used when a check needs specialized parameters but the
/// run is symbolic: `q = 2, Q_i = 64^{i-1}` or `u_i = 100(i-1)`.
pub fn default_specialization(variant: Variant, ell: usize) -> Specialization {
    let params: Vec<i64> = match variant {
        Variant::NonDegenerate => (0..ell as u32).map(|i| 64i64.pow(i)).collect(),
        Variant::Degenerate => (0..ell as i64).map(|i| 100 * i).collect(),
    };
    Specialization::from_ints(variant, 2, &params).expect("valid parameters")
}

/// Seminormal data at rank `n` and `n - 1` with both transition matrices.
pub struct SeminormalData {
    pub current: Seminormal,
    pub previous: Seminormal,
    pub tm: TransitionMatrices,
    pub tm_previous: TransitionMatrices,
}

impl SeminormalData {
    pub fn build(setting: &Setting<BigRational>, n: usize, cap: usize) -> Result<Self, CellError> {
        let current = Seminormal::build(setting, n, cap)?;
        let previous = Seminormal::build(setting, n - 1, cap)?;
        let tm = transition_matrices(setting, &current)?;
        let tm_previous = transition_matrices(setting, &previous)?;
        Ok(SeminormalData { current, previous, tm, tm_previous })
    }
}

fn sp_of(setting: &Setting<BigRational>) -> Result<&Specialization, CellError> {
    setting.specialization().ok_or(CellError::NeedsSpecialization)
}

/// Idempotents, orthogonality with `γ_t` (or `r_t`), eigenvalues, traces,
/// `ε_n(f_st)` and the shape of the transition matrices.
pub fn verify_seminormal(setting: &Setting<BigRational>, data: &SeminormalData) -> Result<Report, CellError> {
    let start = Instant::now();
    let sp = sp_of(setting)?;
    let alg = setting.alg();
    let sn = &data.current;
    let n = sn.n;
    let pairs = &sn.murphy.pairs;
    let variant = setting.variant();
    let mut tally = Tally::default();

    let all_f: Vec<(&StdTableau, &Element<BigRational>)> =
        pairs.tableaux.iter().flatten().zip(sn.idempotents.iter().flatten()).collect();
    let mut total = Element::zero(n);
    for (_, f) in &all_f {
        total = &total + f;
    }
    tally.elements(setting, "sum of F_t", &total, &Element::one(n));
    let keys = alg.basis(n);
    let index = super::basis_index(alg, n);
    let idem_coords: Vec<(BigInt, Vec<BigInt>)> =
        all_f.iter().map(|(_, f)| integral(&super::coordinates(f, &index))).collect();
    let idem: Vec<Tally> = all_f
        .par_iter()
        .map(|(s, fs)| {
            let mut t = Tally::default();
            let left = left_action(alg, fs, &keys, &index);
            for ((u, fu), y) in all_f.iter().zip(&idem_coords) {
                let want = if s == u { (*fu).clone() } else { Element::zero(n) };
                t.elements(setting, format!("F_{s} F_{u}"), &act(&left, y, &keys, n), &want);
            }
            t
        })
        .collect();
    idem.into_iter().for_each(|t| tally.merge(t));

    let norms: Vec<BigRational> =
        (0..pairs.len()).map(|i| seminormal_norm(pairs.pair(i).1, sp)).collect::<Result<_, _>>()?;
    let f_coords: Vec<(BigInt, Vec<BigInt>)> = sn.f.iter().map(|f| integral(&super::coordinates(f, &index))).collect();
    let products: Vec<Tally> = (0..pairs.len())
        .into_par_iter()
        .map(|i| {
            let mut tally = Tally::default();
            let (s, t) = pairs.pair(i);
            let left = left_action(alg, &sn.f[i], &keys, &index);
            for (j, y) in f_coords.iter().enumerate() {
                let (u, v) = pairs.pair(j);
                let got = act(&left, y, &keys, n);
                let want = if t == u { sn.get(s, v).expect("same shape").scale(&norms[i]) } else { Element::zero(n) };
                tally.record(got == want, || {
                    Failure::at(s, t, setting.show_element(&want), setting.show_element(&got))
                        .with_case(format!("f_st f_uv with u={u}, v={v}"))
                });
            }
            for k in 1..=n {
                let lk = alg.l(k, n).expect("in range");
                let rs = sp.eval(&s.residue(k, variant).expect("in range")).expect("specialized");
                let rt = sp.eval(&t.residue(k, variant).expect("in range")).expect("specialized");
                let left = alg.mul(&lk, &sn.f[i]).expect("same rank");
                let right = alg.mul(&sn.f[i], &lk).expect("same rank");
                let (wl, wr) = (sn.f[i].scale(&rs), sn.f[i].scale(&rt));
                tally.record(left == wl, || {
                    Failure::at(s, t, setting.show_element(&wl), setting.show_element(&left))
                        .with_case(format!("L{k} f_st"))
                });
                tally.record(right == wr, || {
                    Failure::at(s, t, setting.show_element(&wr), setting.show_element(&right))
                        .with_case(format!("f_st L{k}"))
                });
            }
            tally
        })
        .collect();
    products.into_iter().for_each(|t| tally.merge(t));

    for (i, f) in sn.f.iter().enumerate() {
        let (s, t) = pairs.pair(i);
        let got = alg.tau_direct(f);
        let want = if s == t { seminormal_trace_coeff(t, sp)? } else { BigRational::zero() };
        tally.record(got == want, || Failure::at(s, t, want.to_string(), got.to_string()).with_case("trace of f_st"));

        let got = alg.epsilon(f)?;
        let want = if s.k_of() == t.k_of() {
            let c = seminormal_last_coeff(t, sp)?;
            data.previous.get(&s.restrict(n - 1), &t.restrict(n - 1)).expect("standard").scale(&c)
        } else {
            Element::zero(n - 1)
        };
        tally.record(got == want, || {
            Failure::at(s, t, setting.show_element(&want), setting.show_element(&got)).with_case("epsilon of f_st")
        });
    }

    let (a, b) = (&data.tm.a, &data.tm.b);
    tally.record(a.mul(b).is_identity(), || {
        Failure::general("transition matrices a·b", "identity".to_string(), "not identity".to_string())
    });
    for (name, m) in [("a", a), ("b", b)] {
        for j in 0..pairs.len() {
            let (s, t) = pairs.pair(j);
            for i in 0..pairs.len() {
                let x = m.get(i, j);
                let (u, v) = pairs.pair(i);
                if i == j {
                    tally.record(x.is_one(), || {
                        Failure::at(s, t, "1".to_string(), x.to_string()).with_case(format!("{name} diagonal"))
                    });
                } else if !x.is_zero() {
                    let ok = dominates_pair(u, v, s, t)?;
                    tally.record(ok, || {
                        Failure::at(s, t, "0".to_string(), x.to_string())
                            .with_case(format!("{name} entry at ({u}, {v}) outside dominance"))
                    });
                }
            }
        }
    }
    Ok(Report::finish("seminormal", setting, n, tally, start))
}

/// The two displayed expressions for the last-box coefficient agree on every
/// tableau of size `n`.
/// Left multiplication by `x` on the normal-form basis, as integer columns
/// over a common denominator.
fn left_action(
    alg: &Algebra<BigRational>,
    x: &Element<BigRational>,
    keys: &[Key],
    index: &HashMap<Key, usize>,
) -> (BigInt, Vec<BigInt>) {
    let cols: Vec<BigRational> = keys
        .iter()
        .flat_map(|k| {
            let e = Element::from_key(k.clone(), BigRational::one());
            super::coordinates(&alg.mul(x, &e).expect("same rank"), index)
        })
        .collect();
    integral(&cols)
}

/// `x y` from the left action of `x` and the coordinates of `y`.
fn act(left: &(BigInt, Vec<BigInt>), y: &(BigInt, Vec<BigInt>), keys: &[Key], n: usize) -> Element<BigRational> {
    let mut acc = vec![BigInt::zero(); keys.len()];
    for (c, col) in y.1.iter().zip(left.1.chunks(keys.len())) {
        if c.is_zero() {
            continue;
        }
        for (a, z) in acc.iter_mut().zip(col) {
            if !z.is_zero() {
                *a += c * z;
            }
        }
    }
    let den = &left.0 * &y.0;
    Element::from_terms(n, keys.iter().cloned().zip(acc.into_iter().map(|a| BigRational::new(a, den.clone()))))
}

/// `v = ints / den` with `den` the least common denominator.
fn integral(v: &[BigRational]) -> (BigInt, Vec<BigInt>) {
    let den = v.iter().fold(BigInt::one(), |d, x| d.lcm(x.denom()));
    let ints = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (den, ints)
}

pub fn verify_coefficient_forms(sp: &Specialization, n: usize) -> Result<Report, CellError> {
    let start = Instant::now();
    let setting = Setting::specialized(sp.clone());
    let mut tally = Tally::default();
    for shape in enum_multipartitions(n, sp.ell()) {
        for t in enum_std_tableaux(&shape) {
            let (x, y) = last_box_coeff_forms(&t, sp)?;
            tally.record(x == y, || Failure::at(&t, &t, x.to_string(), y.to_string()));
        }
    }
    Ok(Report::finish("coefficients", &setting, n, tally, start))
}

/// Scalar `E_u` with `ε_n(m_uv) = E_u m_{u↓v↓}`.
fn eps_value(sp: &Specialization, u: &StdTableau) -> Result<BigRational, CellError> {
    Ok(sp.eval(&eps_murphy_coeff(u, sp.variant()))?)
}

/// The transition-matrix identities obtained by applying `ε_n` and `τ` to
/// both expansions, labelled `eps-a`, `eps-b` and `trace`.
pub fn verify_corollaries(setting: &Setting<BigRational>, data: &SeminormalData) -> Result<Report, CellError> {
    let start = Instant::now();
    let sp = sp_of(setting)?;
    let n = data.current.n;
    let pairs = &data.current.murphy.pairs;
    let lower = &data.previous.murphy.pairs;
    let (a, b) = (&data.tm.a, &data.tm.b);
    let (a_prev, b_prev) = (&data.tm_previous.a, &data.tm_previous.b);
    let mut tally = Tally::default();

    let eps: Vec<BigRational> = (0..pairs.len()).map(|i| eps_value(sp, pairs.pair(i).0)).collect::<Result<_, _>>()?;
    let last: Vec<BigRational> =
        (0..pairs.len()).map(|i| seminormal_last_coeff(pairs.pair(i).1, sp)).collect::<Result<_, _>>()?;
    let restricted: Vec<Option<usize>> = (0..pairs.len())
        .map(|i| {
            let (u, v) = pairs.pair(i);
            lower.index_of(&u.restrict(n - 1), &v.restrict(n - 1))
        })
        .collect();
    let above: Vec<Vec<usize>> = (0..pairs.len())
        .map(|j| {
            let (s, t) = pairs.pair(j);
            (0..pairs.len())
                .filter(|&i| i != j && dominates_pair(pairs.pair(i).0, pairs.pair(i).1, s, t).unwrap_or(false))
                .collect()
        })
        .collect();

    for j in 0..pairs.len() {
        let (s, t) = pairs.pair(j);
        let (sd, td) = (s.restrict(n - 1), t.restrict(n - 1));
        let same = s.k_of() == t.k_of();
        let below: Vec<usize> = (0..lower.len())
            .filter(|&p| {
                let (x, y) = lower.pair(p);
                (x, y) != (&sd, &td) && dominates_pair(x, y, &sd, &td).unwrap_or(false)
            })
            .collect();
        let e_t = eps[j].clone();
        let c_tn = last[j].clone();
        let sums = |target: usize, m: &RatMatrix, weight: &[BigRational]| -> BigRational {
            above[j]
                .iter()
                .filter(|&&i| restricted[i] == Some(target))
                .fold(BigRational::zero(), |acc, &i| acc + m.get(i, j) * &weight[i])
        };
        if same {
            let own = restricted[j].expect("same last node");
            let got = &e_t + sums(own, a, &eps);
            tally.record(got == c_tn, || {
                Failure::at(s, t, c_tn.to_string(), got.to_string()).with_case("eps-a leading")
            });
            let got = &c_tn + sums(own, b, &last);
            tally.record(got == e_t, || Failure::at(s, t, e_t.to_string(), got.to_string()).with_case("eps-b leading"));
        }
        for &p in &below {
            let (x, y) = lower.pair(p);
            let own = lower.index_of(&sd, &td);
            let (want_a, want_b) = match (same, own) {
                (true, Some(o)) => (&c_tn * a_prev.get(p, o), &e_t * b_prev.get(p, o)),
                _ => (BigRational::zero(), BigRational::zero()),
            };
            let got = sums(p, a, &eps);
            tally.record(got == want_a, || {
                Failure::at(s, t, want_a.to_string(), got.to_string()).with_case(format!("eps-a at ({x}, {y})"))
            });
            let got = sums(p, b, &last);
            tally.record(got == want_b, || {
                Failure::at(s, t, want_b.to_string(), got.to_string()).with_case(format!("eps-b at ({x}, {y})"))
            });
        }

        let diag: Vec<usize> = above[j].iter().copied().filter(|&i| pairs.pair(i).0 == pairs.pair(i).1).collect();
        let trace_m = |i: usize| -> Result<BigRational, CellError> {
            let (u, v) = pairs.pair(i);
            Ok(sp.eval(&trace_formula(u, v, sp.variant()))?)
        };
        let trace_f = |i: usize| -> Result<BigRational, CellError> {
            let (u, v) = pairs.pair(i);
            Ok(if u == v { seminormal_trace_coeff(u, sp)? } else { BigRational::zero() })
        };
        let mut got = trace_m(j)?;
        for &i in &diag {
            got += a.get(i, j) * trace_m(i)?;
        }
        let want = trace_f(j)?;
        tally.record(got == want, || Failure::at(s, t, want.to_string(), got.to_string()).with_case("trace a"));
        let mut got = trace_f(j)?;
        for &i in &diag {
            got += b.get(i, j) * trace_f(i)?;
        }
        let want = trace_m(j)?;
        tally.record(got == want, || Failure::at(s, t, want.to_string(), got.to_string()).with_case("trace b"));
    }
    Ok(Report::finish("corollaries", setting, n, tally, start))
}
