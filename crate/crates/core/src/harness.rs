//! Batch verification runs: configuration, check dispatch, rendering and the
//! on-disk cache of key products.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::BigRational;
use smallvec::SmallVec;
use thiserror::Error;

use crate::cellular::{
    algebra_dimension, default_specialization, trace_rows, verify_cellularity, verify_coefficient_forms,
    verify_corollaries, verify_eps_murphy, verify_mackey, verify_relations, verify_seminormal, verify_tau_equivalence,
    verify_theorem1, verify_theorem2, CellError, MurphyBasis, Report, SeminormalData, Setting, TraceRow,
};
use crate::engine::Key;
use crate::scalars::{is_separated, Coeff, Specialization, Variant};
use crate::symgrp::Perm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Relations,
    Mackey,
    TauEquiv,
    Theorem1,
    Theorem2,
    EpsMurphy,
    Cellular,
    Seminormal,
    Corollaries,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Relations,
        Check::Mackey,
        Check::TauEquiv,
        Check::Theorem1,
        Check::Theorem2,
        Check::EpsMurphy,
        Check::Cellular,
        Check::Seminormal,
        Check::Corollaries,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Relations => "relations",
            Check::Mackey => "mackey",
            Check::TauEquiv => "tau-equiv",
            Check::Theorem1 => "theorem1",
            Check::Theorem2 => "theorem2",
            Check::EpsMurphy => "eps-murphy",
            Check::Cellular => "cellular",
            Check::Seminormal => "seminormal",
            Check::Corollaries => "corollaries",
        }
    }

    fn needs_specialization(self) -> bool {
        matches!(self, Check::Seminormal | Check::Corollaries)
    }

    fn applies_to(self, variant: Variant) -> bool {
        match self {
            Check::Theorem1 => variant == Variant::NonDegenerate,
            Check::Theorem2 => variant == Variant::Degenerate,
            _ => true,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| HarnessError::Usage(format!("unknown check `{s}`")))
    }
}

/// Requested checks; `All` expands to those applicable to the run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    Only(Vec<Check>),
}

impl FromStr for Selection {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
        if parts.contains(&"all") {
            return Ok(Selection::All);
        }
        let mut checks = parts.into_iter().map(Check::from_str).collect::<Result<Vec<_>, _>>()?;
        checks.sort();
        checks.dedup();
        Ok(Selection::Only(checks))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Symbolic,
    Specialized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error("cache: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub variant: Variant,
    pub ell: usize,
    pub sizes: Vec<usize>,
    pub mode: Mode,
    pub specialization: Option<Specialization>,
    pub selection: Selection,
    pub cap: usize,
    pub threads: Option<usize>,
    pub seed: u64,
    /// Random pairs per size for the trace symmetry check.
    pub random_pairs: usize,
    pub timing: bool,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(variant: Variant, ell: usize, sizes: Vec<usize>) -> Self {
        RunConfig {
            variant,
            ell,
            sizes,
            mode: Mode::Symbolic,
            specialization: None,
            selection: Selection::All,
            cap: 50_000,
            threads: None,
            seed: 0,
            random_pairs: 100,
            timing: true,
            cache_dir: None,
        }
    }

    pub fn specialized(mut self, sp: Specialization) -> Self {
        self.mode = Mode::Specialized;
        self.specialization = Some(sp);
        self
    }

    /// The concrete checks of this run, after validation.
    pub fn checks(&self) -> Result<Vec<Check>, HarnessError> {
        self.validate()?;
        Ok(match &self.selection {
            Selection::All => Check::ALL
                .into_iter()
                .filter(|c| c.applies_to(self.variant))
                .filter(|c| self.mode == Mode::Specialized || !c.needs_specialization())
                .collect(),
            Selection::Only(cs) => cs.clone(),
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let usage = |m: String| Err(HarnessError::Usage(m));
        if self.ell == 0 {
            return usage("ell must be at least 1".into());
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return usage("need at least one size n >= 1".into());
        }
        if self.threads == Some(0) {
            return usage("parallelism must be at least 1".into());
        }
        for &n in &self.sizes {
            let dim = algebra_dimension(n, self.ell);
            if dim > self.cap {
                return usage(format!("dimension {dim} at n={n} exceeds the size cap {}", self.cap));
            }
        }
        match (self.mode, &self.specialization) {
            (Mode::Specialized, None) => return usage("specialized mode needs parameter values".into()),
            (Mode::Symbolic, Some(_)) => return usage("parameter values given in symbolic mode".into()),
            (Mode::Specialized, Some(sp)) => {
                if sp.variant() != self.variant || sp.ell() != self.ell {
                    return usage(format!(
                        "specialization {sp} does not match the {} algebra with ell={}",
                        self.variant, self.ell
                    ));
                }
            }
            (Mode::Symbolic, None) => {}
        }
        if let Selection::Only(cs) = &self.selection {
            for c in cs {
                if !c.applies_to(self.variant) {
                    return usage(format!("check `{c}` does not apply to the {} algebra", self.variant));
                }
                if c.needs_specialization() {
                    let Some(sp) = &self.specialization else {
                        return usage(format!("check `{c}` needs specialized mode"));
                    };
                    if let Some(&n) = self.sizes.iter().find(|&&n| !is_separated(sp, n)) {
                        return usage(format!("specialization {sp} is not separated at n={n}"));
                    }
                }
            }
        } else if let Some(sp) = &self.specialization {
            if let Some(&n) = self.sizes.iter().find(|&&n| !is_separated(sp, n)) {
                return usage(format!("specialization {sp} is not separated at n={n}"));
            }
        }
        Ok(())
    }
}

fn sorted(mut reports: Vec<Report>, timing: bool) -> Vec<Report> {
    if !timing {
        for r in &mut reports {
            r.elapsed_ms = None;
        }
    }
    reports.sort_by(|a, b| (a.n, &a.check).cmp(&(b.n, &b.check)));
    reports
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| HarnessError::Usage(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs every requested check for every size.
pub fn run(config: &RunConfig) -> Result<Vec<Report>, HarnessError> {
    let checks = config.checks()?;
    let reports = in_pool(config.threads, || match &config.specialization {
        None => {
            let setting = Setting::symbolic(config.variant, config.ell);
            run_in(config, &checks, &setting, None)
        }
        Some(sp) => {
            let setting = Setting::specialized(sp.clone());
            run_in(config, &checks, &setting, Some(&setting))
        }
    })??;
    Ok(sorted(reports, config.timing))
}

fn run_in<C: Coeff>(
    config: &RunConfig,
    checks: &[Check],
    setting: &Setting<C>,
    specialized: Option<&Setting<BigRational>>,
) -> Result<Vec<Report>, HarnessError> {
    let cache = config.cache_dir.as_deref().map(|d| cache_path(d, setting));
    if let Some(path) = &cache {
        load_cache(path, setting);
    }
    let fallback;
    let point = match specialized {
        Some(s) => s,
        None => {
            fallback = Setting::specialized(default_specialization(config.variant, config.ell));
            &fallback
        }
    };
    let mut reports = Vec::new();
    for &n in &config.sizes {
        let needs_basis = checks.iter().any(|c| matches!(c, Check::Theorem1 | Check::Theorem2 | Check::EpsMurphy));
        let basis = if needs_basis { Some(MurphyBasis::build(setting.alg(), n, config.cap)?) } else { None };
        let seminormal = if checks.iter().any(|c| c.needs_specialization()) {
            Some(SeminormalData::build(point, n, config.cap)?)
        } else {
            None
        };
        for &check in checks {
            match check {
                Check::Relations => reports.push(verify_relations(setting, n)?),
                Check::Mackey => reports.push(verify_mackey(setting, n)?),
                Check::TauEquiv => reports.push(verify_tau_equivalence(
                    setting,
                    n,
                    config.seed.wrapping_add(n as u64),
                    config.random_pairs,
                )?),
                Check::Theorem1 => reports.push(verify_theorem1(setting, basis.as_ref().expect("built"))?),
                Check::Theorem2 => reports.push(verify_theorem2(setting, basis.as_ref().expect("built"))?),
                Check::EpsMurphy => {
                    let lower = MurphyBasis::build(setting.alg(), n - 1, config.cap)?;
                    reports.push(verify_eps_murphy(setting, basis.as_ref().expect("built"), &lower)?);
                }
                Check::Cellular => {
                    let b = MurphyBasis::build(point.alg(), n, config.cap)?;
                    let mut r = verify_cellularity(point, &b)?;
                    if specialized.is_none() {
                        r.specialization = format!("symbolic, checked at {}", point.describe());
                    }
                    reports.push(r);
                }
                Check::Seminormal => {
                    reports.push(verify_seminormal(point, seminormal.as_ref().expect("built"))?);
                    reports.push(verify_coefficient_forms(point.specialization().expect("specialized"), n)?);
                }
                Check::Corollaries => reports.push(verify_corollaries(point, seminormal.as_ref().expect("built"))?),
            }
        }
    }
    if let Some(path) = &cache {
        save_cache(path, setting)?;
    }
    Ok(reports)
}

/// Trace table rows for every size, in pair order.
pub fn table(config: &RunConfig) -> Result<Vec<TraceRow>, HarnessError> {
    config.validate()?;
    if config.selection == Selection::Only(Vec::new()) {
        return Ok(Vec::new());
    }
    fn rows<C: Coeff>(config: &RunConfig, setting: &Setting<C>) -> Result<Vec<TraceRow>, HarnessError> {
        let mut out = Vec::new();
        for &n in &config.sizes {
            let basis = MurphyBasis::build(setting.alg(), n, config.cap)?;
            out.extend(trace_rows(setting, &basis)?);
        }
        Ok(out)
    }
    in_pool(config.threads, || match &config.specialization {
        None => rows(config, &Setting::symbolic(config.variant, config.ell)),
        Some(sp) => rows(config, &Setting::specialized(sp.clone())),
    })?
}

pub fn render_table(rows: &[TraceRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["lambda", "s", "t", "tau_engine", "tau_formula", "equal"]).expect("in memory");
    for r in rows {
        w.serialize(r).expect("in memory");
    }
    String::from_utf8(w.into_inner().expect("in memory")).expect("utf-8")
}

pub fn render_reports(reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "check",
                "variant",
                "ell",
                "n",
                "specialization",
                "status",
                "checked",
                "failures",
                "elapsed_ms",
            ])
            .expect("in memory");
            for r in reports {
                w.write_record([
                    r.check.clone(),
                    r.variant.to_string(),
                    r.ell.to_string(),
                    r.n.to_string(),
                    r.specialization.clone(),
                    if r.passed() { "pass" } else { "fail" }.to_string(),
                    r.checked.to_string(),
                    r.failures.len().to_string(),
                    r.elapsed_ms.map(|e| e.to_string()).unwrap_or_default(),
                ])
                .expect("in memory");
            }
            String::from_utf8(w.into_inner().expect("in memory")).expect("utf-8")
        }
        Format::Text => {
            let mut out = String::new();
            for r in reports {
                out.push_str(&r.summary());
                if let Some(ms) = r.elapsed_ms {
                    out.push_str(&format!(" in {ms} ms"));
                }
                out.push('\n');
                for f in &r.failures {
                    let case = f.case.as_deref().map(|c| format!(" {c}:")).unwrap_or_default();
                    out.push_str(&format!(
                        "  {}{} s={} t={} expected {} got {}\n",
                        f.lambda, case, f.s, f.t, f.expected, f.got
                    ));
                }
            }
            out
        }
    }
}

const CACHE_MAGIC: &[u8; 8] = b"HECKEKEY";
pub const CACHE_VERSION: u32 = 1;

fn cache_path<C: Coeff>(dir: &Path, setting: &Setting<C>) -> PathBuf {
    let tag: String =
        setting.describe().chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
    dir.join(format!("keys-{}-ell{}-{}.bin", setting.variant(), setting.ell(), tag))
}

fn put_u32(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u32).to_le_bytes());
}

fn put_key(out: &mut Vec<u8>, k: &Key) {
    out.push(k.c.len() as u8);
    out.extend_from_slice(&k.c);
    out.extend_from_slice(k.w.as_slice());
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Option<&[u8]> {
        if self.0.len() < n {
            return None;
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Some(head)
    }

    fn u32(&mut self) -> Option<usize> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?) as usize)
    }

    fn key(&mut self) -> Option<Key> {
        let n = *self.take(1)?.first()? as usize;
        let c = SmallVec::from_slice(self.take(n)?);
        let w: Vec<usize> = self.take(n)?.iter().map(|&x| x as usize + 1).collect();
        Some(Key { c, w: Perm::from_one_line(&w).ok()? })
    }
}

/// Serializes the key-product cache; coefficients are stored as text.
pub fn encode_cache<C: Coeff>(setting: &Setting<C>) -> Vec<u8> {
    let table = setting.alg().key_table();
    let mut out = Vec::new();
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    put_u32(&mut out, table.len());
    for (a, b, terms) in &table {
        put_key(&mut out, a);
        put_key(&mut out, b);
        put_u32(&mut out, terms.len());
        for (k, c) in terms {
            put_key(&mut out, k);
            let s = c.format_with(setting.names());
            put_u32(&mut out, s.len());
            out.extend_from_slice(s.as_bytes());
        }
    }
    out
}

/// Loads a cache produced by [`encode_cache`]; `None` on a version or
/// format mismatch.
#[allow(clippy::type_complexity)]
pub fn decode_cache<C: Coeff>(bytes: &[u8], names: &[String]) -> Option<Vec<(Key, Key, Vec<(Key, C)>)>> {
    let mut cur = Cursor(bytes);
    if cur.take(8)? != CACHE_MAGIC || cur.u32()? != CACHE_VERSION as usize {
        return None;
    }
    let count = cur.u32()?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (a, b) = (cur.key()?, cur.key()?);
        let m = cur.u32()?;
        let mut terms = Vec::with_capacity(m);
        for _ in 0..m {
            let k = cur.key()?;
            let len = cur.u32()?;
            let s = std::str::from_utf8(cur.take(len)?).ok()?;
            terms.push((k, C::parse_with(s, names).ok()?));
        }
        out.push((a, b, terms));
    }
    cur.0.is_empty().then_some(out)
}

fn load_cache<C: Coeff>(path: &Path, setting: &Setting<C>) {
    let mut bytes = Vec::new();
    let Ok(mut f) = fs::File::open(path) else { return };
    if f.read_to_end(&mut bytes).is_err() {
        return;
    }
    if let Some(entries) = decode_cache::<C>(&bytes, setting.names()) {
        setting.alg().preload_key_table(entries);
    }
}

fn save_cache<C: Coeff>(path: &Path, setting: &Setting<C>) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::File::create(&tmp)?.write_all(&encode_cache(setting))?;
    fs::rename(tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Poly;

    fn usage_err(r: Result<Vec<Check>, HarnessError>) -> bool {
        matches!(r, Err(HarnessError::Usage(_)))
    }

    #[test]
    fn selection_parsing() {
        assert_eq!("all".parse::<Selection>().unwrap(), Selection::All);
        assert_eq!("theorem1, all".parse::<Selection>().unwrap(), Selection::All);
        assert_eq!(
            "mackey,relations,mackey".parse::<Selection>().unwrap(),
            Selection::Only(vec![Check::Relations, Check::Mackey])
        );
        assert_eq!("".parse::<Selection>().unwrap(), Selection::Only(vec![]));
        assert!("relation".parse::<Selection>().is_err());
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
    }

    #[test]
    fn all_expands_by_variant_and_mode() {
        let cfg = RunConfig::new(Variant::NonDegenerate, 2, vec![2]);
        let checks = cfg.checks().unwrap();
        assert!(checks.contains(&Check::Theorem1) && !checks.contains(&Check::Theorem2));
        assert!(!checks.contains(&Check::Seminormal) && checks.contains(&Check::Cellular));
        let sp = Specialization::from_ints(Variant::Degenerate, 1, &[0, 100]).unwrap();
        let checks = RunConfig::new(Variant::Degenerate, 2, vec![2]).specialized(sp).checks().unwrap();
        assert!(checks.contains(&Check::Theorem2) && checks.contains(&Check::Corollaries));
        assert_eq!(checks.len(), 8);
    }

    #[test]
    fn invalid_configs() {
        let base = RunConfig::new(Variant::NonDegenerate, 2, vec![3]);
        let with = |sel: &str| RunConfig { selection: sel.parse().unwrap(), ..base.clone() };
        assert!(usage_err(with("seminormal").checks()));
        assert!(usage_err(with("corollaries").checks()));
        assert!(usage_err(with("theorem2").checks()));
        assert!(usage_err(RunConfig { cap: 47, ..base.clone() }.checks()));
        assert!(!usage_err(RunConfig { cap: 48, ..base.clone() }.checks()));
        assert!(usage_err(RunConfig { ell: 0, ..base.clone() }.checks()));
        assert!(usage_err(RunConfig { sizes: vec![], ..base.clone() }.checks()));
        assert!(usage_err(RunConfig { threads: Some(0), ..base.clone() }.checks()));
        assert!(usage_err(RunConfig { mode: Mode::Specialized, ..base.clone() }.checks()));
        let clash = Specialization::from_ints(Variant::NonDegenerate, 2, &[1, 2]).unwrap();
        assert!(usage_err(with("seminormal").specialized(clash).checks()));
        let wrong_level = Specialization::from_ints(Variant::NonDegenerate, 2, &[1]).unwrap();
        assert!(usage_err(base.clone().specialized(wrong_level).checks()));
    }

    #[test]
    fn run_is_sorted_and_untimed_on_request() {
        let mut cfg = RunConfig::new(Variant::Degenerate, 1, vec![3, 2]);
        cfg.selection = "theorem2,relations".parse().unwrap();
        cfg.timing = false;
        let reports = run(&cfg).unwrap();
        let keys: Vec<(usize, &str)> = reports.iter().map(|r| (r.n, r.check.as_str())).collect();
        assert_eq!(keys, [(2, "relations"), (2, "theorem2"), (3, "relations"), (3, "theorem2")]);
        assert!(reports.iter().all(|r| r.passed() && r.elapsed_ms.is_none()));
        assert_eq!(render_reports(&reports, Format::Json), render_reports(&run(&cfg).unwrap(), Format::Json));
        let csv = render_reports(&reports, Format::Csv);
        assert_eq!(csv.lines().count(), 5);
        let row = csv.lines().nth(1).unwrap();
        assert!(row.contains(",pass,") && row.ends_with(",0,"), "{row}");
    }

    #[test]
    fn table_rows_and_empty_table() {
        let mut cfg = RunConfig::new(Variant::NonDegenerate, 2, vec![2]);
        let rows = table(&cfg).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.equal));
        cfg.selection = Selection::Only(vec![]);
        assert_eq!(render_table(&table(&cfg).unwrap()), "lambda,s,t,tau_engine,tau_formula,equal\n");
    }

    #[test]
    fn cache_round_trip() {
        let setting = Setting::symbolic(Variant::NonDegenerate, 2);
        MurphyBasis::build(setting.alg(), 3, 100).unwrap();
        let bytes = encode_cache(&setting);
        let decoded = decode_cache::<Poly>(&bytes, setting.names()).unwrap();
        assert_eq!(decoded, setting.alg().key_table());
        assert!(!decoded.is_empty());

        let fresh = Setting::symbolic(Variant::NonDegenerate, 2);
        fresh.alg().preload_key_table(decoded);
        assert_eq!(encode_cache(&fresh), bytes);

        let mut stale = bytes.clone();
        stale[8] ^= 1;
        assert!(decode_cache::<Poly>(&stale, setting.names()).is_none());
        assert!(decode_cache::<Poly>(&bytes[..bytes.len() - 1], setting.names()).is_none());
        assert!(decode_cache::<Poly>(b"garbage", setting.names()).is_none());
    }

    #[test]
    fn cache_files_are_reused() {
        let dir = std::env::temp_dir().join(format!("hecke-harness-{}", std::process::id()));
        let mut cfg = RunConfig::new(Variant::Degenerate, 2, vec![3]);
        cfg.selection = "theorem2".parse().unwrap();
        cfg.timing = false;
        cfg.cache_dir = Some(dir.clone());
        let first = run(&cfg).unwrap();
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        let second = run(&cfg).unwrap();
        assert_eq!(render_reports(&first, Format::Json), render_reports(&second, Format::Json));
        fs::remove_dir_all(dir).unwrap();
    }
}
