//! Rank-by-rank classification: candidate generation (step I), critical
//! sublattices (step II), the result store, and appendix verification.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discriminant::{even_overlattices, l_invariant, DEFAULT_GROUP_CAP};
use crate::dsl::{self, Family, LatticeExpr, TableFile};
use crate::entropy::{self, Certificate, CriticalSublatticeResult, Status, Verdict};
use crate::error::{Error, Result};
use crate::isometry;
use crate::lattice::Lattice;
use crate::matrix::Int;
use crate::reference::{Membership, ReferenceSet, ReferenceTable};
use crate::roots;

/// Per-rank entry counts of the appendix list, ranks 3 to 18.
pub const APPENDIX_COUNTS: [usize; 16] = [18, 24, 27, 28, 21, 19, 15, 13, 6, 5, 3, 5, 3, 2, 2, 2];

#[derive(Clone, Debug)]
pub struct TableSet {
    pub dir: PathBuf,
    pub f_tables: BTreeMap<usize, ReferenceTable>,
    pub watson: Option<TableFile>,
    pub rootless: Option<TableFile>,
    pub appendix: TableFile,
}

fn read_table(path: &Path) -> Result<TableFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::TableMissing(format!("{}: {e}", path.display())))?;
    TableFile::parse(&text)
}

fn optional_table(path: &Path) -> Result<Option<TableFile>> {
    if path.exists() {
        read_table(path).map(Some)
    } else {
        Ok(None)
    }
}

impl TableSet {
    pub fn load(dir: &Path) -> Result<TableSet> {
        let appendix = read_table(&dir.join("appendix193.lat"))?;
        let mut f_tables = BTreeMap::new();
        let fdir = dir.join("f_tables");
        if fdir.is_dir() {
            for entry in fs::read_dir(&fdir)? {
                let path = entry?.path();
                let Some(n) = path
                    .file_name()
                    .and_then(|s| s.to_str())
                    .and_then(|s| s.strip_prefix("rank")?.strip_suffix(".lat")?.parse::<usize>().ok())
                else {
                    continue;
                };
                let table = ReferenceTable::from_table(&read_table(&path)?, Some(n))?;
                for l in &table.entries {
                    if !l.is_even() || !l.is_hyperbolic() {
                        return Err(Error::TableMissing(format!("{}: entry is not even hyperbolic", path.display())));
                    }
                }
                f_tables.insert(n, table);
            }
        }
        let watson = optional_table(&dir.join("watson.lat"))?;
        if let Some(w) = &watson {
            if let Some(e) = w.entries.iter().find(|e| !e.expr.eval().is_negative_definite()) {
                return Err(Error::TableMissing(format!("watson.lat line {}: entry is not definite", e.line)));
            }
        }
        let rootless = optional_table(&dir.join("rootless32.lat"))?;
        Ok(TableSet { dir: dir.to_path_buf(), f_tables, watson, rootless, appendix })
    }

    pub fn f_table(&self, n: usize) -> Result<ReferenceSet> {
        self.f_tables
            .get(&n)
            .map(|t| ReferenceSet::single(t.clone()))
            .ok_or_else(|| Error::TableMissing(format!("f_tables/rank{n}.lat")))
    }

    pub fn appendix_rank(&self, n: usize) -> Vec<Lattice> {
        self.appendix.with_rank(n).map(|e| e.expr.eval()).collect()
    }

    /// Every zero-entropy lattice of rank `n`: the appendix list (all of the
    /// non-2-reflective ones) together with the 2-reflective table.
    pub fn z_table(&self, n: usize, extra: &[Lattice]) -> Result<ReferenceSet> {
        let mut known = self.appendix_rank(n);
        known.extend(extra.iter().cloned());
        let mut set = self.f_table(n)?;
        set.parts.insert(0, ReferenceTable::complete(known));
        Ok(set)
    }
}

fn ade_components(r: usize) -> Vec<(Family, u32)> {
    let mut out: Vec<(Family, u32)> = (1..=r as u32).map(|k| (Family::A, k)).collect();
    out.extend((4..=r as u32).map(|k| (Family::D, k)));
    out.extend((6..=r.min(8) as u32).map(|k| (Family::E, k)));
    out
}

/// Multisets of ADE components of total rank `r`.
pub fn root_lattices(r: usize) -> Vec<LatticeExpr> {
    fn go(comps: &[(Family, u32)], start: usize, left: u32, cur: &mut Vec<(Family, u32)>, out: &mut Vec<LatticeExpr>) {
        if left == 0 {
            out.push(LatticeExpr::Sum(cur.iter().map(|&(f, k)| LatticeExpr::Named(f, k)).collect()).canonical());
            return;
        }
        for (i, &(f, k)) in comps.iter().enumerate().skip(start) {
            if k <= left {
                cur.push((f, k));
                go(comps, i, left - k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if r > 0 {
        go(&ade_components(r), 0, r as u32, &mut Vec::new(), &mut out);
    }
    out
}

/// A candidate `M` for `U ⊕ M`, with a printable description.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub expr: LatticeExpr,
    pub m: Lattice,
    pub origin: &'static str,
}

fn explicit(m: &Lattice) -> LatticeExpr {
    let g = m.gram();
    let entries = (0..g.len()).flat_map(|i| (0..=i).map(move |j| g[i][j].clone())).collect();
    if g.len() == 1 {
        LatticeExpr::RankOne(g[0][0].clone())
    } else {
        LatticeExpr::ExplicitGram(entries)
    }
}

fn with_u(e: &LatticeExpr) -> LatticeExpr {
    LatticeExpr::Sum(vec![LatticeExpr::Named(Family::U, 0), e.clone()]).canonical()
}

/// Keeps the first candidate of each genus of `M`.
fn dedup_genus(cands: Vec<Candidate>) -> Result<Vec<Candidate>> {
    let mut out: Vec<Candidate> = Vec::new();
    'next: for c in cands {
        for o in &out {
            if o.m.determinant() == c.m.determinant() && isometry::same_genus(&o.m, &c.m)? {
                continue 'next;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Even overlattices of the root lattices of rank `rank − 2`, up to isometry.
pub fn candidates_type_i(rank: usize, group_cap: usize) -> Result<(Vec<Candidate>, Vec<String>)> {
    let mut all = Vec::new();
    let mut skipped = Vec::new();
    for r in root_lattices(rank.saturating_sub(2)) {
        let base = r.eval();
        match even_overlattices(&base, group_cap) {
            Ok(ovs) => {
                for ov in ovs {
                    let expr = if ov.index == Int::from(1) { r.clone() } else { explicit(&ov.lattice) };
                    all.push(Candidate { expr, m: ov.lattice, origin: "type-i" });
                }
            }
            Err(Error::GroupTooLarge { .. }) => skipped.push(r.to_string()),
            Err(e) => return Err(e),
        }
    }
    let lattices: Vec<Lattice> = all.iter().map(|c| c.m.clone()).collect();
    let kept = isometry::dedup_definite(lattices);
    let mut out = Vec::new();
    for k in kept {
        if let Some(pos) = all.iter().position(|c| c.m == k) {
            out.push(all.swap_remove(pos));
        }
    }
    Ok((out, skipped))
}

/// Watson entries of rank `rank − 2`: odd ones twisted by 2, then those with
/// roots but without a finite-index root sublattice.
pub fn candidates_type_ii(rank: usize, watson: Option<&TableFile>) -> Result<Vec<Candidate>> {
    let w = watson.ok_or_else(|| Error::TableMissing("watson.lat".into()))?;
    let mut out = Vec::new();
    for e in w.with_rank(rank - 2) {
        let mut m = e.expr.eval();
        let mut expr = e.expr.clone();
        if !m.is_even() {
            m = m.twist(&Int::from(2))?;
            expr = LatticeExpr::Twist(Box::new(expr), Int::from(2)).canonical();
        }
        let rs = roots::roots(&m)?;
        if rs.rank() > 0 && !roots::has_finite_index_root_sublattice(&m)? {
            out.push(Candidate { expr, m, origin: "type-ii" });
        }
    }
    Ok(out)
}

/// A one-parameter family of rank-2 `M` with a root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankTwoFamily {
    /// `[−2, 1, −2a]`
    Triangular,
    /// `[−2, 0, −2a]`
    Diagonal,
}

impl RankTwoFamily {
    pub fn parse(shape: &str) -> Result<Self> {
        let s: String = shape.chars().filter(|c| !c.is_whitespace()).collect();
        match s.as_str() {
            "[-2,1,-2a]" => Ok(RankTwoFamily::Triangular),
            "[-2,0,-2a]" => Ok(RankTwoFamily::Diagonal),
            _ => Err(Error::UnsupportedFamily(shape.into())),
        }
    }

    pub fn member(self, a: i64) -> LatticeExpr {
        let off = if self == RankTwoFamily::Triangular { 1 } else { 0 };
        LatticeExpr::ExplicitGram(vec![Int::from(-2), Int::from(off), Int::from(-2 * a)])
    }
}

/// Parameters `a ≥ 2` of the family not excluded by an explicit corank-one
/// sublattice with `|det L| ≥ 2 |det L₁|`.
///
/// Triangular: `L₁ = ⟨e, α, 11f − β⟩` has det 242 for every `a` and lies
/// outside `z3`, so only `4a − 1 < 484` survives. Diagonal: `L₁ = U ⊕ ⟨β⟩`
/// has exactly half the determinant, so `U ⊕ [−2a]` must itself lie in `z3`.
pub fn bound_rank1_m_candidates(family: RankTwoFamily, z3: &ReferenceSet) -> Result<Vec<i64>> {
    let l_of = |a: i64| with_u(&family.member(a)).eval();
    match family {
        RankTwoFamily::Triangular => {
            let basis: Vec<Vec<Int>> = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 11, 0, -1]]
                .iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect();
            let d1 = l_of(2).restrict(&basis).determinant().abs();
            if l_of(3).restrict(&basis).determinant().abs() != d1 {
                return Err(Error::UnsupportedFamily("sublattice determinant depends on a".into()));
            }
            let l1 = l_of(2).restrict(&basis);
            if z3.membership(&l1)? != Membership::Absent {
                return Err(Error::CertificationFailed(format!("det-{d1} sublattice not excluded by the rank-3 table")));
            }
            // |det L| = 4a − 1 ≥ 2·d1 excludes a
            let limit = 2 * d1.to_i64().ok_or(Error::Overflow)?;
            Ok((2..).take_while(|a| 4 * a - 1 < limit).collect())
        }
        RankTwoFamily::Diagonal => {
            let mut out = Vec::new();
            for part in &z3.parts {
                if !part.complete {
                    continue;
                }
                for l in &part.entries {
                    let Ok(m) = entropy::split_form(l) else { continue };
                    if m.rank() == 1 {
                        let half: Int = -&m.gram()[0][0] / 2;
                        let a = half.to_i64().ok_or(Error::Overflow)?;
                        if a >= 2 && !out.contains(&a) {
                            out.push(a);
                        }
                    }
                }
            }
            out.sort_unstable();
            Ok(out)
        }
    }
}

fn rootless_candidates(rank: usize, rootless: Option<&TableFile>) -> Vec<Candidate> {
    rootless
        .map(|t| t.with_rank(rank - 2).map(|e| Candidate { expr: e.expr.clone(), m: e.expr.eval(), origin: "rootless" }).collect())
        .unwrap_or_default()
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    pub sublattice_trials: usize,
    pub genus_trials: usize,
    pub jobs: usize,
    pub group_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            sublattice_trials: entropy::DEFAULT_SUBLATTICE_TRIALS,
            genus_trials: entropy::DEFAULT_GENUS_TRIALS,
            jobs: 1,
            group_cap: DEFAULT_GROUP_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub rank: usize,
    pub expr: String,
    pub step: Step,
    pub verdict: Verdict,
    pub millis: u64,
}

impl ClassificationRecord {
    pub fn lattice(&self) -> Result<Lattice> {
        dsl::parse_lattice(&self.expr)
    }

    pub fn status_word(&self) -> &'static str {
        match self.verdict.status {
            Status::PositiveEntropy => "positive",
            Status::ZeroEntropy => "zero",
            Status::Inconclusive => "undecided",
        }
    }

    pub fn certificate_json(&self) -> String {
        serde_json::to_string(&self.verdict.certificate).expect("certificates serialize")
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.certificate_json().as_bytes()))
    }

    /// `rank TAB expr TAB verdict TAB test TAB seed TAB digest`
    pub fn store_line(&self) -> String {
        let seed = self.verdict.seed.map_or("-".to_string(), |s| s.to_string());
        format!("{}\t{}\t{}\t{}\t{}\t{}", self.rank, self.expr, self.status_word(), self.verdict.test, seed, self.digest())
    }
}

impl fmt::Display for ClassificationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.store_line())
    }
}

/// Runs the positivity tests in order, then the covering-radius test.
fn battery(l: &Lattice, n: usize, f: Option<&ReferenceSet>, z: Option<&ReferenceSet>, cfg: &RunConfig) -> Result<Verdict> {
    let mut reasons = Vec::new();
    let mut note = |v: Verdict| -> Option<Verdict> {
        if v.status == Status::PositiveEntropy {
            return Some(v);
        }
        if let Certificate::None { reason } = &v.certificate {
            reasons.push(format!("{}: {reason}", v.test));
        }
        None
    };
    if let Some(f) = f {
        if let Some(v) = note(entropy::overlattice_test(l, Some(f))?) {
            return Ok(v);
        }
    }
    if n >= 13 {
        if let Some(v) = note(entropy::det_cube_test(l)?) {
            return Ok(v);
        }
    }
    if let Some(z) = z {
        if let Some(v) = note(entropy::sublattice_test(l, Some(z), cfg.sublattice_trials, cfg.seed)?) {
            return Ok(v);
        }
    }
    if let Some(v) = note(entropy::genus_test(l, cfg.genus_trials, cfg.seed)?) {
        return Ok(v);
    }
    if let Some(v) = note(entropy::surjectivity_test(l)?) {
        return Ok(v);
    }
    let cov = entropy::covering_radius_test(l)?;
    if cov.status == Status::ZeroEntropy {
        return Ok(cov);
    }
    if let Certificate::None { reason } = &cov.certificate {
        reasons.push(format!("covering-radius: {reason}"));
    }
    Ok(Verdict::inconclusive("battery", Some(cfg.seed), reasons.join("; ")))
}

/// Order-preserving parallel map over `jobs` threads.
fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// All step-I candidates `M` of rank `n − 2`, deduplicated by genus.
fn is_complete(t: &TableFile) -> bool {
    t.directive("complete").is_some_and(|v| v.trim() == "true")
}

pub fn candidates(n: usize, tables: &TableSet, cfg: &RunConfig) -> Result<(Vec<Candidate>, Vec<String>)> {
    let (mut all, mut warnings) = candidates_type_i(n, cfg.group_cap)?;
    if !warnings.is_empty() {
        warnings = vec![format!("overlattice scan skipped for {}", warnings.join(", "))];
    }
    match n - 2 {
        1 => {}
        2 => {
            warnings.push("rank-2 one-class genera taken from explicit family bounds, not from a list".into());
            let z3 = tables.z_table(3, &[])?;
            for fam in [RankTwoFamily::Diagonal, RankTwoFamily::Triangular] {
                for a in bound_rank1_m_candidates(fam, &z3)? {
                    let expr = fam.member(a);
                    all.push(Candidate { m: expr.eval(), expr, origin: "type-ii" });
                }
            }
        }
        r if r <= 10 => {
            if tables.watson.as_ref().is_some_and(|w| !is_complete(w)) {
                warnings.push(format!("watson.lat is partial; type-ii candidates of rank {n} may be missing"));
            }
            all.extend(candidates_type_ii(n, tables.watson.as_ref())?)
        }
        _ => {}
    }
    if n - 2 >= 3 && tables.rootless.as_ref().is_some_and(|t| !is_complete(t)) {
        warnings.push(format!("rootless32.lat is partial; rootless candidates of rank {n} may be missing"));
    }
    all.extend(rootless_candidates(n, tables.rootless.as_ref()));
    Ok((dedup_genus(all)?, warnings))
}

/// Steps I and II at rank `n`. `prior` holds the stored records of rank `n − 1`.
pub fn run_rank(n: usize, tables: &TableSet, prior: &[ClassificationRecord], cfg: &RunConfig) -> Result<RunOutput> {
    if !(3..=18).contains(&n) {
        return Err(Error::UnsupportedFamily(format!("rank {n}")));
    }
    if n > 3 && !prior.iter().any(|r| r.rank == n - 1) {
        return Err(Error::MissingPriorRank(n - 1));
    }
    let f = tables.f_table(n)?;
    let z = if n > 3 {
        let extra: Vec<Lattice> = prior
            .iter()
            .filter(|r| r.rank == n - 1 && r.verdict.status == Status::ZeroEntropy)
            .map(|r| r.lattice())
            .collect::<Result<_>>()?;
        Some(tables.z_table(n - 1, &extra)?)
    } else {
        None
    };
    let (cands, warnings) = candidates(n, tables, cfg)?;
    let mut kept = Vec::new();
    for c in cands {
        let l = entropy::with_hyperbolic_plane(&c.m);
        if f.membership(&l)? != Membership::GenusMatch {
            kept.push((c, l));
        }
    }
    let step_one: Vec<Result<ClassificationRecord>> = par_map(&kept, cfg.jobs, |(c, l)| {
        let start = std::time::Instant::now();
        let verdict = battery(l, n, Some(&f), z.as_ref(), cfg)?;
        Ok(ClassificationRecord {
            rank: n,
            expr: dsl::print(&with_u(&c.expr)),
            step: Step::One,
            verdict,
            millis: start.elapsed().as_millis() as u64,
        })
    });
    let mut records = step_one.into_iter().collect::<Result<Vec<_>>>()?;
    let mut found: Vec<Lattice> = Vec::new();
    let mut step_two = Vec::new();
    for r in records.iter().filter(|r| r.verdict.status == Status::ZeroEntropy) {
        let start = std::time::Instant::now();
        let parent = r.lattice()?;
        let cr = entropy::critical_sublattice(&parent)?;
        if let CriticalSublatticeResult::Undecided { reason } = &cr {
            step_two.push(ClassificationRecord {
                rank: n,
                expr: r.expr.clone(),
                step: Step::Two,
                verdict: Verdict::inconclusive("critical", None, reason.clone()),
                millis: start.elapsed().as_millis() as u64,
            });
            continue;
        }
        for s in entropy::zero_entropy_sublattices(&parent, &cr)? {
            let sub = s.gram_in(&parent);
            if sub.gram() == parent.gram() || sub.determinant() == parent.determinant() {
                continue;
            }
            let mut dup = false;
            for o in &found {
                if o.determinant() == sub.determinant() && isometry::same_genus(o, &sub)? {
                    dup = true;
                    break;
                }
            }
            if dup {
                continue;
            }
            found.push(sub.clone());
            step_two.push(ClassificationRecord {
                rank: n,
                expr: dsl::print(&explicit(&sub)),
                step: Step::Two,
                verdict: Verdict {
                    status: Status::ZeroEntropy,
                    test: "critical".into(),
                    seed: None,
                    certificate: Certificate::Critical {
                        parent: parent.clone(),
                        basis: s.vectors.clone(),
                        parent_certificate: Box::new(r.verdict.certificate.clone()),
                    },
                },
                millis: start.elapsed().as_millis() as u64,
            });
        }
    }
    records.extend(step_two);
    Ok(RunOutput { records, warnings })
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<ClassificationRecord>,
    pub warnings: Vec<String>,
}

/// Line-oriented result store with a sibling certificate blob file.
pub struct ResultStore {
    pub path: PathBuf,
}

impl ResultStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        ResultStore { path: path.into() }
    }

    fn blob_path(&self) -> PathBuf {
        let mut p = self.path.clone().into_os_string();
        p.push(".certs");
        PathBuf::from(p)
    }

    fn records_path(&self) -> PathBuf {
        let mut p = self.path.clone().into_os_string();
        p.push(".json");
        PathBuf::from(p)
    }

    pub fn load(&self) -> Result<Vec<ClassificationRecord>> {
        if !self.records_path().exists() {
            return Ok(Vec::new());
        }
        let text = fs::read_to_string(self.records_path())?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| Error::Io(e.to_string())))
            .collect()
    }

    /// Replaces the records of the given rank; other ranks are kept. Each file
    /// is written to a temporary sibling and renamed into place.
    pub fn replace_rank(&self, rank: usize, new: &[ClassificationRecord]) -> Result<()> {
        let mut all: Vec<ClassificationRecord> = self.load()?.into_iter().filter(|r| r.rank != rank).collect();
        all.extend(new.iter().cloned());
        all.sort_by_key(|r| r.rank);
        let mut table = String::new();
        let mut json = String::new();
        let mut blobs: BTreeMap<String, String> = BTreeMap::new();
        for r in &all {
            table.push_str(&r.store_line());
            table.push('\n');
            let mut stable = r.clone();
            stable.millis = 0;
            json.push_str(&serde_json::to_string(&stable).map_err(|e| Error::Io(e.to_string()))?);
            json.push('\n');
            blobs.insert(r.digest(), r.certificate_json());
        }
        let blob_text: String = blobs.iter().map(|(d, c)| format!("{d}\t{c}\n")).collect();
        atomic_write(&self.path, &table)?;
        atomic_write(&self.records_path(), &json)?;
        atomic_write(&self.blob_path(), &blob_text)?;
        Ok(())
    }

    /// Certificate blobs keyed by digest.
    pub fn certificates(&self) -> Result<BTreeMap<String, Certificate>> {
        let p = self.blob_path();
        if !p.exists() {
            return Ok(BTreeMap::new());
        }
        let mut out = BTreeMap::new();
        for line in fs::read_to_string(p)?.lines() {
            let Some((d, c)) = line.split_once('\t') else { continue };
            out.insert(d.to_string(), serde_json::from_str(c).map_err(|e| Error::Io(e.to_string()))?);
        }
        Ok(out)
    }
}

fn atomic_write(path: &Path, text: &str) -> Result<()> {
    let mut tmp = path.to_path_buf().into_os_string();
    tmp.push(".tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Debug)]
pub struct AppendixOptions {
    pub run_tests: bool,
    pub sublattice_trials: usize,
    pub genus_trials: usize,
    pub seed: u64,
}

impl Default for AppendixOptions {
    fn default() -> Self {
        AppendixOptions {
            run_tests: false,
            sublattice_trials: entropy::DEFAULT_SUBLATTICE_TRIALS,
            genus_trials: entropy::DEFAULT_GENUS_TRIALS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AppendixEntry {
    pub rank: usize,
    pub expr: String,
    pub rk_plus_l: usize,
    /// Verdicts of the positivity tests, for split-form entries when requested.
    pub tests: Vec<Verdict>,
    pub covering: Option<Verdict>,
}

#[derive(Clone, Debug, Default)]
pub struct AppendixReport {
    pub entries: Vec<AppendixEntry>,
    pub counts: BTreeMap<usize, usize>,
    pub failures: Vec<String>,
}

impl AppendixReport {
    pub fn structural_passes(&self) -> usize {
        self.entries.len() - self.entries.iter().filter(|e| self.failures.iter().any(|f| f.starts_with(&e.expr))).count()
    }

    pub fn zero_certified(&self) -> usize {
        self.entries.iter().filter(|e| e.covering.as_ref().is_some_and(|v| v.status == Status::ZeroEntropy)).count()
    }
}

pub fn verify_appendix(tables: &TableSet, opts: &AppendixOptions) -> Result<AppendixReport> {
    let mut report = AppendixReport::default();
    for e in &tables.appendix.entries {
        let l = e.expr.eval();
        let expr = dsl::print(&e.expr);
        let rank = l.rank();
        *report.counts.entry(rank).or_default() += 1;
        if e.rank_header != Some(rank) {
            report.failures.push(format!("{expr}: listed under rank {:?}", e.rank_header));
        }
        if !l.is_even() {
            report.failures.push(format!("{expr}: not even"));
        }
        match l.signature() {
            Ok(s) if s.positives == 1 && s.negatives + 1 == rank => {}
            _ => report.failures.push(format!("{expr}: signature is not (1, {})", rank - 1)),
        }
        let rk_plus_l = rank + l_invariant(&l)?;
        if rk_plus_l > 22 {
            report.failures.push(format!("{expr}: rk + l = {rk_plus_l} > 22"));
        }
        let mut tests = Vec::new();
        let mut covering = None;
        if entropy::split_form(&l).is_ok() {
            covering = Some(entropy::covering_radius_test(&l)?);
            if opts.run_tests {
                if let Ok(f) = tables.f_table(rank) {
                    tests.push(entropy::overlattice_test(&l, Some(&f))?);
                }
                if rank >= 13 {
                    tests.push(entropy::det_cube_test(&l)?);
                }
                if rank > 3 {
                    let z = tables.z_table(rank - 1, &[])?;
                    tests.push(entropy::sublattice_test(&l, Some(&z), opts.sublattice_trials, opts.seed)?);
                }
                tests.push(entropy::genus_test(&l, opts.genus_trials, opts.seed)?);
                tests.push(entropy::surjectivity_test(&l)?);
                for v in &tests {
                    if v.status == Status::PositiveEntropy {
                        report.failures.push(format!("{expr}: {v}"));
                    }
                }
            }
        }
        report.entries.push(AppendixEntry { rank, expr, rk_plus_l, tests, covering });
    }
    for (i, &want) in APPENDIX_COUNTS.iter().enumerate() {
        let got = report.counts.get(&(i + 3)).copied().unwrap_or(0);
        if got != want {
            report.failures.push(format!("rank {}: {got} entries, expected {want}", i + 3));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables() -> TableSet {
        TableSet::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../tables")).unwrap()
    }

    #[test]
    fn root_lattice_counts() {
        let names = |r| root_lattices(r).iter().map(|e| e.to_string()).collect::<Vec<_>>();
        assert_eq!(names(1), vec!["A1"]);
        assert_eq!(names(2), vec!["A1^2", "A2"]);
        // A1^4, A1^2+A2, A1+A3, A2^2, A4, D4
        assert_eq!(names(4).len(), 6);
    }

    #[test]
    fn type_i_candidates() {
        let (c, _) = candidates_type_i(4, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(c.len(), 2);
        let (c, _) = candidates_type_i(6, DEFAULT_GROUP_CAP).unwrap();
        let d4 = dsl::parse_lattice("D4").unwrap();
        // D4 arises both directly and as an overlattice of A1^4; kept once
        let hits = c.iter().filter(|x| isometry::is_isometric_definite(&x.m, &d4).unwrap().is_some()).count();
        assert_eq!(hits, 1);
        assert!(c.iter().any(|x| x.expr.to_string() == "A1^4"));
    }

    #[test]
    fn type_ii_rank12() {
        let t = tables();
        let c = candidates_type_ii(12, t.watson.as_ref()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].expr.to_string(), "E8(3) + A2");
        assert!(matches!(candidates_type_ii(12, None), Err(Error::TableMissing(_))));
    }

    #[test]
    fn rank_two_bounds() {
        let t = tables();
        let z3 = t.z_table(3, &[]).unwrap();
        let tri = bound_rank1_m_candidates(RankTwoFamily::Triangular, &z3).unwrap();
        assert_eq!((tri.first(), tri.last(), tri.len()), (Some(&2), Some(&121), 120));
        let diag = bound_rank1_m_candidates(RankTwoFamily::Diagonal, &z3).unwrap();
        assert_eq!(diag, vec![2, 3, 4, 5, 7, 9, 13, 25]);
        assert!(matches!(RankTwoFamily::parse("[-4,1,-2a]"), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn rank4_candidate_count() {
        let t = tables();
        let cfg = RunConfig::default();
        let (c, _) = candidates(4, &t, &cfg).unwrap();
        let from_families = c.iter().filter(|x| x.origin == "type-ii").count();
        assert_eq!(from_families, 128);
    }

    #[test]
    fn rank3_run() {
        let t = tables();
        let out = run_rank(3, &t, &[], &RunConfig::default()).unwrap();
        let one: Vec<_> = out.records.iter().filter(|r| r.step == Step::One).collect();
        assert_eq!(one.len(), 8);
        assert!(one.iter().all(|r| r.verdict.status != Status::PositiveEntropy));
        for r in &out.records {
            assert!(r.verdict.verify(&r.lattice().unwrap(), None).unwrap(), "{r}");
        }
        assert!(matches!(run_rank(4, &t, &[], &RunConfig::default()), Err(Error::MissingPriorRank(3))));
    }

    #[test]
    fn store_round_trip() {
        let dir = std::env::temp_dir().join(format!("nslat-store-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let store = ResultStore::new(dir.join("results.tsv"));
        let t = tables();
        let out = run_rank(3, &t, &[], &RunConfig::default()).unwrap();
        store.replace_rank(3, &out.records).unwrap();
        let first = fs::read(dir.join("results.tsv")).unwrap();
        store.replace_rank(3, &out.records).unwrap();
        assert_eq!(first, fs::read(dir.join("results.tsv")).unwrap());
        let back = store.load().unwrap();
        assert_eq!(back.len(), out.records.len());
        let certs = store.certificates().unwrap();
        for r in &back {
            assert_eq!(certs[&r.digest()], r.verdict.certificate);
        }
        fs::remove_dir_all(dir).unwrap();
    }
}
