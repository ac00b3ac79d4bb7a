//! Ground truth and adversarial input supply: exhaustive enumeration at
//! desk scale, seeded instance generators, fuzz campaigns against the
//! solver, a search for sum-`n` tightness witnesses, and a brute-force probe
//! of the four-matching variant.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::components::block_instance;
use crate::error::{Error, Result};
use crate::instance::{validate_instance, Color, Edge, Instance, TargetTriple, Vertex};
use crate::matching::{verify, Matching};
use crate::solver::solve_with_stats;

/// Default brute-force size cap. Exhaustive enumeration branches on three
/// colors per A-vertex, so this keeps searches around `4^8` nodes.
pub const DEFAULT_CAP: usize = 8;

const GENERATION_BUDGET: usize = 100_000;

/// All matchings of exactly `size` edges, in depth-first order over
/// (A-vertex ascending; skip, then colors ascending).
pub fn enumerate_matchings(inst: &Instance, size: usize, cap: usize) -> Result<Vec<Matching>> {
    let n = inst.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut out = Vec::new();
    let mut cur = Matching::new(n);
    enumerate_rec(inst, 0, size, &mut cur, &mut out);
    Ok(out)
}

fn enumerate_rec(
    inst: &Instance,
    u: usize,
    size: usize,
    cur: &mut Matching,
    out: &mut Vec<Matching>,
) {
    let n = inst.n();
    let need = size - cur.size();
    if need > n - u {
        return; // not enough A-vertices left
    }
    if u == n {
        if need == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if n - u > need {
        enumerate_rec(inst, u + 1, size, cur, out); // skip this A-vertex
    }
    if need > 0 {
        for c in Color::ALL {
            let e = Edge::new(u as u32, c);
            if cur.insert(inst, e).is_ok() {
                enumerate_rec(inst, u + 1, size, cur, out);
                cur.remove(inst, e);
            }
        }
    }
}

/// Does some matching achieve exactly the target counts? Depth-first with
/// per-color remaining budgets; independent of the constructive solver.
pub fn exists_bruteforce(inst: &Instance, target: TargetTriple, cap: usize) -> Result<bool> {
    let n = inst.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut rem = target.0;
    let mut cur = Matching::new(n);
    Ok(exists_rec(inst, 0, &mut rem, &mut cur))
}

fn exists_rec(inst: &Instance, u: usize, rem: &mut [usize; 3], cur: &mut Matching) -> bool {
    let n = inst.n();
    let need: usize = rem.iter().sum();
    if need > n - u {
        return false;
    }
    if need == 0 {
        return true;
    }
    if n - u > need && exists_rec(inst, u + 1, rem, cur) {
        return true;
    }
    for c in Color::ALL {
        if rem[c.index()] == 0 {
            continue;
        }
        let e = Edge::new(u as u32, c);
        if cur.insert(inst, e).is_ok() {
            rem[c.index()] -= 1;
            let found = exists_rec(inst, u + 1, rem, cur);
            rem[c.index()] += 1;
            cur.remove(inst, e);
            if found {
                return true;
            }
        }
    }
    false
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut p: Vec<i64> = (0..n as i64).collect();
    p.shuffle(rng);
    p
}

fn discordant(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x != y)
}

/// A uniform-ish random instance from a seeded generator (ChaCha8 keyed by
/// `seed`): rejection-sample three pairwise discordant permutations. With
/// `connected`, additionally reject until the union graph is connected.
pub fn gen_random(n: usize, seed: u64, connected: bool) -> Result<Instance> {
    if n < 3 {
        return Err(Error::NTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    loop {
        attempts += 1;
        if attempts > GENERATION_BUDGET {
            return Err(Error::GenerationBudgetExceeded(attempts - 1));
        }
        let p0 = random_permutation(&mut rng, n);
        let p1 = random_permutation(&mut rng, n);
        if !discordant(&p0, &p1) {
            continue;
        }
        let p2 = random_permutation(&mut rng, n);
        if !discordant(&p0, &p2) || !discordant(&p1, &p2) {
            continue;
        }
        let inst = validate_instance(n, &[p0, p1, p2])?;
        if connected && crate::components::components(&inst).len() != 1 {
            continue;
        }
        return Ok(inst);
    }
}

/// Random four-matching instance, used by the four-color probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K4Instance {
    n: usize,
    perms: [Vec<u32>; 4],
}

impl K4Instance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn perm(&self, c: usize) -> &[u32] {
        &self.perms[c]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.perms.to_vec()
    }

    /// B-side partner of A-vertex `u` under matching `c` in `0..4`.
    pub fn partner(&self, c: usize, u: usize) -> usize {
        self.perms[c][u] as usize
    }
}

/// Validate four pairwise discordant permutations; `n >= 4` because a 3-set
/// admits only three pairwise discordant permutations.
pub fn validate_k4(n: usize, rows: &[Vec<i64>]) -> Result<K4Instance> {
    if n < 4 {
        return Err(Error::NTooSmall(n));
    }
    if rows.len() != 4 {
        return Err(Error::LengthMismatch {
            c: rows.len().min(4),
            expected: 4,
            got: rows.len(),
        });
    }
    let mut perms: [Vec<u32>; 4] = [vec![], vec![], vec![], vec![]];
    for (c, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::LengthMismatch {
                c,
                expected: n,
                got: row.len(),
            });
        }
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &x in row {
            if x < 0 || x >= n as i64 || seen[x as usize] {
                return Err(Error::NotABijection(c));
            }
            seen[x as usize] = true;
            out.push(x as u32);
        }
        perms[c] = out;
    }
    for c1 in 0..4 {
        for c2 in c1 + 1..4 {
            for u in 0..n {
                if perms[c1][u] == perms[c2][u] {
                    return Err(Error::MatchingsOverlap {
                        u: u as u32,
                        c1,
                        c2,
                    });
                }
            }
        }
    }
    Ok(K4Instance { n, perms })
}

pub fn gen_random_k4(n: usize, seed: u64) -> Result<K4Instance> {
    if n < 4 {
        return Err(Error::NTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    'outer: loop {
        attempts += 1;
        if attempts > GENERATION_BUDGET {
            return Err(Error::GenerationBudgetExceeded(attempts - 1));
        }
        let mut rows: Vec<Vec<i64>> = Vec::with_capacity(4);
        for _ in 0..4 {
            let p = random_permutation(&mut rng, n);
            if rows.iter().any(|q| !discordant(q, &p)) {
                continue 'outer;
            }
            rows.push(p);
        }
        return validate_k4(n, &rows);
    }
}

/// Brute force for the four-matching variant: does some matching use exactly
/// `target[c]` edges of each of the four matchings?
pub fn exists_bruteforce_k4(inst: &K4Instance, target: [usize; 4], cap: usize) -> Result<bool> {
    let n = inst.n();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let mut rem = target;
    let mut b_used = vec![false; n];
    Ok(exists_k4_rec(inst, 0, &mut rem, &mut b_used))
}

fn exists_k4_rec(inst: &K4Instance, u: usize, rem: &mut [usize; 4], b_used: &mut [bool]) -> bool {
    let n = inst.n();
    let need: usize = rem.iter().sum();
    if need > n - u {
        return false;
    }
    if need == 0 {
        return true;
    }
    if n - u > need && exists_k4_rec(inst, u + 1, rem, b_used) {
        return true;
    }
    for c in 0..4 {
        if rem[c] == 0 {
            continue;
        }
        let b = inst.partner(c, u);
        if b_used[b] {
            continue;
        }
        b_used[b] = true;
        rem[c] -= 1;
        let found = exists_k4_rec(inst, u + 1, rem, b_used);
        rem[c] += 1;
        b_used[b] = false;
        if found {
            return true;
        }
    }
    false
}

/// All triples of nonnegative integers summing to `total`, optionally
/// bounded above coordinate-wise.
pub fn triples_summing_to(total: usize, max_each: Option<usize>) -> Vec<TargetTriple> {
    let hi = max_each.unwrap_or(total);
    let mut out = Vec::new();
    for a1 in 0..=total.min(hi) {
        for a2 in 0..=(total - a1).min(hi) {
            let a3 = total - a1 - a2;
            if a3 <= hi {
                out.push(TargetTriple::new(a1, a2, a3));
            }
        }
    }
    out
}

/// How targets are chosen per fuzz trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetPolicy {
    /// All triples summing to `n - 1`.
    Exhaustive,
    /// A fixed number of uniformly sampled triples.
    Sampled(usize),
    /// Exhaustive for `n <= 6`, otherwise three sampled triples.
    Auto,
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub trials: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    pub targets: TargetPolicy,
    pub cap: usize,
    pub parallel: bool,
}

impl FuzzConfig {
    pub fn new(trials: usize, n_min: usize, n_max: usize, seed: u64) -> FuzzConfig {
        FuzzConfig {
            trials,
            n_min,
            n_max,
            seed,
            targets: TargetPolicy::Auto,
            cap: DEFAULT_CAP,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FuzzOutcome {
    Ok,
    SolveFailed(String),
    VerifyFailed(String),
    OracleMismatch,
}

impl FuzzOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, FuzzOutcome::Ok)
    }
}

impl std::fmt::Display for FuzzOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FuzzOutcome::Ok => write!(f, "ok"),
            FuzzOutcome::SolveFailed(e) => write!(f, "solve_failed:{e}"),
            FuzzOutcome::VerifyFailed(e) => write!(f, "verify_failed:{e}"),
            FuzzOutcome::OracleMismatch => write!(f, "oracle_mismatch"),
        }
    }
}

/// One line of the campaign report: everything needed to replay the case.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub blocks: usize,
    pub target: TargetTriple,
    pub outcome: FuzzOutcome,
    pub micros: u128,
    pub pipeline_steps: u64,
}

impl TrialRecord {
    pub fn line(&self) -> String {
        format!(
            "trial={} seed={} n={} blocks={} target={},{},{} outcome={} micros={} steps={}",
            self.trial,
            self.seed,
            self.n,
            self.blocks,
            self.target.0[0],
            self.target.0[1],
            self.target.0[2],
            self.outcome,
            self.micros,
            self.pipeline_steps
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct FuzzReport {
    pub records: Vec<TrialRecord>,
    pub trials: usize,
    pub cases: usize,
    pub failures: usize,
    pub oracle_checked: usize,
    pub oracle_mismatches: usize,
    pub max_pipeline_steps: u64,
}

#[derive(Debug, Clone)]
struct TrialPlan {
    trial: usize,
    seed: u64,
    n: usize,
    blocks: Vec<usize>,
    targets: Vec<TargetTriple>,
}

fn plan_trials(config: &FuzzConfig) -> Vec<TrialPlan> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut plans = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let n = rng.gen_range(config.n_min..=config.n_max);
        let seed = rng.gen::<u64>();
        // mix in genuinely disconnected instances via block splits
        let mut blocks = Vec::new();
        let mut left = n;
        if n >= 6 && rng.gen_bool(0.4) {
            while left >= 6 && rng.gen_bool(0.6) {
                let take = rng.gen_range(3..=left - 3);
                blocks.push(take);
                left -= take;
            }
        }
        blocks.push(left);
        let all = triples_summing_to(n - 1, None);
        let targets = match config.targets {
            TargetPolicy::Exhaustive => all,
            TargetPolicy::Sampled(k) => (0..k)
                .map(|_| all[rng.gen_range(0..all.len())])
                .collect(),
            TargetPolicy::Auto => {
                if n <= 6 {
                    all
                } else {
                    (0..3).map(|_| all[rng.gen_range(0..all.len())]).collect()
                }
            }
        };
        plans.push(TrialPlan {
            trial,
            seed,
            n,
            blocks,
            targets,
        });
    }
    plans
}

fn build_instance(plan: &TrialPlan) -> Result<Instance> {
    if plan.blocks.len() == 1 {
        gen_random(plan.n, plan.seed, false)
    } else {
        let mut parts = Vec::new();
        for (idx, &b) in plan.blocks.iter().enumerate() {
            parts.push(gen_random(b, plan.seed.wrapping_add(idx as u64 + 1), false)?);
        }
        Ok(block_instance(&parts))
    }
}

fn run_trial(plan: &TrialPlan, cap: usize) -> Vec<TrialRecord> {
    let inst = match build_instance(plan) {
        Ok(inst) => inst,
        Err(e) => {
            return vec![TrialRecord {
                trial: plan.trial,
                seed: plan.seed,
                n: plan.n,
                blocks: plan.blocks.len(),
                target: TargetTriple::new(0, 0, 0),
                outcome: FuzzOutcome::SolveFailed(format!("generation failed: {e}")),
                micros: 0,
                pipeline_steps: 0,
            }]
        }
    };
    let mut records = Vec::with_capacity(plan.targets.len());
    for &target in &plan.targets {
        let start = std::time::Instant::now();
        let mut steps = 0;
        let outcome = match solve_with_stats(&inst, target, &mut crate::trace::Tracer::none()) {
            Ok((m, stats)) => {
                steps = stats.pipeline_steps;
                let report = verify(&inst, &m, target);
                if !report.passed() {
                    FuzzOutcome::VerifyFailed(format!("{report:?}"))
                } else if inst.n() <= cap {
                    match exists_bruteforce(&inst, target, cap) {
                        Ok(true) => FuzzOutcome::Ok,
                        Ok(false) => FuzzOutcome::OracleMismatch,
                        Err(e) => FuzzOutcome::SolveFailed(format!("oracle error: {e}")),
                    }
                } else {
                    FuzzOutcome::Ok
                }
            }
            Err(e) => FuzzOutcome::SolveFailed(e.to_string()),
        };
        records.push(TrialRecord {
            trial: plan.trial,
            seed: plan.seed,
            n: plan.n,
            blocks: plan.blocks.len(),
            target,
            outcome,
            micros: start.elapsed().as_micros(),
            pipeline_steps: steps,
        });
    }
    records
}

/// Run a seeded campaign: generate, solve, verify, and cross-check against
/// brute force wherever the instance is small enough. Trials are planned
/// up front from the master seed, so reports are replayable; with
/// `parallel`, trials fan out across a worker pool and are aggregated in
/// seed order.
pub fn fuzz_campaign(config: &FuzzConfig) -> FuzzReport {
    let plans = plan_trials(config);
    let per_trial: Vec<Vec<TrialRecord>> = if config.parallel {
        plans.par_iter().map(|p| run_trial(p, config.cap)).collect()
    } else {
        plans.iter().map(|p| run_trial(p, config.cap)).collect()
    };
    let mut report = FuzzReport {
        trials: plans.len(),
        ..FuzzReport::default()
    };
    for records in per_trial {
        for r in records {
            report.cases += 1;
            match &r.outcome {
                FuzzOutcome::Ok => {}
                FuzzOutcome::OracleMismatch => {
                    report.failures += 1;
                    report.oracle_mismatches += 1;
                }
                _ => report.failures += 1,
            }
            if r.n <= config.cap {
                report.oracle_checked += 1;
            }
            report.max_pipeline_steps = report.max_pipeline_steps.max(r.pipeline_steps);
            report.records.push(r);
        }
    }
    report
}

/// A pair (instance, triple summing to `n`) with no matching achieving the
/// triple: evidence that the `n - 1` bound is tight.
#[derive(Debug, Clone)]
pub struct TightnessWitness {
    pub instance: Instance,
    pub target: TargetTriple,
}

/// Search small instances for tightness witnesses: triples summing to `n`
/// (each coordinate at most `n - 1`) that no matching achieves. Structured
/// families go first; random instances fill the rest of the budget.
pub fn search_tightness(n_max: usize, seed: u64, cap: usize) -> Result<Vec<TightnessWitness>> {
    if n_max > cap {
        return Err(Error::TooLarge { n: n_max, cap });
    }
    let mut witnesses = Vec::new();
    for n in 3..=n_max {
        let mut candidates: Vec<Instance> = vec![Instance::cyclic(n)];
        // instances whose first two matchings form short cycles
        if n % 2 == 0 {
            let pair_swap: Vec<i64> = (0..n as i64)
                .map(|u| if u % 2 == 0 { u + 1 } else { u - 1 })
                .collect();
            let id: Vec<i64> = (0..n as i64).collect();
            for shift in 2..n as i64 {
                let third: Vec<i64> = (0..n as i64).map(|u| (u + shift) % n as i64).collect();
                if let Ok(inst) = validate_instance(n, &[id.clone(), pair_swap.clone(), third]) {
                    candidates.push(inst);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n as u64));
        for _ in 0..4 {
            if let Ok(inst) = gen_random(n, rng.gen(), false) {
                candidates.push(inst);
            }
        }
        for inst in candidates {
            for target in triples_summing_to(n, Some(n - 1)) {
                if !exists_bruteforce(&inst, target, cap)? {
                    // re-verify before reporting
                    assert!(!exists_bruteforce(&inst, target, cap)?);
                    witnesses.push(TightnessWitness {
                        instance: inst.clone(),
                        target,
                    });
                }
            }
        }
    }
    Ok(witnesses)
}

/// One probed tuple of the four-matching variant.
#[derive(Debug, Clone)]
pub struct K4Record {
    pub n: usize,
    pub seed: u64,
    pub tuple: [usize; 4],
    pub exists: bool,
}

#[derive(Debug, Clone, Default)]
pub struct K4Report {
    pub records: Vec<K4Record>,
    pub instances: usize,
    pub tuples: usize,
    pub counterexamples: Vec<(u64, usize, [usize; 4])>,
}

/// Probe the four-matching variant at brute-force scale: for random
/// instances with four pairwise discordant permutations, test every tuple
/// summing to `n - 1`. A counterexample candidate is double-checked before
/// being reported.
pub fn search_k4(n_max: usize, budget: usize, seed: u64, cap: usize) -> Result<K4Report> {
    if n_max > cap {
        return Err(Error::TooLarge { n: n_max, cap });
    }
    let mut report = K4Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 4..=n_max {
        for _ in 0..budget {
            let inst_seed = rng.gen::<u64>();
            let inst = gen_random_k4(n, inst_seed)?;
            report.instances += 1;
            for tuple in tuples4_summing_to(n - 1) {
                let exists = exists_bruteforce_k4(&inst, tuple, cap)?;
                if !exists {
                    // double-verify before recording a counterexample
                    let again = exists_bruteforce_k4(&inst, tuple, cap)?;
                    if !again {
                        report.counterexamples.push((inst_seed, n, tuple));
                    }
                }
                report.tuples += 1;
                report.records.push(K4Record {
                    n,
                    seed: inst_seed,
                    tuple,
                    exists,
                });
            }
        }
    }
    Ok(report)
}

fn tuples4_summing_to(total: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a1 in 0..=total {
        for a2 in 0..=total - a1 {
            for a3 in 0..=total - a1 - a2 {
                out.push([a1, a2, a3, total - a1 - a2 - a3]);
            }
        }
    }
    out
}

/// The two unsaturated vertices of a near-perfect matching, A side first.
/// Convenience for tests and the pipeline.
pub fn unsaturated_pair(m: &Matching) -> (Vertex, Vertex) {
    m.unsaturated_pair().expect("matching leaves a vertex per side")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_zero_enumerates_empty_matching() {
        let inst = Instance::cyclic(3);
        let all = enumerate_matchings(&inst, 0, DEFAULT_CAP).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].size(), 0);
    }

    #[test]
    fn size_n_matchings_are_perfect() {
        let inst = Instance::cyclic(3);
        let all = enumerate_matchings(&inst, 3, DEFAULT_CAP).unwrap();
        assert!(!all.is_empty());
        for m in &all {
            assert_eq!(m.size(), 3);
            assert!(m.unsaturated_pair().is_none());
        }
        // K_{3,3} decomposed into three shifts: its perfect matchings are
        // the six permutations of a 3-set
        assert_eq!(all.len(), 6);
    }

    #[test]
    fn pair_count_matches_direct_enumeration() {
        let inst = Instance::cyclic(3);
        let all = enumerate_matchings(&inst, 2, DEFAULT_CAP).unwrap();
        // independent oracle: count vertex-disjoint pairs of edges directly
        let mut edges = Vec::new();
        for u in 0..3u32 {
            for c in Color::ALL {
                edges.push(Edge::new(u, c));
            }
        }
        let mut count = 0;
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (a1, b1) = inst.endpoints(edges[i]);
                let (a2, b2) = inst.endpoints(edges[j]);
                if a1 != a2 && b1 != b2 {
                    count += 1;
                }
            }
        }
        assert_eq!(all.len(), count);
    }

    #[test]
    fn exists_trivial_and_theorem_cases() {
        let inst = Instance::cyclic(5);
        assert!(exists_bruteforce(&inst, TargetTriple::new(0, 0, 0), DEFAULT_CAP).unwrap());
        for target in triples_summing_to(4, None) {
            assert!(exists_bruteforce(&inst, target, DEFAULT_CAP).unwrap());
        }
        assert!(matches!(
            exists_bruteforce(&Instance::cyclic(9), TargetTriple::new(8, 0, 0), DEFAULT_CAP),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn exists_agrees_with_enumeration() {
        for seed in 0..10u64 {
            let inst = gen_random(4, seed, false).unwrap();
            for size in 0..=4usize {
                let all = enumerate_matchings(&inst, size, DEFAULT_CAP).unwrap();
                for target in triples_summing_to(size, None) {
                    let via_enum = all.iter().any(|m| m.counts() == target.0);
                    let via_dfs = exists_bruteforce(&inst, target, DEFAULT_CAP).unwrap();
                    assert_eq!(via_enum, via_dfs, "seed {seed} target {target}");
                }
            }
        }
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        let a = gen_random(6, 7, false).unwrap();
        let b = gen_random(6, 7, false).unwrap();
        assert_eq!(a, b);
        let c = gen_random(6, 8, false).unwrap();
        assert_ne!(a, c); // overwhelmingly likely for distinct seeds
        let conn = gen_random(6, 9, true).unwrap();
        assert_eq!(crate::components::components(&conn).len(), 1);
    }

    #[test]
    fn fuzz_hundred_trials_zero_failures() {
        let config = FuzzConfig::new(100, 3, 6, 42);
        let report = fuzz_campaign(&config);
        assert_eq!(report.failures, 0, "{:?}", report.records.iter().map(|r| r.line()).collect::<Vec<_>>());
        assert_eq!(report.oracle_mismatches, 0);
        assert!(report.cases > 0);
        // every record carries its replay seed
        assert!(report.records.iter().all(|r| r.line().contains("seed=")));
    }

    #[test]
    fn exhaustive_policy_covers_all_triples() {
        assert_eq!(triples_summing_to(4, None).len(), 15);
        let mut config = FuzzConfig::new(1, 5, 5, 1);
        config.targets = TargetPolicy::Exhaustive;
        let report = fuzz_campaign(&config);
        assert_eq!(report.cases, 15);
    }

    #[test]
    fn cyclic3_rainbow_triple_is_not_a_witness() {
        let inst = Instance::cyclic(3);
        assert!(exists_bruteforce(&inst, TargetTriple::new(1, 1, 1), DEFAULT_CAP).unwrap());
    }

    #[test]
    fn tightness_witnesses_exist_and_reverify() {
        let witnesses = search_tightness(4, 11, DEFAULT_CAP).unwrap();
        assert!(!witnesses.is_empty());
        for w in &witnesses {
            assert_eq!(w.target.sum(), w.instance.n());
            assert!(w.target.0.iter().all(|&a| a <= w.instance.n() - 1));
            assert!(!exists_bruteforce(&w.instance, w.target, DEFAULT_CAP).unwrap());
        }
    }

    #[test]
    fn k4_probe_small_budget_no_counterexamples() {
        let report = search_k4(5, 2, 3, DEFAULT_CAP).unwrap();
        assert!(report.counterexamples.is_empty());
        assert!(report.tuples > 0);
        assert_eq!(report.records.len(), report.tuples);
    }

    #[test]
    fn k4_validation_rejects_small_n() {
        assert!(matches!(gen_random_k4(3, 1), Err(Error::NTooSmall(3))));
        let rows: Vec<Vec<i64>> = vec![
            (0..4).collect(),
            (0..4).map(|u| (u + 1) % 4).collect(),
            (0..4).map(|u| (u + 2) % 4).collect(),
            (0..4).map(|u| (u + 3) % 4).collect(),
        ];
        assert!(validate_k4(4, &rows).is_ok());
        assert!(matches!(validate_k4(3, &rows), Err(Error::NTooSmall(3))));
    }
}
