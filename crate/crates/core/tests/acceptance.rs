//! Acceptance checks. Each check prints one PASS/FAIL line; the process
//! exits non-zero if any check fails.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use selfnest::approx::*;
use selfnest::bench::*;
use selfnest::dag::{expand, is_linear, node_count, reduce};
use selfnest::edit::apply;
use selfnest::edit::is_legal;
use selfnest::oracle::*;
use selfnest::profile::*;
use selfnest::randgen::{random_tree, GenSpec};
use selfnest::tree::{is_isomorphic, Tree};

use common::{candidate_ops, heights_preserved, sample_specs, scramble, t};

const NEST_ORACLE_MAX_NODES: usize = 8;
const NEST_EMBEDDED_ORACLE_MAX_NODES: usize = 10;
const CHARACTERIZATION_MAX_NODES: usize = 10;
const PROPERTY_TREES: usize = 1000;
const PROPERTY_MAX_NODES: usize = 250;
const PROPERTY_SEED: u64 = 7;
const BENCH_TIME_LIMIT: Duration = Duration::from_secs(600);
const RUNTIME_SIZE_FLOOR: usize = 100;
const ENUMERATION_COUNTS: [usize; 7] = [1, 1, 2, 4, 9, 20, 48];

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn trees_up_to(n: usize) -> Vec<Tree> {
    (1..=n).flat_map(enumerate_trees).collect()
}

fn nest_mismatches(trees: &[Tree], rule: NestRule) -> usize {
    trees
        .iter()
        .filter(|tree| {
            let Ok(out) = nest_with(tree, rule) else { return true };
            match brute_nest(tree, out.output_len) {
                Ok(best) => !is_isomorphic(&best, &out.tree),
                Err(_) => true,
            }
        })
        .count()
}

fn nest_oracle() -> Vec<Check> {
    let trees = trees_up_to(NEST_ORACLE_MAX_NODES);
    let default = nest_mismatches(&trees, NestRule::default());
    let all_guard =
        nest_mismatches(&trees, NestRule { guard: LoopGuard::AllNonzero, ..NestRule::default() });
    let keep_negative = nest_mismatches(
        &trees,
        NestRule { deficit: DeficitUpdate::KeepNegative, ..NestRule::default() },
    );
    // the alternatives on the benchmark corpus: larger outputs or outputs
    // the tree does not embed into
    let (mut guard_larger, mut unclamped_invalid) = (0usize, 0usize);
    for size in DEFAULT_SIZES {
        for trial in 0..DEFAULT_TRIALS {
            let seed = selfnest::randgen::trial_seed(DEFAULT_MASTER_SEED, size, trial);
            let tree = random_tree(&GenSpec::uniform(size, seed));
            let base = nest(&tree).output_len;
            let g = nest_with(&tree, NestRule { guard: LoopGuard::AllNonzero, ..NestRule::default() }).unwrap();
            guard_larger += usize::from(g.output_len > base);
            let u = nest_with(&tree, NestRule { deficit: DeficitUpdate::KeepNegative, ..NestRule::default() })
                .unwrap();
            unclamped_invalid += usize::from(!embeds_into_sn(&tree, &u.profile).unwrap());
        }
    }
    vec![check(
        "nest equals exhaustive insertion search (all trees up to 8 nodes)",
        default == 0,
        format!(
            "{} trees, {default} mismatches; alternatives: all-nonzero guard {all_guard}, \
             unclamped deficits {keep_negative}; benchmark corpus: all-nonzero guard larger on \
             {guard_larger} trees, unclamped deficits not embedding on {unclamped_invalid}",
            trees.len()
        ),
    )]
}

fn nest_embedded_oracle() -> Vec<Check> {
    let trees = trees_up_to(NEST_EMBEDDED_ORACLE_MAX_NODES);
    let mut size_miss = [0usize; 2];
    let mut ambiguous = 0usize;
    let mut unreachable = 0usize;
    let mut example = None;
    for tree in &trees {
        let (best, optima) = nest_embedded_optima(tree);
        if optima.len() > 1 {
            ambiguous += 1;
        }
        for (i, rule) in [CarryRule::SubtreeRow, CarryRule::ParentRow].into_iter().enumerate() {
            let out = nest_embedded_with(tree, rule);
            let hit = optima.iter().any(|o| is_isomorphic(o, &out.tree));
            if !hit {
                size_miss[i] += 1;
                if i == 0 && example.is_none() {
                    example = Some(format!(
                        "{} -> {} nodes, optimum {best}",
                        tree.canonical().as_str(),
                        out.output_len
                    ));
                }
            }
            if i == 0 {
                let closure: HashSet<String> = deletion_closure(tree)
                    .iter()
                    .map(|x| x.canonical().into_string())
                    .collect();
                if !closure.contains(out.tree.canonical().as_str()) {
                    unreachable += 1;
                }
            }
        }
    }
    // the two carry readings on the benchmark corpus
    let mut larger = [0usize; 2];
    let mut corpus_unreachable = 0usize;
    for size in DEFAULT_SIZES {
        for trial in 0..DEFAULT_TRIALS {
            let seed = selfnest::randgen::trial_seed(DEFAULT_MASTER_SEED, size, trial);
            let tree = random_tree(&GenSpec::uniform(size, seed));
            let a = nest_embedded_with(&tree, CarryRule::SubtreeRow);
            let b = nest_embedded_with(&tree, CarryRule::ParentRow);
            for out in [&a, &b] {
                corpus_unreachable += usize::from(!reachable_by_deletions(&tree, &out.profile).unwrap());
            }
            larger[0] += usize::from(a.output_len > b.output_len);
            larger[1] += usize::from(b.output_len > a.output_len);
        }
    }
    let ok = size_miss[0] == 0 && ambiguous == 0;
    vec![check(
        "nest_embedded equals the unique deletion-search optimum (all trees up to 10 nodes)",
        ok,
        format!(
            "{} trees, {} not optimal (other carry row: {}), {ambiguous} with several optima, \
             {unreachable} outputs unreachable by deletions; first miss {}; benchmark corpus: \
             subtree-row carry larger {} times, parent-row carry larger {} times, {corpus_unreachable} \
             unreachable outputs",
            trees.len(),
            size_miss[0],
            size_miss[1],
            example.unwrap_or_else(|| "none".into()),
            larger[0],
            larger[1]
        ),
    )]
}

fn characterization() -> Vec<Check> {
    let trees = trees_up_to(CHARACTERIZATION_MAX_NODES);
    let mut exceptions = 0usize;
    let mut self_nested = 0usize;
    for tree in &trees {
        let dag = reduce(tree);
        let linear = is_linear(&dag);
        let by_profile = is_self_nested_profile(&compute_profile(tree));
        let direct = is_self_nested_direct(tree);
        let class_count = dag.len() == tree.height() as usize + 1;
        if linear != by_profile || by_profile != direct || class_count != direct {
            exceptions += 1;
        }
        self_nested += usize::from(direct);
    }
    vec![check(
        "linear DAG <=> self-nested profile <=> equal-height subtrees isomorphic (up to 10 nodes)",
        exceptions == 0,
        format!("{} trees, {self_nested} self-nested, {exceptions} exceptions", trees.len()),
    )]
}

fn worked_profiles() -> Vec<Check> {
    let rows = |r: Vec<Vec<Vec<u64>>>| HeightProfile::from_rows(r).unwrap();
    let tau1 = rows(vec![
        vec![vec![1, 1, 2]],
        vec![vec![0, 1, 1], vec![1, 1, 1]],
        vec![vec![0], vec![0], vec![3]],
    ]);
    let tau3 = rows(vec![
        vec![vec![1, 1, 1]],
        vec![vec![1, 1, 1], vec![1, 1, 1]],
        vec![vec![0], vec![0], vec![3]],
    ]);
    // a tree with the first profile, and the same tree with siblings shuffled
    let t1 = t("(((()))((())())((()())()))");
    let t1_profile_ok = compute_profile(&t1) == tau1
        && profiles_equivalent(&compute_profile(&scramble(&t1)), &tau1);
    let t1_rejected = !tau1.is_self_nested()
        && !is_self_nested_profile(&compute_profile(&t1))
        && !is_self_nested_profile(&compute_profile(&scramble(&t1)))
        && !is_linear(&reduce(&t1));

    let s3 = tau3.to_scalar();
    let (rebuilt, counted, via_dag, profile_back) = match &s3 {
        Ok(s) => {
            let tree = sn_tree_from_profile(s).unwrap();
            let counted = sn_node_count(s).unwrap();
            let via_dag = node_count(&reduce(&tree));
            let back = compute_profile(&tree) == tau3;
            (tree.len() as u64, counted, via_dag, back)
        }
        Err(_) => (0, 0, 0, false),
    };
    let pass = t1_profile_ok
        && t1_rejected
        && s3.is_ok()
        && rebuilt == 13
        && counted == 13
        && via_dag == 13
        && profile_back;
    vec![check(
        "worked height profiles: first is not self-nested, second rebuilds to 13 nodes",
        pass,
        format!(
            "first profile realized {t1_profile_ok}, rejected {t1_rejected}; second: rebuilt \
             {rebuilt} nodes, counted {counted}, DAG count {via_dag}, profile recovered {profile_back}"
        ),
    )]
}

fn delta_formula() -> Vec<Check> {
    let d_nest = delta_nest_from_counts(30, 37);
    let d_emb = delta_nest_embedded_from_counts(30, 24);
    let pass = d_nest == Ratio::new(23, 30) && d_emb == Ratio::new(24, 30);
    vec![check(
        "self-nestedness indices for 30 nodes, NEST 37, NeST 24",
        pass,
        format!("delta_nest = {}, delta_nest_embedded = {}", format_delta(&d_nest), format_delta(&d_emb)),
    )]
}

fn benchmark_checks() -> Vec<Check> {
    let start = Instant::now();
    let report = run_benchmark(&DEFAULT_SIZES, DEFAULT_TRIALS, DEFAULT_MASTER_SEED);
    let elapsed = start.elapsed();
    let summaries = summarize(&report.records);

    let mut dump = Vec::new();
    write_violations(&report.violations, &mut dump).unwrap();
    let dump = String::from_utf8(dump).unwrap();
    let mut out = vec![check(
        "benchmark: NeST never farther from the tree than NEST",
        report.violations.is_empty(),
        format!(
            "{} trials, {} violations{}",
            report.records.len(),
            report.violations.len(),
            if dump.is_empty() {
                String::new()
            } else {
                format!("\n{}", dump.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n"))
            }
        ),
    )];

    let slow: Vec<String> = summaries
        .iter()
        .filter(|s| s.size >= RUNTIME_SIZE_FLOOR)
        .filter(|s| s.t_nest_embedded_ns.mean >= s.t_nest_ns.mean)
        .map(|s| s.size.to_string())
        .collect();
    let ratios: Vec<String> = summaries
        .iter()
        .filter(|s| s.size >= RUNTIME_SIZE_FLOOR)
        .map(|s| format!("{}:{:.2}", s.size, s.t_nest_embedded_ns.mean_f64() / s.t_nest_ns.mean_f64()))
        .collect();
    out.push(check(
        "benchmark: mean NeST time below mean NEST time at sizes >= 100",
        slow.is_empty(),
        format!("NeST/NEST mean time ratio by size {}", ratios.join(" ")),
    ));
    out.push(check(
        "benchmark: full run under 10 minutes",
        elapsed < BENCH_TIME_LIMIT,
        format!("{:.2?}", elapsed),
    ));

    let over: Vec<&BenchRecord> = report.records.iter().filter(|r| !r.within_cost_bounds()).collect();
    let worst = |f: &dyn Fn(&BenchRecord) -> f64| report.records.iter().map(f).fold(0.0, f64::max);
    let d = |r: &BenchRecord| r.outdegree.max(1) as f64;
    let h2 = |r: &BenchRecord| (f64::from(r.height) * f64::from(r.height)).max(1.0);
    out.push(check(
        "step counters within fixed bounds on the benchmark corpus",
        over.is_empty(),
        format!(
            "factors {PROFILE_COST_FACTOR}/{NEST_COST_FACTOR}/{NEST_EMBEDDED_COST_FACTOR}, \
             worst observed {:.2}/{:.2}/{:.2}, {} trials over",
            worst(&|r| r.profile_ops as f64 / (r.n_tau as f64 * d(r))),
            worst(&|r| r.nest_ops as f64 / (h2(r) * d(r))),
            worst(&|r| r.nest_embedded_ops as f64 / h2(r)),
            over.len()
        ),
    ));
    out
}

fn property_suite() -> Vec<Check> {
    let payloads = [t("()"), t("(())"), t("(()())"), t("((()))")];
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |what: &str, tree: &Tree| {
        if failures.len() < 5 {
            failures.push(format!("{what}: {tree}"));
        } else {
            failures.push(String::new());
        }
    };
    let mut ops_checked = 0usize;
    for (i, (n, seed)) in sample_specs(PROPERTY_TREES, PROPERTY_MAX_NODES, PROPERTY_SEED).into_iter().enumerate() {
        let tree = random_tree(&GenSpec::uniform(n, seed));
        let profile = compute_profile(&tree);
        let up = nest(&tree);
        let down = nest_embedded(&tree);

        if !is_isomorphic(&nest(&up.tree).tree, &up.tree)
            || !is_isomorphic(&nest_embedded(&down.tree).tree, &down.tree)
        {
            fail("idempotence", &tree);
        }
        if !(down.output_len <= up.input_len && up.input_len <= up.output_len) {
            fail("sandwich", &tree);
        }
        if up.tree.height() != tree.height() || down.tree.height() != tree.height() {
            fail("height", &tree);
        }
        if !is_self_nested_direct(&up.tree) || !is_self_nested_direct(&down.tree) {
            fail("self-nested output", &tree);
        }
        for h in 1..=tree.height() {
            let col = profile.entry(h, h - 1);
            let (lo, hi) = (*col.iter().min().unwrap(), *col.iter().max().unwrap());
            if up.profile.get(h, h - 1) < hi || down.profile.get(h, h - 1) > lo {
                fail("dominance", &tree);
            }
        }
        if !is_isomorphic(&expand(&reduce(&tree)), &tree) || node_count(&reduce(&tree)) != tree.len() as u64 {
            fail("DAG round trip", &tree);
        }
        for out in [&up, &down] {
            let back = compute_profile(&out.tree).to_scalar();
            if back.as_ref() != Ok(&out.profile) || !is_isomorphic(&sn_tree_from_profile(&out.profile).unwrap(), &out.tree) {
                fail("profile round trip", &tree);
            }
        }
        if scramble(&tree).canonical() != tree.canonical() {
            fail("canonical form under child permutation", &tree);
        }
        // edit height conditions on a subset, the op list is quadratic in size
        if i % 10 == 0 && tree.len() <= 60 {
            for op in candidate_ops(&tree, &payloads) {
                if !is_legal(&tree, &op) {
                    continue;
                }
                let after = apply(&tree, &op).unwrap();
                ops_checked += 1;
                if !heights_preserved(&tree, &after)
                    || after.len() as i64 - tree.len() as i64 != op.node_delta(&tree)
                {
                    fail("edit op heights", &tree);
                }
            }
        }
    }
    let count = failures.len();
    failures.retain(|f| !f.is_empty());
    vec![check(
        "properties on 1000 random trees up to 250 nodes",
        count == 0,
        format!("{ops_checked} legal edit ops checked, {count} failures {}", failures.join("; ")),
    )]
}

fn enumeration() -> Vec<Check> {
    let counts: Vec<usize> = (1..=7).map(|n| enumerate_trees(n).len()).collect();
    vec![check(
        "enumeration counts for 1..7 nodes",
        counts == ENUMERATION_COUNTS,
        format!("{counts:?}"),
    )]
}

fn main() {
    let suites: [fn() -> Vec<Check>; 8] = [
        nest_oracle,
        nest_embedded_oracle,
        characterization,
        worked_profiles,
        delta_formula,
        benchmark_checks,
        property_suite,
        enumeration,
    ];
    let mut failed = 0;
    for suite in suites {
        for c in suite() {
            println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            failed += usize::from(!c.pass);
        }
    }
    println!("acceptance: {failed} failing");
    if failed > 0 {
        std::process::exit(1);
    }
}
