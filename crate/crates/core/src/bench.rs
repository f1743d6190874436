//! Random-tree benchmark: approximation sizes and running times across tree
//! sizes, with CSV and SVG output.

use std::fmt::Write as _;
use std::io;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::approx::{format_delta, nest_embedded_from_profile, nest_from_profile, Delta};
use crate::profile::compute_profile_counted;
use crate::randgen::{random_tree, trial_seed, GenSpec};

pub const DEFAULT_SIZES: [usize; 10] = [10, 20, 30, 40, 50, 75, 100, 150, 200, 250];
pub const DEFAULT_TRIALS: usize = 300;
pub const DEFAULT_MASTER_SEED: u64 = 2016;

pub const CSV_HEADER: [&str; 12] = [
    "size",
    "trial",
    "seed",
    "n_tau",
    "n_nest",
    "n_nest_embedded",
    "d_nest",
    "d_nest_embedded",
    "delta_nest",
    "delta_nest_embedded",
    "t_nest_ns",
    "t_nest_embedded_ns",
];

/// Step-count bound factors: profile cost `<= c1 * #V * max(D, 1)`, NEST
/// `<= c2 * H^2 * max(D, 1)`, NeST `<= c3 * H^2`.
///
/// `c3 = 1` holds for every tree: `H(H+1)/2` scalarizations plus at most
/// `H(H-1)/2` carries. The other two are empirical: the profile holds one
/// entry per node and height below it, which outgrows `#V * D` on long paths,
/// and NEST propagation can walk `h2` columns rather than `D`.
pub const PROFILE_COST_FACTOR: u64 = 3;
pub const NEST_COST_FACTOR: u64 = 1;
pub const NEST_EMBEDDED_COST_FACTOR: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub size: usize,
    pub trial: usize,
    pub seed: u64,
    pub n_tau: u64,
    pub n_nest: u64,
    pub n_nest_embedded: u64,
    pub d_nest: u64,
    pub d_nest_embedded: u64,
    pub delta_nest: Delta,
    pub delta_nest_embedded: Delta,
    pub t_nest_ns: u64,
    pub t_nest_embedded_ns: u64,
    /// Not part of the CSV.
    pub t_profile_ns: u64,
    pub height: u32,
    pub outdegree: usize,
    pub profile_ops: u64,
    pub nest_ops: u64,
    pub nest_embedded_ops: u64,
}

impl BenchRecord {
    /// Whether the step counters respect the fixed bound factors.
    pub fn within_cost_bounds(&self) -> bool {
        let d = self.outdegree.max(1) as u64;
        let h2 = u64::from(self.height) * u64::from(self.height);
        self.profile_ops <= PROFILE_COST_FACTOR * self.n_tau * d
            && self.nest_ops <= NEST_COST_FACTOR * h2 * d
            && self.nest_embedded_ops <= NEST_EMBEDDED_COST_FACTOR * h2
    }

    /// The trial where the insertion approximation beats the deletion one.
    pub fn is_violation(&self) -> bool {
        self.d_nest_embedded > self.d_nest
    }
}

/// A trial where NeST is farther from the tree than NEST.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub size: usize,
    pub trial: usize,
    pub seed: u64,
    pub tree: String,
    pub d_nest: u64,
    pub d_nest_embedded: u64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub violations: Vec<Violation>,
}

fn elapsed_ns(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX)
}

fn run_trial(size: usize, trial: usize, master_seed: u64) -> (BenchRecord, Option<Violation>) {
    let seed = trial_seed(master_seed, size, trial);
    let tree = random_tree(&GenSpec::uniform(size, seed));

    let start = Instant::now();
    let (profile, profile_ops) = compute_profile_counted(&tree);
    let t_profile_ns = elapsed_ns(start);

    let start = Instant::now();
    let nest = nest_from_profile(&tree, &profile);
    let t_nest_ns = elapsed_ns(start);

    let start = Instant::now();
    let embedded = nest_embedded_from_profile(&tree, &profile);
    let t_nest_embedded_ns = elapsed_ns(start);

    let record = BenchRecord {
        size,
        trial,
        seed,
        n_tau: tree.len() as u64,
        n_nest: nest.output_len,
        n_nest_embedded: embedded.output_len,
        d_nest: nest.distance,
        d_nest_embedded: embedded.distance,
        delta_nest: nest.delta,
        delta_nest_embedded: embedded.delta,
        t_nest_ns,
        t_nest_embedded_ns,
        t_profile_ns,
        height: tree.height(),
        outdegree: tree.outdegree(),
        profile_ops,
        nest_ops: nest.op_count,
        nest_embedded_ops: embedded.op_count,
    };
    let violation = record.is_violation().then(|| Violation {
        size,
        trial,
        seed,
        tree: tree.to_string(),
        d_nest: record.d_nest,
        d_nest_embedded: record.d_nest_embedded,
    });
    (record, violation)
}

/// Runs `trials_per_size` random trees for each size. Trial seeds depend only
/// on `(master_seed, size, trial)`, so the output does not depend on
/// scheduling; records come back sorted by `(size, trial)`.
pub fn run_benchmark(sizes: &[usize], trials_per_size: usize, master_seed: u64) -> BenchReport {
    assert!(!sizes.is_empty() && trials_per_size >= 1, "nothing to run");
    let jobs: Vec<(usize, usize)> =
        sizes.iter().flat_map(|&s| (0..trials_per_size).map(move |t| (s, t))).collect();
    let mut results: Vec<(BenchRecord, Option<Violation>)> =
        jobs.par_iter().map(|&(s, t)| run_trial(s, t, master_seed)).collect();
    results.sort_by_key(|(r, _)| (r.size, r.trial));
    let violations = results.iter().filter_map(|(_, v)| v.clone()).collect();
    BenchReport { records: results.into_iter().map(|(r, _)| r).collect(), violations }
}

pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.size.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.n_tau.to_string(),
            r.n_nest.to_string(),
            r.n_nest_embedded.to_string(),
            r.d_nest.to_string(),
            r.d_nest_embedded.to_string(),
            format_delta(&r.delta_nest),
            format_delta(&r.delta_nest_embedded),
            r.t_nest_ns.to_string(),
            r.t_nest_embedded_ns.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One line per violation: size, trial, seed, distances, tree.
pub fn write_violations<W: io::Write>(violations: &[Violation], mut out: W) -> io::Result<()> {
    for v in violations {
        writeln!(
            out,
            "size={} trial={} seed={} d_nest={} d_nest_embedded={} {}",
            v.size, v.trial, v.seed, v.d_nest, v.d_nest_embedded, v.tree
        )?;
    }
    Ok(())
}

/// Mean and quartiles of one integer series. Quartiles use the nearest-rank
/// definition, so they are sample values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub mean: Ratio<u128>,
    pub q1: u64,
    pub median: u64,
    pub q3: u64,
}

impl Summary {
    pub fn of(values: &[u64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_unstable();
        let rank = |num: usize| {
            // ceil(num/4 * n), 1-based
            let r = (num * v.len()).div_ceil(4).max(1);
            v[r - 1]
        };
        let total: u128 = v.iter().map(|&x| u128::from(x)).sum();
        Some(Summary {
            mean: Ratio::new(total, v.len() as u128),
            q1: rank(1),
            median: rank(2),
            q3: rank(3),
        })
    }

    pub fn mean_f64(&self) -> f64 {
        *self.mean.numer() as f64 / *self.mean.denom() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeSummary {
    pub size: usize,
    pub trials: usize,
    pub n_nest: Summary,
    pub n_nest_embedded: Summary,
    pub t_nest_ns: Summary,
    pub t_nest_embedded_ns: Summary,
    pub violations: usize,
}

/// Per-size statistics, sizes ascending.
pub fn summarize(records: &[BenchRecord]) -> Vec<SizeSummary> {
    let mut sizes: Vec<usize> = records.iter().map(|r| r.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|size| {
            let rs: Vec<&BenchRecord> = records.iter().filter(|r| r.size == size).collect();
            let col = |f: fn(&BenchRecord) -> u64| {
                Summary::of(&rs.iter().map(|r| f(r)).collect::<Vec<_>>()).expect("size has trials")
            };
            SizeSummary {
                size,
                trials: rs.len(),
                n_nest: col(|r| r.n_nest),
                n_nest_embedded: col(|r| r.n_nest_embedded),
                t_nest_ns: col(|r| r.t_nest_ns),
                t_nest_embedded_ns: col(|r| r.t_nest_embedded_ns),
                violations: rs.iter().filter(|r| r.is_violation()).count(),
            }
        })
        .collect()
}

/// Plain-text table of [`summarize`] output.
pub fn summary_table(summaries: &[SizeSummary]) -> String {
    let mut out = String::from(
        "size trials  nest_mean nest_q1 nest_q3  nest_emb_mean emb_q1 emb_q3  t_nest_ns t_emb_ns violations\n",
    );
    for s in summaries {
        let _ = writeln!(
            out,
            "{:>4} {:>6} {:>10.1} {:>7} {:>7} {:>14.1} {:>6} {:>6} {:>10.0} {:>8.0} {:>10}",
            s.size,
            s.trials,
            s.n_nest.mean_f64(),
            s.n_nest.q1,
            s.n_nest.q3,
            s.n_nest_embedded.mean_f64(),
            s.n_nest_embedded.q1,
            s.n_nest_embedded.q3,
            s.t_nest_ns.mean_f64(),
            s.t_nest_embedded_ns.mean_f64(),
            s.violations,
        );
    }
    out
}

struct Panel<'a> {
    title: &'a str,
    y_label: &'a str,
    pick: fn(&SizeSummary) -> &Summary,
}

/// Standalone SVG with four panels: NEST and NeST sizes on top, their running
/// times below. Each panel draws the median (solid), the mean (dashed) and a
/// shaded band between the first and third quartiles.
pub fn render_svg(summaries: &[SizeSummary]) -> String {
    let panels = [
        Panel { title: "NEST size", y_label: "nodes", pick: |s| &s.n_nest },
        Panel { title: "NeST size", y_label: "nodes", pick: |s| &s.n_nest_embedded },
        Panel { title: "NEST time", y_label: "ns", pick: |s| &s.t_nest_ns },
        Panel { title: "NeST time", y_label: "ns", pick: |s| &s.t_nest_embedded_ns },
    ];
    let (pw, ph) = (420.0, 300.0);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="11">"#,
        2.0 * pw,
        2.0 * ph
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, panel) in panels.iter().enumerate() {
        let ox = (i % 2) as f64 * pw;
        let oy = (i / 2) as f64 * ph;
        draw_panel(&mut svg, panel, summaries, ox, oy, pw, ph);
    }
    svg.push_str("</svg>\n");
    svg
}

fn draw_panel(
    svg: &mut String,
    panel: &Panel<'_>,
    summaries: &[SizeSummary],
    ox: f64,
    oy: f64,
    pw: f64,
    ph: f64,
) {
    let (left, right, top, bottom) = (ox + 60.0, ox + pw - 20.0, oy + 30.0, oy + ph - 40.0);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
        (left + right) / 2.0,
        oy + 18.0,
        panel.title
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{left:.1}" y="{top:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    if summaries.is_empty() {
        return;
    }
    let xs: Vec<f64> = summaries.iter().map(|s| s.size as f64).collect();
    let (xmin, xmax) = (xs[0], *xs.last().unwrap());
    let ymax = summaries
        .iter()
        .map(|s| {
            let v = (panel.pick)(s);
            (v.q3 as f64).max(v.mean_f64())
        })
        .fold(1.0, f64::max);
    let sx = |x: f64| {
        if xmax > xmin {
            left + (x - xmin) / (xmax - xmin) * (right - left)
        } else {
            (left + right) / 2.0
        }
    };
    let sy = |y: f64| bottom - y / ymax * (bottom - top);

    let mut band = String::new();
    for s in summaries {
        let _ = write!(band, "{:.1},{:.1} ", sx(s.size as f64), sy((panel.pick)(s).q3 as f64));
    }
    for s in summaries.iter().rev() {
        let _ = write!(band, "{:.1},{:.1} ", sx(s.size as f64), sy((panel.pick)(s).q1 as f64));
    }
    let _ = writeln!(svg, r##"<polygon points="{}" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>"##, band.trim_end());

    let line = |f: &dyn Fn(&Summary) -> f64| {
        summaries
            .iter()
            .map(|s| format!("{:.1},{:.1}", sx(s.size as f64), sy(f((panel.pick)(s)))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#08519c" stroke-width="2"/>"##,
        line(&|v| v.median as f64)
    );
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#08519c" stroke-dasharray="5,3"/>"##,
        line(&|v| v.mean_f64())
    );

    for s in summaries {
        let x = sx(s.size as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            bottom + 14.0,
            s.size
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.0}</text>"#,
        left - 4.0,
        top + 4.0,
        ymax
    );
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">0</text>"#, left - 4.0, bottom);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">tree size ({})</text>"#,
        (left + right) / 2.0,
        bottom + 30.0,
        panel.y_label
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trial_count_contract() {
        let report = run_benchmark(&[10], 1, 5);
        assert_eq!(report.records.len(), 1);
        let r = &report.records[0];
        assert_eq!(r.n_tau, 10);
        assert_eq!(r.d_nest, r.n_nest - r.n_tau);
        assert_eq!(r.d_nest_embedded, r.n_tau - r.n_nest_embedded);
    }

    #[test]
    fn records_sorted_and_seeded_by_counter() {
        let report = run_benchmark(&[20, 10], 3, 11);
        let keys: Vec<(usize, usize)> = report.records.iter().map(|r| (r.size, r.trial)).collect();
        assert_eq!(keys, [(10, 0), (10, 1), (10, 2), (20, 0), (20, 1), (20, 2)]);
        assert!(report.records.iter().all(|r| r.seed == trial_seed(11, r.size, r.trial)));
    }

    #[test]
    fn reruns_differ_only_in_timings() {
        let strip = |records: &[BenchRecord]| {
            let mut buf = Vec::new();
            write_csv(records, &mut buf).unwrap();
            String::from_utf8(buf)
                .unwrap()
                .lines()
                .map(|l| l.rsplitn(3, ',').nth(2).unwrap().to_owned())
                .collect::<Vec<_>>()
        };
        let a = run_benchmark(&[10, 30], 20, 99);
        let b = run_benchmark(&[10, 30], 20, 99);
        assert_eq!(strip(&a.records), strip(&b.records));
        assert_eq!(a.violations, b.violations);
    }

    #[test]
    fn nearest_rank_quartiles() {
        let s = Summary::of(&[5, 1, 4, 2, 3]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (2, 3, 4));
        assert_eq!(s.mean, Ratio::new(15, 5));
        let one = Summary::of(&[7]).unwrap();
        assert_eq!((one.q1, one.median, one.q3), (7, 7, 7));
        assert!(Summary::of(&[]).is_none());
    }

    #[test]
    fn csv_header_is_exact() {
        let report = run_benchmark(&[10], 2, 1);
        let mut buf = Vec::new();
        write_csv(&report.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(
            first,
            "size,trial,seed,n_tau,n_nest,n_nest_embedded,d_nest,d_nest_embedded,delta_nest,delta_nest_embedded,t_nest_ns,t_nest_embedded_ns"
        );
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn svg_is_self_contained() {
        let report = run_benchmark(&[10, 20], 4, 3);
        let svg = render_svg(&summarize(&report.records));
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 8);
        assert!(!svg.contains("href"));
    }
}
