use focal_core::{
    alpha_asymptotic, binary_bounds, limit_diagnostic, recurse_minimizer, simplex_scan, solve_minimizer, FocusParam64, Pmf64, Result,
};
use focal_core::regime::SCAN_LATTICE;

use crate::table::{Cell, Table};

/// Figure inputs at the precision of the published plot data.
pub const FIG3_P: [f64; 3] = [0.1820587756164, 0.462129085446578, 0.355812138937022];
pub const FIG3_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const FIG4_P: [f64; 4] = [0.48511729, 0.24276922, 0.22591902, 0.04619447];
pub const FIG4_GAMMA: f64 = 1.0;
pub const FIG4_STEPS: usize = 3;
pub const FIG5_PMFS: [&[f64]; 3] = [&[0.65, 0.35], &[0.43, 0.32, 0.25], &[0.35, 0.25, 0.25, 0.15]];
pub const FIG6_PMFS: [&[f64]; 2] = [&[0.65, 0.35], &[0.43, 0.32, 0.25]];
pub const FIG7_GAMMA: f64 = 1.0;
pub const FIG7_RESOLUTION: usize = 60;
pub const FIG9_P: f64 = 0.05;
pub const FIG10_P: [f64; 3] = [0.4, 0.58, 0.02];
pub const FIG10_QS: [[f64; 3]; 2] = [[0.2, 0.02, 0.78], [0.2, 0.78, 0.02]];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    MinimizerBars,
    Recursion,
    MaxProbability,
    Asymptote,
    SimplexScan,
    BinaryBounds,
    Limit,
}

pub const FIGURES: [Figure; 7] = [
    Figure::MinimizerBars,
    Figure::Recursion,
    Figure::MaxProbability,
    Figure::Asymptote,
    Figure::SimplexScan,
    Figure::BinaryBounds,
    Figure::Limit,
];

impl Figure {
    pub fn number(self) -> u32 {
        match self {
            Figure::MinimizerBars => 3,
            Figure::Recursion => 4,
            Figure::MaxProbability => 5,
            Figure::Asymptote => 6,
            Figure::SimplexScan => 7,
            Figure::BinaryBounds => 9,
            Figure::Limit => 10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Figure::MinimizerBars => "minimizer-bars",
            Figure::Recursion => "recursion",
            Figure::MaxProbability => "max-probability",
            Figure::Asymptote => "asymptote",
            Figure::SimplexScan => "simplex-scan",
            Figure::BinaryBounds => "binary-bounds",
            Figure::Limit => "limit",
        }
    }

    /// Accepts a figure number or a stable name.
    pub fn parse(s: &str) -> Option<Figure> {
        FIGURES
            .into_iter()
            .find(|f| f.name() == s || s.parse::<u32>().ok() == Some(f.number()))
    }
}

/// Overrides accepted by the simplex-scan figure.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScanOverrides {
    pub gamma: Option<f64>,
    pub resolution: Option<usize>,
}

/// `n` points from `start` to `end`, equally spaced in log scale, with exact endpoints.
pub fn geomspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    let (a, b) = (start.log10(), end.log10());
    (0..n)
        .map(|k| match k {
            0 => start,
            k if k + 1 == n => end,
            k => 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64),
        })
        .collect()
}

pub fn fig5_gammas() -> Vec<f64> {
    geomspace(0.01, 40.0, 10)
}

pub fn fig6_gammas() -> Vec<f64> {
    geomspace(1e-4, 10f64.powf(1.5), 50)
}

pub fn fig9_gammas() -> Vec<f64> {
    (0..20).map(|k| 0.1 + 4.9 * k as f64 / 19.0).collect()
}

pub fn fig10_gammas() -> Vec<f64> {
    geomspace(0.1, 100.0, 50)
}

fn fp(g: f64) -> Result<FocusParam64> {
    FocusParam64::new(g)
}

fn pmf(p: &[f64]) -> Result<Pmf64> {
    Pmf64::from_probs(p.to_vec())
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

pub fn figure_table(figure: Figure, scan: ScanOverrides) -> Result<Table> {
    let base = |columns: &[&'static str]| {
        Table::new(columns)
            .meta("figure", figure.number())
            .meta("name", figure.name())
    };
    match figure {
        Figure::MinimizerBars => {
            let p = pmf(&FIG3_P)?;
            let mut t = base(&["gamma", "label", "p", "p_star"]);
            for &g in &FIG3_GAMMAS {
                let r = solve_minimizer(fp(g)?, &p)?;
                for i in 0..p.len() {
                    t.push(vec![g.into(), i.into(), p.prob(i).into(), r.p_star.prob(i).into()]);
                }
            }
            Ok(t)
        }
        Figure::Recursion => {
            let p = pmf(&FIG4_P)?;
            let steps = recurse_minimizer(fp(FIG4_GAMMA)?, &p, FIG4_STEPS)?;
            let mut t = base(&["step", "p0", "p1", "p2", "p3"]).meta("gamma", FIG4_GAMMA);
            for (k, q) in std::iter::once(&p).chain(&steps).enumerate() {
                let mut row = vec![Cell::from(k)];
                row.extend(q.probs().iter().map(|&v| Cell::from(v)));
                t.push(row);
            }
            Ok(t)
        }
        Figure::MaxProbability => {
            let mut t = base(&["support_size", "gamma", "p_max", "max_p_star"]);
            for probs in FIG5_PMFS {
                let p = pmf(probs)?;
                for g in fig5_gammas() {
                    let r = solve_minimizer(fp(g)?, &p)?;
                    t.push(vec![p.len().into(), g.into(), p.p_max().into(), r.p_star.p_max().into()]);
                }
            }
            Ok(t)
        }
        Figure::Asymptote => {
            let mut t = base(&["support_size", "gamma", "alpha_star", "alpha_asymptotic"]);
            for probs in FIG6_PMFS {
                let p = pmf(probs)?;
                for g in fig6_gammas() {
                    let gamma = fp(g)?;
                    let r = solve_minimizer(gamma, &p)?;
                    t.push(vec![
                        p.len().into(),
                        g.into(),
                        r.alpha_star.into(),
                        alpha_asymptotic(gamma, &p).into(),
                    ]);
                }
            }
            Ok(t)
        }
        Figure::SimplexScan => {
            let gamma = scan.gamma.unwrap_or(FIG7_GAMMA);
            let resolution = scan.resolution.unwrap_or(FIG7_RESOLUTION);
            scan_table(base(&[]), gamma, resolution)
        }
        Figure::BinaryBounds => {
            let mut t = base(&["gamma", "q_gamma", "p_star_1", "q_gamma_plus1", "gap_bound"]).meta("p", FIG9_P);
            for g in fig9_gammas() {
                let b = binary_bounds(fp(g)?, FIG9_P)?;
                t.push(vec![
                    g.into(),
                    b.q_gamma.into(),
                    b.p_star_1.into(),
                    b.q_gamma_plus1.into(),
                    b.gap_bound.into(),
                ]);
            }
            Ok(t)
        }
        Figure::Limit => {
            let p = pmf(&FIG10_P)?;
            let mut t = base(&["q_index", "gamma", "value", "target"]).meta("p", list(&FIG10_P));
            for (k, q) in FIG10_QS.iter().enumerate() {
                t = t.meta(&format!("q{}", k), list(q));
            }
            let grid = fig10_gammas();
            for (k, q) in FIG10_QS.iter().enumerate() {
                let d = limit_diagnostic(&p, &pmf(q)?, &grid)?;
                for pt in &d.points {
                    t.push(vec![k.into(), pt.gamma.into(), pt.value.to_real().into(), d.target.into()]);
                }
            }
            Ok(t)
        }
    }
}

/// Scan cells as a table; `template` supplies leading metadata.
pub fn scan_table(template: Table, gamma: f64, resolution: usize) -> Result<Table> {
    let scan = simplex_scan(fp(gamma)?, resolution)?;
    let mut t = Table::new(&["p1", "p2", "p3", "alpha_star", "p_gamma_a", "pmin_minus_pa", "d1"]);
    t.meta = template.meta;
    let mut t = t
        .meta("gamma", gamma)
        .meta("resolution", resolution)
        .meta("lattice", SCAN_LATTICE)
        .meta("min_pmin_minus_pa", scan.min_pmin_minus_pa)
        .meta("min_d1", scan.min_d1)
        .meta("failures", scan.failures);
    for c in &scan.cells {
        t.push(vec![
            c.p[0].into(),
            c.p[1].into(),
            c.p[2].into(),
            c.alpha_star.into(),
            c.p_gamma_a.into(),
            c.pmin_minus_pa.into(),
            c.d1.into(),
        ]);
    }
    if scan.failures > 0 {
        log::warn!("{} scan cells failed", scan.failures);
    }
    Ok(t)
}
