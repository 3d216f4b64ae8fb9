//! Qualitative comparisons between curves of one sweep.

use std::fmt;

use super::table::format_sig;
use super::{Curve, SweepRow};
use crate::error::{Error, Result};

/// Relative gap below which two curves count as coinciding.
pub const COINCIDENCE_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct TauRanking {
    pub tau: f64,
    /// Curves with their QFI, best first.
    pub ranking: Vec<(Curve, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSummary {
    pub curve: Curve,
    /// Grid points where the curve strictly beats the benchmark.
    pub beats_count: usize,
    pub points: usize,
    /// Extremes of `(H - H_coh) / H_coh` over the grid.
    pub min_rel_gap: f64,
    pub max_rel_gap: f64,
    /// Grid `tau` values after which the sign of `H - H_coh` flips.
    pub crossovers: Vec<f64>,
}

impl CurveSummary {
    pub fn beats_everywhere(&self) -> bool {
        self.beats_count == self.points
    }

    pub fn beats_nowhere(&self) -> bool {
        self.beats_count == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    pub scenario: String,
    pub per_tau: Vec<TauRanking>,
    pub curves: Vec<CurveSummary>,
    /// Every correlated source (`eta < 1`) strictly beats the benchmark at every tau.
    pub all_sources_beat_benchmark: bool,
    /// No thermal curve (sources and single-mode thermal) beats the benchmark anywhere.
    pub no_thermal_beats_benchmark: bool,
    /// The most asymmetric source stays within [`COINCIDENCE_TOL`] of the benchmark.
    pub most_asymmetric_coincides: bool,
    /// `H` strictly increases as `eta` decreases (including `eta = 1`) at every tau.
    pub strictly_ordered_in_eta: bool,
    /// No thermal curve exceeds the benchmark by more than [`COINCIDENCE_TOL`].
    pub benchmark_is_ceiling: bool,
    /// Curve that ranks first at every tau, if one does.
    pub top_curve: Option<Curve>,
    /// Correlated source that ranks first among the sources at every tau.
    pub top_source: Option<Curve>,
}

impl OrderingReport {
    pub fn curve(&self, curve: Curve) -> Option<&CurveSummary> {
        self.curves.iter().find(|s| s.curve == curve)
    }
}

/// Evaluates the comparison flags over the rows of one scenario sweep.
pub fn ordering_report(rows: &[SweepRow]) -> Result<OrderingReport> {
    let first = rows
        .first()
        .ok_or_else(|| Error::domain("ordering report needs at least one row"))?;
    if rows.iter().any(|r| r.scenario != first.scenario) {
        return Err(Error::domain("rows mix several scenarios"));
    }

    let mut taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();

    let mut curves: Vec<Curve> = Vec::new();
    for r in rows {
        if !curves.contains(&r.curve) {
            curves.push(r.curve);
        }
    }

    let lookup = |curve: Curve, tau: f64| {
        rows.iter()
            .find(|r| r.curve == curve && r.tau == tau)
            .map(|r| (r.qfi, r.qfi_benchmark))
    };

    let per_tau: Vec<TauRanking> = taus
        .iter()
        .map(|&tau| {
            let mut ranking: Vec<(Curve, f64)> = curves
                .iter()
                .filter_map(|&c| lookup(c, tau).map(|(h, _)| (c, h)))
                .collect();
            ranking.sort_by(|x, y| y.1.total_cmp(&x.1));
            TauRanking { tau, ranking }
        })
        .collect();

    let summaries: Vec<CurveSummary> = curves
        .iter()
        .filter(|c| c.is_thermal())
        .map(|&curve| {
            let gaps: Vec<(f64, f64)> = taus
                .iter()
                .filter_map(|&t| lookup(curve, t).map(|(h, b)| (t, (h - b) / b)))
                .collect();
            let crossovers = gaps
                .windows(2)
                .filter(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
                .map(|w| w[0].0)
                .collect();
            CurveSummary {
                curve,
                beats_count: gaps.iter().filter(|(_, g)| *g > 0.0).count(),
                points: gaps.len(),
                min_rel_gap: gaps.iter().map(|p| p.1).fold(f64::INFINITY, f64::min),
                max_rel_gap: gaps.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
                crossovers,
            }
        })
        .collect();

    let sources: Vec<&CurveSummary> = summaries
        .iter()
        .filter(|s| matches!(s.curve, Curve::Source { .. }))
        .collect();
    let all_sources_beat_benchmark =
        !sources.is_empty() && sources.iter().all(|s| s.beats_everywhere());
    let no_thermal_beats_benchmark = summaries.iter().all(|s| s.beats_nowhere());
    let most_asymmetric_coincides = sources
        .iter()
        .min_by(|a, b| {
            let (ea, eb) = (a.curve.eta().unwrap_or(1.0), b.curve.eta().unwrap_or(1.0));
            ea.total_cmp(&eb)
        })
        .is_some_and(|s| {
            s.min_rel_gap.abs() < COINCIDENCE_TOL && s.max_rel_gap.abs() < COINCIDENCE_TOL
        });
    let benchmark_is_ceiling = summaries.iter().all(|s| s.max_rel_gap <= COINCIDENCE_TOL);

    let mut by_eta: Vec<Curve> = curves.iter().copied().filter(Curve::is_thermal).collect();
    by_eta.sort_by(|a, b| {
        let (ea, eb) = (a.eta().unwrap_or(1.0), b.eta().unwrap_or(1.0));
        ea.total_cmp(&eb)
    });
    let strictly_ordered_in_eta = by_eta.len() >= 2
        && taus.iter().all(|&t| {
            let hs: Vec<Option<f64>> = by_eta.iter().map(|&c| lookup(c, t).map(|p| p.0)).collect();
            hs.windows(2).all(|w| match (w[0], w[1]) {
                (Some(lo_eta), Some(hi_eta)) => lo_eta > hi_eta,
                _ => false,
            })
        });

    let top_curve = per_tau
        .first()
        .and_then(|r| r.ranking.first().map(|p| p.0))
        .filter(|&c| {
            per_tau
                .iter()
                .all(|r| r.ranking.first().map(|p| p.0) == Some(c))
        });

    let best_source = |r: &TauRanking| {
        r.ranking
            .iter()
            .find(|p| matches!(p.0, Curve::Source { .. }))
            .map(|p| p.0)
    };
    let top_source = per_tau
        .first()
        .and_then(best_source)
        .filter(|&c| per_tau.iter().all(|r| best_source(r) == Some(c)));

    Ok(OrderingReport {
        scenario: first.scenario.clone(),
        per_tau,
        curves: summaries,
        all_sources_beat_benchmark,
        no_thermal_beats_benchmark,
        most_asymmetric_coincides,
        strictly_ordered_in_eta,
        benchmark_is_ceiling,
        top_curve,
        top_source,
    })
}

impl fmt::Display for OrderingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario: {}", self.scenario)?;
        writeln!(f, "tau points: {}", self.per_tau.len())?;
        writeln!(
            f,
            "all curves beat benchmark: {}",
            self.all_sources_beat_benchmark
        )?;
        writeln!(
            f,
            "no thermal curve beats benchmark: {}",
            self.no_thermal_beats_benchmark
        )?;
        writeln!(
            f,
            "most asymmetric source within {}% of benchmark: {}",
            COINCIDENCE_TOL * 100.0,
            self.most_asymmetric_coincides
        )?;
        writeln!(
            f,
            "strictly ordered in eta: {}",
            self.strictly_ordered_in_eta
        )?;
        writeln!(
            f,
            "benchmark is ceiling (+{}% slack): {}",
            COINCIDENCE_TOL * 100.0,
            self.benchmark_is_ceiling
        )?;
        match self.top_curve {
            Some(c) => writeln!(f, "top curve at every tau: {c}")?,
            None => writeln!(f, "top curve at every tau: none")?,
        }
        match self.top_source {
            Some(c) => writeln!(f, "top source at every tau: {c}")?,
            None => writeln!(f, "top source at every tau: none")?,
        }
        for s in &self.curves {
            write!(
                f,
                "  {}: beats benchmark at {}/{} tau, relative gap [{:+.4}, {:+.4}]",
                s.curve, s.beats_count, s.points, s.min_rel_gap, s.max_rel_gap
            )?;
            if s.crossovers.is_empty() {
                writeln!(f)?;
            } else {
                let xs: Vec<String> = s.crossovers.iter().map(|&t| format_sig(t)).collect();
                writeln!(f, ", crossover after tau = {}", xs.join(", "))?;
            }
        }
        Ok(())
    }
}
