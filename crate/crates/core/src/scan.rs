//! Parameter sweeps, threshold temperatures and figure datasets.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::correlations::{concurrence_analytic, correlated_coherence, MeasureSet};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SpectrumSource};
use crate::parallel::{self, Execution};
use crate::thermal::{gibbs_analytic, PartitionFunction, RhoElements, Temperature};

pub const THRESHOLD_TOL: f64 = 1e-4;
pub const THRESHOLD_PRESCAN_POINTS: usize = 200;
pub const LOG_GRID_POINTS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Temperature,
    Coulomb,
    Delta1,
    Delta2,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Temperature => "temperature",
            SweepAxis::Coulomb => "coulomb",
            SweepAxis::Delta1 => "delta1",
            SweepAxis::Delta2 => "delta2",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single-axis sweep; the quantities not on the axis come from `params`
/// and `temperature`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub params: ModelParams,
    pub temperature: Temperature,
    pub theta: f64,
    pub log_scale: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::invalid("points", format!("need at least 2, got {}", self.points)));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::invalid("range", "start and stop must be finite"));
        }
        if !(self.start < self.stop) {
            return Err(Error::invalid(
                "range",
                format!("start ({}) must be below stop ({})", self.start, self.stop),
            ));
        }
        if self.log_scale && self.start <= 0.0 {
            return Err(Error::invalid("range", "a logarithmic grid needs start > 0"));
        }
        if self.axis == SweepAxis::Temperature && self.start < 0.0 {
            return Err(Error::invalid("range", "temperatures must be >= 0"));
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        Ok(())
    }

    /// Strictly increasing axis values with exact endpoints.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.start
                } else if i == last {
                    self.stop
                } else {
                    let f = i as f64 / last as f64;
                    if self.log_scale {
                        (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp()
                    } else {
                        self.start + f * (self.stop - self.start)
                    }
                }
            })
            .collect()
    }

    fn point(&self, x: f64) -> Result<(ModelParams, Temperature)> {
        let mut p = self.params;
        let mut t = self.temperature;
        match self.axis {
            SweepAxis::Temperature => t = Temperature::new(x)?,
            SweepAxis::Coulomb => p.v = x,
            SweepAxis::Delta1 => p.delta1 = x,
            SweepAxis::Delta2 => p.delta2 = x,
        }
        Ok((p, t))
    }
}

/// Everything computed at one `(params, T, θ)` point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub params: ModelParams,
    pub temperature: Temperature,
    pub energies: [f64; 4],
    pub elements: RhoElements,
    pub z: PartitionFunction,
    pub measures: MeasureSet,
    pub path: SpectrumSource,
}

pub fn evaluate_point(p: &ModelParams, t: Temperature, theta: f64) -> Result<PointRecord> {
    let s = gibbs_analytic(p, t)?;
    let measures = correlated_coherence(&s, theta)?;
    Ok(PointRecord {
        params: *p,
        temperature: t,
        energies: p.energies(),
        elements: s.elements,
        z: s.z,
        measures,
        path: s.source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub concurrence: f64,
    pub c_l1_total: f64,
    pub c_l1_local: f64,
    pub c_cc: f64,
    pub path: SpectrumSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub engine_version: String,
    /// Grid points that needed the numeric fallback.
    pub numeric_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub provenance: Provenance,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, Execution::default())
}

pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid();
    let rows = parallel::try_map(&grid, exec, |&x| {
        let (p, t) = spec.point(x)?;
        let rec = evaluate_point(&p, t, spec.theta)?;
        Ok(SweepRow {
            axis_value: x,
            concurrence: rec.measures.concurrence,
            c_l1_total: rec.measures.c_l1_total,
            c_l1_local: rec.measures.c_l1_local,
            c_cc: rec.measures.c_cc,
            path: rec.path,
        })
    })?;
    let numeric_points = rows.iter().filter(|r| r.path == SpectrumSource::Numeric).count();
    Ok(SweepResult {
        spec: *spec,
        rows,
        provenance: Provenance {
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            numeric_points,
        },
    })
}

/// Concurrence of the Gibbs state through the closed-form path.
pub fn concurrence_at(p: &ModelParams, t: f64) -> Result<f64> {
    concurrence_analytic(&gibbs_analytic(p, Temperature::new(t)?)?)
}

pub fn threshold_temperature(p: &ModelParams, t_lo: f64, t_hi: f64, tol: f64) -> Result<f64> {
    threshold_temperature_with(p, t_lo, t_hi, tol, Execution::default())
}

/// Smallest temperature above which the concurrence stays zero.
///
/// A pre-scan of [`THRESHOLD_PRESCAN_POINTS`] temperatures (logarithmic when
/// `t_lo > 0`) finds the last entangled grid point; bisection on the
/// indicator `C(T) > 0` then narrows the bracket after it to `tol`.
pub fn threshold_temperature_with(
    p: &ModelParams,
    t_lo: f64,
    t_hi: f64,
    tol: f64,
    exec: Execution,
) -> Result<f64> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid("tol", format!("must be positive, got {tol}")));
    }
    if !(t_lo >= 0.0 && t_hi.is_finite() && t_lo < t_hi) {
        return Err(Error::invalid(
            "range",
            format!("need 0 <= t_lo < t_hi < inf, got [{t_lo}, {t_hi}]"),
        ));
    }
    let c_lo = concurrence_at(p, t_lo)?;
    let c_hi = concurrence_at(p, t_hi)?;
    if !(c_lo > 0.0) || c_hi > 0.0 {
        return Err(Error::Unbracketed { t_lo, t_hi, c_lo, c_hi });
    }

    let scan = SweepSpec {
        axis: SweepAxis::Temperature,
        start: t_lo,
        stop: t_hi,
        points: THRESHOLD_PRESCAN_POINTS,
        params: *p,
        temperature: Temperature::ZERO,
        theta: 0.0,
        log_scale: t_lo > 0.0,
    };
    let grid = scan.grid();
    let entangled = parallel::try_map(&grid, exec, |&t| Ok(concurrence_at(p, t)? > 0.0))?;
    let last = entangled
        .iter()
        .rposition(|&e| e)
        .expect("endpoint t_lo is entangled");
    let (mut lo, mut hi) = (grid[last], grid[last + 1]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if concurrence_at(p, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig5c,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig5c,
        FigureId::Fig6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
            FigureId::Fig5c => "fig5c",
            FigureId::Fig6 => "fig6",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid("figure_id", format!("unknown figure {s:?}")))
    }
}

/// One curve of a figure dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureCurve {
    pub figure: FigureId,
    pub label: String,
    /// `false` for curves whose parameters had to be assumed.
    pub paper_curve: bool,
    pub result: SweepResult,
}

struct CurveDef {
    label: &'static str,
    paper_curve: bool,
    params: (f64, f64, f64),
    theta: f64,
}

fn curve(label: &'static str, params: (f64, f64, f64), theta: f64) -> CurveDef {
    CurveDef {
        label,
        paper_curve: true,
        params,
        theta,
    }
}

pub fn figure_dataset(id: FigureId) -> Result<Vec<FigureCurve>> {
    figure_dataset_with(id, Execution::default())
}

pub fn figure_dataset_with(id: FigureId, exec: Execution) -> Result<Vec<FigureCurve>> {
    let d1 = 10.0;
    let d2 = 15.0;
    // (axis, start, stop, points, log, fixed temperature)
    let (axis, start, stop, points, log_scale, fixed_t) = match id {
        FigureId::Fig2 => (SweepAxis::Temperature, 0.0, 100.0, 401, false, 0.0),
        FigureId::Fig3 => (SweepAxis::Temperature, 0.0, 30.0, 301, false, 0.0),
        FigureId::Fig4 => (SweepAxis::Coulomb, 0.0, 50.0, 501, false, 0.1),
        _ => (SweepAxis::Temperature, 0.01, 1000.0, LOG_GRID_POINTS, true, 0.0),
    };
    let curves = match id {
        FigureId::Fig2 => vec![
            curve("v_16d1", (d1, d2, 16.0 * d1), FRAC_PI_4),
            curve("v_8d1", (d1, d2, 8.0 * d1), FRAC_PI_4),
            curve("v_d1_over_3", (d1, d2, d1 / 3.0), FRAC_PI_4),
            curve("v_d1_over_6", (d1, d2, d1 / 6.0), FRAC_PI_4),
        ],
        FigureId::Fig3 => [("d1_1", 1.0), ("d1_2", 2.0), ("d1_5", 5.0), ("d1_10", 10.0)]
            .into_iter()
            .map(|(label, delta1)| CurveDef {
                paper_curve: delta1 == 1.0,
                ..curve(label, (delta1, 8.0, 20.0), FRAC_PI_4)
            })
            .collect(),
        FigureId::Fig4 => [("d_1", 1.0), ("d_2", 2.0), ("d_5", 5.0), ("d_10", 10.0)]
            .into_iter()
            .map(|(label, delta)| curve(label, (delta, delta, 0.0), FRAC_PI_4))
            .collect(),
        FigureId::Fig5a => vec![curve("v_16d1", (d1, d2, 16.0 * d1), 0.0)],
        FigureId::Fig5b => vec![curve("v_16d1", (d1, d2, 16.0 * d1), 0.95 * FRAC_PI_4)],
        FigureId::Fig5c => vec![curve("v_16d1", (d1, d2, 16.0 * d1), FRAC_PI_4)],
        FigureId::Fig6 => vec![
            curve("v_d1", (d1, d2, d1), FRAC_PI_4),
            curve("v_d1_over_3", (d1, d2, d1 / 3.0), FRAC_PI_4),
        ],
    };

    curves
        .into_iter()
        .map(|c| {
            let (a, b, v) = c.params;
            let spec = SweepSpec {
                axis,
                start,
                stop,
                points,
                params: ModelParams::new(a, b, v)?,
                temperature: Temperature::new(fixed_t)?,
                theta: c.theta,
                log_scale,
            };
            Ok(FigureCurve {
                figure: id,
                label: c.label.to_string(),
                paper_curve: c.paper_curve,
                result: run_sweep_with(&spec, exec)?,
            })
        })
        .collect()
}
