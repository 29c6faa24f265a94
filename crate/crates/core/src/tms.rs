//! Both sides of the mirror identity for a parameter set and weight system,
//! and parameter sweeps over many instances.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chambers::{enumerate_walls, is_generic_against, sample_generic_weights, small_weight_margin, WeightSystem};
use crate::cstar_fixed::{count_components, variant_closed_form, variant_total_bruteforce, variant_total_cyclotomic};
use crate::error::{Error, Result};
use crate::exactpoly::{parse_rat, rat_to_string, BivarPoly, Rat};
use crate::moduli::ModuliParams;
use crate::pgl_fixed::stringy_gamma_sum;

/// What the identity compares, stated once per report.
pub const SCOPE_NOTE: &str = "lhs: variant E-polynomial of the (1,...,1) fixed locus times (uv)^(dim/2); \
rhs: sum over non-trivial torsion points of E(fixed locus)^inv (uv)^F. \
Identifying the lhs with the full variant part is an external input and is not recomputed here.";

/// Wall-clock time per phase, in milliseconds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseTiming {
    pub walls: u128,
    pub bruteforce: u128,
    pub closed: u128,
    pub cyclotomic: u128,
    pub stringy: u128,
    pub census: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TmsReport {
    pub params: ModuliParams,
    pub weights: WeightSystem,
    pub lhs_bruteforce: BivarPoly,
    pub lhs_closed: BivarPoly,
    pub lhs_cyclotomic: BivarPoly,
    pub rhs: BivarPoly,
    pub equal: bool,
    pub component_count: u64,
    pub wall_count: u64,
    pub scope: &'static str,
    /// Left out of JSON so that reports are reproducible byte for byte.
    #[serde(skip)]
    pub timing: PhaseTiming,
}

fn timed<T>(slot: &mut u128, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed().as_millis();
    out
}

/// Computes the variant total three ways and the stringy sum, and compares them exactly.
pub fn verify_identity(p: &ModuliParams, w: &WeightSystem) -> Result<TmsReport> {
    w.check_params(p)?;
    let mut timing = PhaseTiming::default();
    let walls = timed(&mut timing.walls, || enumerate_walls(p));
    if !is_generic_against(w, p, &walls) {
        return Err(Error::NonGenericWeights);
    }
    let lhs_bruteforce = timed(&mut timing.bruteforce, || variant_total_bruteforce(p, w));
    let lhs_closed = timed(&mut timing.closed, || variant_closed_form(p));
    let lhs_cyclotomic = timed(&mut timing.cyclotomic, || variant_total_cyclotomic(p))?;
    let rhs = timed(&mut timing.stringy, || stringy_gamma_sum(p));
    let component_count = timed(&mut timing.census, || count_components(p, w));
    let equal = lhs_bruteforce == lhs_closed && lhs_closed == lhs_cyclotomic && lhs_cyclotomic == rhs;
    Ok(TmsReport {
        params: *p,
        weights: w.clone(),
        lhs_bruteforce,
        lhs_closed,
        lhs_cyclotomic,
        rhs,
        equal,
        component_count,
        wall_count: walls.len() as u64,
        scope: SCOPE_NOTE,
        timing,
    })
}

/// `E_st(M / Gamma) - E(M)^Gamma`: the sum over non-trivial torsion points.
pub fn stringy_offset(p: &ModuliParams) -> BivarPoly {
    stringy_gamma_sum(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRanges {
    pub n: Vec<u32>,
    pub g: Vec<u32>,
    pub marked: Vec<u32>,
    pub deg: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSampling {
    pub seeds: Vec<u64>,
    /// `"num/den"` strings, or `"margin"` for the certified small-weight bound.
    pub scales: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub ranges: SweepRanges,
    pub sampling: SweepSampling,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ranges: SweepRanges {
                n: vec![2, 3],
                g: vec![2, 3],
                marked: vec![1, 2],
                deg: vec![0, 1],
            },
            sampling: SweepSampling {
                seeds: (1..=5).collect(),
                scales: vec!["margin".into(), "1".into()],
            },
        }
    }
}

/// Largest rank for which arbitrary generic weights are swept; above it the
/// scale is clamped to the small-weight margin.
const ANY_WEIGHTS_MAX_N: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Scale {
    Margin,
    Value(Rat),
}

fn parse_scale(s: &str) -> Result<Scale> {
    if s.trim() == "margin" {
        Ok(Scale::Margin)
    } else {
        Ok(Scale::Value(parse_rat(s)?))
    }
}

/// One sweep instance: the report, or the error it produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub params: Option<ModuliParams>,
    pub input: SweepInput,
    pub seed: u64,
    pub scale: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<TmsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SweepInput {
    pub n: u32,
    pub g: u32,
    pub marked: u32,
    pub deg: i64,
}

impl SweepRecord {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.equal)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub total: usize,
    pub equal: usize,
    pub unequal: usize,
    pub errors: usize,
}

pub fn summarize(records: &[SweepRecord]) -> SweepSummary {
    let mut s = SweepSummary {
        total: records.len(),
        ..Default::default()
    };
    for r in records {
        match &r.report {
            Some(rep) if rep.equal => s.equal += 1,
            Some(_) => s.unequal += 1,
            None => s.errors += 1,
        }
    }
    s
}

fn run_instance(input: SweepInput, seed: u64, scale: &Scale) -> (Option<ModuliParams>, String, Result<TmsReport>) {
    let params = match ModuliParams::new(input.n, input.g, input.marked, input.deg) {
        Ok(p) => p,
        Err(e) => {
            let label = match scale {
                Scale::Margin => "margin".to_string(),
                Scale::Value(v) => rat_to_string(v),
            };
            return (None, label, Err(e));
        }
    };
    let margin = small_weight_margin(&params);
    let eff = match scale {
        Scale::Margin => margin,
        Scale::Value(v) if params.n() > ANY_WEIGHTS_MAX_N && *v > margin => margin,
        Scale::Value(v) => v.clone(),
    };
    let label = rat_to_string(&eff);
    let result = sample_generic_weights(&params, seed, &eff).and_then(|w| verify_identity(&params, &w));
    (Some(params), label, result)
}

/// Runs every combination in the config, in canonical order
/// (`n`, `g`, `marked`, `deg`, seed, scale), in parallel. Instances that fail
/// are recorded with their error and do not stop the sweep.
pub fn sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    let scales = cfg
        .sampling
        .scales
        .iter()
        .map(|s| parse_scale(s))
        .collect::<Result<Vec<_>>>()?;
    let mut jobs = Vec::new();
    for &n in &cfg.ranges.n {
        for &g in &cfg.ranges.g {
            for &marked in &cfg.ranges.marked {
                for &deg in &cfg.ranges.deg {
                    for &seed in &cfg.sampling.seeds {
                        for scale in &scales {
                            jobs.push((SweepInput { n, g, marked, deg }, seed, scale.clone()));
                        }
                    }
                }
            }
        }
    }
    let mut records: Vec<SweepRecord> = jobs
        .par_iter()
        .map(|(input, seed, scale)| {
            let (params, label, result) = run_instance(*input, *seed, scale);
            let (report, error) = match result {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRecord {
                params,
                input: *input,
                seed: *seed,
                scale: label,
                report,
                error,
            }
        })
        .collect();
    // clamping can make two jobs identical; keep the first
    let mut seen = std::collections::HashSet::new();
    records.retain(|r| seen.insert((r.input.n, r.input.g, r.input.marked, r.input.deg, r.seed, r.scale.clone())));
    Ok(records)
}

/// One CSV row per instance, timings included.
pub fn write_summary_csv<W: Write>(records: &[SweepRecord], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Parse(e.to_string());
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "n", "g", "marked", "deg", "seed", "scale", "equal", "component_count", "wall_count",
        "ms_walls", "ms_bruteforce", "ms_closed", "ms_cyclotomic", "ms_stringy", "ms_census", "error",
    ])
    .map_err(io)?;
    for r in records {
        let mut row = vec![
            r.input.n.to_string(),
            r.input.g.to_string(),
            r.input.marked.to_string(),
            r.input.deg.to_string(),
            r.seed.to_string(),
            r.scale.clone(),
        ];
        match &r.report {
            Some(rep) => {
                let t = &rep.timing;
                row.extend([
                    rep.equal.to_string(),
                    rep.component_count.to_string(),
                    rep.wall_count.to_string(),
                    t.walls.to_string(),
                    t.bruteforce.to_string(),
                    t.closed.to_string(),
                    t.cyclotomic.to_string(),
                    t.stringy.to_string(),
                    t.census.to_string(),
                    String::new(),
                ]);
            }
            None => {
                row.extend(std::iter::repeat_n(String::new(), 9));
                row.push(r.error.clone().unwrap_or_default());
            }
        }
        wtr.write_record(&row).map_err(io)?;
    }
    wtr.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rat;
    use num_bigint::BigInt;

    fn mp(n: u32, g: u32, k: u32, d: i64) -> ModuliParams {
        ModuliParams::new(n, g, k, d).unwrap()
    }

    #[test]
    fn identity_small() {
        let p = mp(2, 2, 1, 0);
        let w = sample_generic_weights(&p, 7, &rat(1, 1000)).unwrap();
        let r = verify_identity(&p, &w).unwrap();
        assert!(r.equal);
        let target = BivarPoly::one_minus_u_one_minus_v().scale(&BigInt::from(15)).shift(4, 4);
        assert_eq!(r.rhs, target);
        assert_eq!(r.component_count, 3);
        assert!(!serde_json::to_string(&r).unwrap().contains("timing"));
    }

    #[test]
    fn rejects_wall() {
        let p = mp(2, 2, 2, 0);
        let w = WeightSystem::new(vec![vec![rat(0, 1), rat(1, 4)], vec![rat(0, 1), rat(1, 4)]]).unwrap();
        assert_eq!(verify_identity(&p, &w), Err(Error::NonGenericWeights));
    }

    #[test]
    fn offset() {
        assert_eq!(stringy_offset(&mp(3, 2, 1, 0)).leading_coeff(), Some(&BigInt::from(160)));
    }

    #[test]
    fn empty_and_errors() {
        let mut cfg = SweepConfig::default();
        cfg.ranges.n.clear();
        assert!(sweep(&cfg).unwrap().is_empty());
        let cfg = SweepConfig {
            ranges: SweepRanges {
                n: vec![4, 2],
                g: vec![2],
                marked: vec![1],
                deg: vec![0],
            },
            sampling: SweepSampling {
                seeds: vec![1],
                scales: vec!["margin".into()],
            },
        };
        let recs = sweep(&cfg).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs[0].error.is_some());
        assert!(recs[1].passed());
        let s = summarize(&recs);
        assert_eq!((s.total, s.equal, s.errors), (2, 1, 1));
    }
}
