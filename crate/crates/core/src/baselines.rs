//! Reference colourer: greedy random colouring with acyclicity repair.

use crate::colouring::{
    bicoloured_cycle_through, find_bicoloured_cycles, properness_violations, Colour, PartialEdgeColouring,
};
use crate::graph::{girth, Graph};
use crate::pipeline::{colour_with_nibble, PipelineConfig};
use crate::rng::{self, Domain};
use rand::Rng;
use serde::Serialize;
use std::io::Write;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("no acyclic colouring after {steps} steps ({coloured} of {m} edges coloured)")]
    StepsExhausted { steps: usize, coloured: usize, m: usize },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    pub colouring: PartialEdgeColouring,
    pub steps: usize,
    /// Steps that undid colours to break a bicoloured cycle or free a colour.
    pub repairs: usize,
}

/// Colours edges one at a time with a uniform colour not used next to them.
/// A new bicoloured cycle through the edge uncolours the half of the cycle
/// starting at that edge; an edge with no free colour uncolours one random
/// neighbour. Each colouring attempt counts as a step.
pub fn repair_colour(g: &Graph, k: u32, seed: u64, max_steps: usize) -> Result<RepairOutcome, BaselineError> {
    let m = g.m();
    let mut chi = PartialEdgeColouring::new(k, m);
    let mut pending: Vec<usize> = (0..m).rev().collect();
    let mut used = vec![false; k as usize];
    let (mut steps, mut repairs) = (0, 0);
    while let Some(&e) = pending.last() {
        if steps == max_steps {
            return Err(BaselineError::StepsExhausted { steps, coloured: chi.coloured_count(), m });
        }
        let mut rng = rng::stream(seed, Domain::Repair, &[steps as u64]);
        steps += 1;
        if chi.get(e).is_some() {
            pending.pop();
            continue;
        }
        let (u, v) = g.edge(e);
        used.fill(false);
        let around: Vec<usize> =
            g.incident(u).iter().chain(g.incident(v)).map(|&(_, f)| f).filter(|&f| f != e).collect();
        for &f in &around {
            if let Some(c) = chi.get(f) {
                used[c as usize] = true;
            }
        }
        let free: Vec<Colour> = (0..k).filter(|&c| !used[c as usize]).collect();
        if free.is_empty() {
            let coloured: Vec<usize> = around.into_iter().filter(|&f| chi.get(f).is_some()).collect();
            let f = coloured[rng.gen_range(0..coloured.len())];
            chi.set(f, None);
            pending.push(f);
            repairs += 1;
            continue;
        }
        chi.set(e, Some(free[rng.gen_range(0..free.len())]));
        pending.pop();
        if let Some(cycle) = bicoloured_cycle_through(g, &chi, e) {
            for &f in &cycle[..cycle.len() / 2] {
                chi.set(f, None);
                pending.push(f);
            }
            repairs += 1;
        }
    }
    debug_assert!(properness_violations(g, &chi).unwrap().is_empty());
    if !find_bicoloured_cycles(g, &chi).expect("proper by construction").is_empty() {
        // unreachable while every new cycle passes through the edge just coloured
        return Err(BaselineError::StepsExhausted { steps, coloured: chi.coloured_count(), m });
    }
    Ok(RepairOutcome { colouring: chi, steps, repairs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub algo: &'static str,
    pub n: usize,
    pub d: usize,
    pub girth: String,
    pub eps_or_k: String,
    pub seed: u64,
    pub colours_used: usize,
    pub success: bool,
    pub rounds: usize,
    pub millis: u128,
}

pub const CSV_HEADER: [&str; 10] =
    ["algo", "n", "d", "girth", "eps_or_K", "seed", "colours_used", "success", "rounds", "millis"];

#[derive(Clone, Debug)]
pub struct CompareOptions {
    /// Colours given to the repair colourer; `None` uses the pipeline palette.
    pub repair_colours: Option<u32>,
    pub repair_steps: usize,
    /// Template for the pipeline; `eps` and `seed` are overridden per row.
    pub pipeline: PipelineConfig,
    /// Record wall time; off gives byte-identical output across runs.
    pub timing: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            repair_colours: None,
            repair_steps: 1_000_000,
            pipeline: PipelineConfig::default(),
            timing: true,
        }
    }
}

/// One repair row and one pipeline row per seed.
pub fn compare_rows(g: &Graph, eps: f64, seeds: &[u64], opts: &CompareOptions) -> Vec<CompareRow> {
    let d = g.max_degree();
    let gr = girth(g).to_string();
    let palette = crate::numeric::palette_size(eps, d);
    let k = opts.repair_colours.unwrap_or(palette);
    let mut rows = Vec::with_capacity(2 * seeds.len());
    for &seed in seeds {
        let t = Instant::now();
        let rep = repair_colour(g, k, seed, opts.repair_steps);
        let millis = if opts.timing { t.elapsed().as_millis() } else { 0 };
        let (colours_used, success, rounds) = match &rep {
            Ok(o) => (o.colouring.distinct_colours(), true, o.steps),
            Err(BaselineError::StepsExhausted { steps, .. }) => (0, false, *steps),
            Err(_) => (0, false, 0),
        };
        rows.push(CompareRow {
            algo: "repair",
            n: g.n(),
            d,
            girth: gr.clone(),
            eps_or_k: k.to_string(),
            seed,
            colours_used,
            success,
            rounds,
            millis,
        });
        let cfg = PipelineConfig { eps, seed, ..opts.pipeline.clone() };
        let t = Instant::now();
        let out = colour_with_nibble(g, &cfg);
        let millis = if opts.timing { t.elapsed().as_millis() } else { 0 };
        rows.push(CompareRow {
            algo: "nibble",
            n: g.n(),
            d,
            girth: gr.clone(),
            eps_or_k: eps.to_string(),
            seed,
            colours_used: out.colouring.as_ref().map_or(0, |c| c.distinct_colours()),
            success: out.report.success,
            rounds: out.trace.len() + out.report.finish_rounds.unwrap_or(0),
            millis,
        });
    }
    rows
}

pub fn write_csv<W: Write>(rows: &[CompareRow], out: W) -> Result<(), BaselineError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.algo.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.girth.clone(),
            r.eps_or_k.clone(),
            r.seed.to_string(),
            r.colours_used.to_string(),
            r.success.to_string(),
            r.rounds.to_string(),
            r.millis.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn compare<W: Write>(
    g: &Graph,
    eps: f64,
    seeds: &[u64],
    opts: &CompareOptions,
    out: W,
) -> Result<(), BaselineError> {
    write_csv(&compare_rows(g, eps, seeds, opts), out)
}
