//! Partial edge colourings, the acyclicity verifier and a brute-force oracle.

mod brute;
mod verify;

pub use brute::{
    acyclic_colouring_with, brute_force_acyclic_index, brute_force_acyclic_index_with_guard, AcyclicIndex,
    DEFAULT_EDGE_GUARD,
};
pub use verify::{
    bicoloured_cycle_through, find_bicoloured_cycles, is_acyclic, properness_violations, BicolouredCycle,
};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub type Colour = u32;

#[derive(Debug, Error)]
pub enum ColouringError {
    #[error("edge id {edge} out of range for a graph with {m} edges")]
    EdgeOutOfRange { edge: usize, m: usize },
    #[error("colour {colour} outside palette of size {palette}")]
    ColourOutOfRange { colour: Colour, palette: u32 },
    #[error("colouring covers {colouring} edges but the graph has {graph}")]
    LengthMismatch { colouring: usize, graph: usize },
    #[error("colouring is not proper: {} conflicting edge pairs", violations.len())]
    NotProper { violations: Vec<(usize, usize)> },
    #[error("exhaustive search limited to {guard} edges, graph has {m}")]
    TooManyEdges { m: usize, guard: usize },
    #[error("invalid colouring file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Colour per edge id over the palette `[0, palette_size)`; `None` is uncoloured.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialEdgeColouring {
    palette_size: u32,
    colours: Vec<Option<Colour>>,
}

#[derive(Serialize, Deserialize)]
struct ColouringFile {
    palette_size: u32,
    colours: BTreeMap<usize, Colour>,
}

impl PartialEdgeColouring {
    /// All `m` edges uncoloured.
    pub fn new(palette_size: u32, m: usize) -> Self {
        PartialEdgeColouring { palette_size, colours: vec![None; m] }
    }

    pub fn from_colours(palette_size: u32, colours: Vec<Option<Colour>>) -> Result<Self, ColouringError> {
        if let Some(&colour) = colours.iter().flatten().find(|&&c| c >= palette_size) {
            return Err(ColouringError::ColourOutOfRange { colour, palette: palette_size });
        }
        Ok(PartialEdgeColouring { palette_size, colours })
    }

    pub fn palette_size(&self) -> u32 {
        self.palette_size
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn get(&self, e: usize) -> Option<Colour> {
        self.colours[e]
    }

    /// Panics on a colour outside the palette.
    pub fn set(&mut self, e: usize, c: Option<Colour>) {
        if let Some(c) = c {
            assert!(c < self.palette_size, "colour {c} outside palette {}", self.palette_size);
        }
        self.colours[e] = c;
    }

    pub fn colours(&self) -> &[Option<Colour>] {
        &self.colours
    }

    pub fn coloured_count(&self) -> usize {
        self.colours.iter().flatten().count()
    }

    pub fn is_total(&self) -> bool {
        self.colours.iter().all(Option::is_some)
    }

    pub fn uncoloured_edges(&self) -> Vec<usize> {
        (0..self.colours.len()).filter(|&e| self.colours[e].is_none()).collect()
    }

    pub fn distinct_colours(&self) -> usize {
        self.colours.iter().flatten().collect::<BTreeSet<_>>().len()
    }

    /// Applies `map` to every assigned colour.
    pub fn relabel(&self, map: &[Colour]) -> Self {
        PartialEdgeColouring {
            palette_size: self.palette_size,
            colours: self.colours.iter().map(|c| c.map(|c| map[c as usize])).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let file = ColouringFile {
            palette_size: self.palette_size,
            colours: self.colours.iter().enumerate().filter_map(|(e, c)| c.map(|c| (e, c))).collect(),
        };
        serde_json::to_string(&file).expect("colouring serializes")
    }

    /// Parses the JSON colouring format for a graph with `m` edges.
    pub fn from_json(text: &str, m: usize) -> Result<Self, ColouringError> {
        let file: ColouringFile = serde_json::from_str(text)?;
        let mut colours = vec![None; m];
        for (e, c) in file.colours {
            if e >= m {
                return Err(ColouringError::EdgeOutOfRange { edge: e, m });
            }
            colours[e] = Some(c);
        }
        Self::from_colours(file.palette_size, colours)
    }
}
