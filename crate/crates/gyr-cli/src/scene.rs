//! Parsing and emission of `gyr-scene v1` files.
//!
//! The format is line oriented; blank lines and lines starting with `#` are
//! ignored anywhere. The remaining lines must appear in this order:
//!
//! ```text
//! gyr-scene v1
//! dim <d>
//! vertices <v'>
//! edge <tail> <head>          (zero or more; their count defines e')
//! n <k>
//! pos <j> <c1> ... <cd>       (one per vertex, each exactly once)
//! disp <i> <j> <c1> ... <cd>  (optional; if any appear, all n·e' must,
//!                              each exactly once)
//! ```
//!
//! Indices are 1-based. Coordinates are decimal floating point; the emitter
//! writes 17 significant digits so values round-trip exactly.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("line {line}: expected {expected}, found `{found}`")]
    Expected {
        line: usize,
        expected: &'static str,
        found: String,
    },
    #[error("unexpected end of file: expected {expected}")]
    Eof { expected: &'static str },
    #[error("line {line}: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("line {line}: vertex index {index} out of range 1..={count}")]
    VertexRange {
        line: usize,
        index: usize,
        count: usize,
    },
    #[error("line {line}: duplicate pos line for vertex {index}")]
    DuplicatePos { line: usize, index: usize },
    #[error("missing pos line for vertex {index}")]
    MissingPos { index: usize },
    #[error(
        "line {line}: disp indices ({i},{j}) out of range (edges 1..={edges}, slots 1..={slots})"
    )]
    DispRange {
        line: usize,
        i: usize,
        j: usize,
        edges: usize,
        slots: usize,
    },
    #[error("line {line}: duplicate disp line for edge ({i},{j})")]
    DuplicateDisp { line: usize, i: usize, j: usize },
    #[error("missing disp line for edge ({i},{j})")]
    MissingDisp { i: usize, j: usize },
}

/// One parsed scene: a structure graph, its embedding, the subdivision
/// count, and optionally the displacement tables (group-major).
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFile {
    pub dim: usize,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub n: usize,
    /// Vertex-major, `vertices · dim` values.
    pub positions: Vec<f64>,
    /// Group-major, `edges.len() · n · dim` values when present.
    pub displacements: Option<Vec<f64>>,
}

fn parse_index(line: usize, token: &str, what: &str) -> Result<usize, SceneError> {
    token.parse().map_err(|_| SceneError::Malformed {
        line,
        detail: format!("cannot parse `{token}` as {what}"),
    })
}

fn parse_coord(line: usize, token: &str) -> Result<f64, SceneError> {
    token.parse().map_err(|_| SceneError::Malformed {
        line,
        detail: format!("cannot parse `{token}` as a coordinate"),
    })
}

fn keyword_value(
    item: Option<(usize, &str)>,
    keyword: &'static str,
    expected: &'static str,
) -> Result<usize, SceneError> {
    let (line, text) = item.ok_or(SceneError::Eof { expected })?;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != 2 || tokens[0] != keyword {
        return Err(SceneError::Expected {
            line,
            expected,
            found: text.to_string(),
        });
    }
    parse_index(line, tokens[1], "a count")
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, SceneError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(k, raw)| (k + 1, raw.trim()))
            .filter(|&(_, line)| !line.is_empty() && !line.starts_with('#'))
            .collect();
        let mut at = 0usize;
        let mut next = || -> Option<(usize, &str)> {
            let item = lines.get(at).copied();
            at += 1;
            item
        };

        let (line, header) = next().ok_or(SceneError::Eof {
            expected: "header `gyr-scene v1`",
        })?;
        if header != "gyr-scene v1" {
            return Err(SceneError::Expected {
                line,
                expected: "header `gyr-scene v1`",
                found: header.to_string(),
            });
        }

        let dim = keyword_value(next(), "dim", "`dim <d>`")?;
        let vertices = keyword_value(next(), "vertices", "`vertices <v'>`")?;

        // Edge lines run until the `n` line; their count defines e'.
        let mut edges = Vec::new();
        let n;
        loop {
            let (line, text) = next().ok_or(SceneError::Eof {
                expected: "`edge <t> <h>` or `n <k>`",
            })?;
            let tokens: Vec<&str> = text.split_whitespace().collect();
            match tokens.first().copied() {
                Some("edge") if tokens.len() == 3 => {
                    let tail = parse_index(line, tokens[1], "a vertex index")?;
                    let head = parse_index(line, tokens[2], "a vertex index")?;
                    for index in [tail, head] {
                        if index < 1 || index > vertices {
                            return Err(SceneError::VertexRange {
                                line,
                                index,
                                count: vertices,
                            });
                        }
                    }
                    edges.push((tail, head));
                }
                Some("edge") => {
                    return Err(SceneError::Malformed {
                        line,
                        detail: "expected `edge <tail> <head>`".to_string(),
                    });
                }
                Some("n") if tokens.len() == 2 => {
                    n = parse_index(line, tokens[1], "a count")?;
                    break;
                }
                _ => {
                    return Err(SceneError::Expected {
                        line,
                        expected: "`edge <t> <h>` or `n <k>`",
                        found: text.to_string(),
                    });
                }
            }
        }

        // Position lines, each vertex exactly once (any order).
        let mut positions = vec![0.0; vertices * dim];
        let mut seen_pos = vec![false; vertices];
        while let Some(&(line, text)) = lines.get(at) {
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.first() != Some(&"pos") {
                break;
            }
            at += 1;
            if tokens.len() != 2 + dim {
                return Err(SceneError::Malformed {
                    line,
                    detail: format!("expected `pos <j>` followed by {dim} coordinate(s)"),
                });
            }
            let j = parse_index(line, tokens[1], "a vertex index")?;
            if j < 1 || j > vertices {
                return Err(SceneError::VertexRange {
                    line,
                    index: j,
                    count: vertices,
                });
            }
            if seen_pos[j - 1] {
                return Err(SceneError::DuplicatePos { line, index: j });
            }
            seen_pos[j - 1] = true;
            for (c, token) in tokens[2..].iter().enumerate() {
                positions[(j - 1) * dim + c] = parse_coord(line, token)?;
            }
        }
        if let Some(index) = seen_pos.iter().position(|&seen| !seen) {
            return Err(SceneError::MissingPos { index: index + 1 });
        }

        // Displacement lines: optional, but all-or-none per (edge, slot).
        let slots = edges.len() * n;
        let mut displacements = vec![0.0; slots * dim];
        let mut seen_disp = vec![false; slots];
        let mut any_disp = false;
        while let Some(&(line, text)) = lines.get(at) {
            let tokens: Vec<&str> = text.split_whitespace().collect();
            if tokens.first() != Some(&"disp") {
                return Err(SceneError::Expected {
                    line,
                    expected: "`disp <i> <j> ...` or end of file",
                    found: text.to_string(),
                });
            }
            at += 1;
            if tokens.len() != 3 + dim {
                return Err(SceneError::Malformed {
                    line,
                    detail: format!("expected `disp <i> <j>` followed by {dim} coordinate(s)"),
                });
            }
            let i = parse_index(line, tokens[1], "an edge index")?;
            let j = parse_index(line, tokens[2], "a slot index")?;
            if i < 1 || i > edges.len() || j < 1 || j > n {
                return Err(SceneError::DispRange {
                    line,
                    i,
                    j,
                    edges: edges.len(),
                    slots: n,
                });
            }
            let flat = (i - 1) * n + (j - 1);
            if seen_disp[flat] {
                return Err(SceneError::DuplicateDisp { line, i, j });
            }
            seen_disp[flat] = true;
            any_disp = true;
            for (c, token) in tokens[3..].iter().enumerate() {
                displacements[flat * dim + c] = parse_coord(line, token)?;
            }
        }
        let displacements = if any_disp {
            if let Some(flat) = seen_disp.iter().position(|&seen| !seen) {
                return Err(SceneError::MissingDisp {
                    i: flat / n + 1,
                    j: flat % n + 1,
                });
            }
            Some(displacements)
        } else {
            None
        };

        Ok(SceneFile {
            dim,
            vertices,
            edges,
            n,
            positions,
            displacements,
        })
    }

    /// Canonical text form; reparsing it reproduces `self` exactly
    /// (coordinates are written with 17 significant digits).
    pub fn to_text(&self) -> String {
        let mut out = String::from("gyr-scene v1\n");
        let _ = writeln!(out, "dim {}", self.dim);
        let _ = writeln!(out, "vertices {}", self.vertices);
        for &(tail, head) in &self.edges {
            let _ = writeln!(out, "edge {tail} {head}");
        }
        let _ = writeln!(out, "n {}", self.n);
        for j in 1..=self.vertices {
            let _ = write!(out, "pos {j}");
            for c in 0..self.dim {
                let _ = write!(out, " {:.16e}", self.positions[(j - 1) * self.dim + c]);
            }
            out.push('\n');
        }
        if let Some(table) = &self.displacements {
            for i in 1..=self.edges.len() {
                for j in 1..=self.n {
                    let _ = write!(out, "disp {i} {j}");
                    let flat = (i - 1) * self.n + (j - 1);
                    for c in 0..self.dim {
                        let _ = write!(out, " {:.16e}", table[flat * self.dim + c]);
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    /// Structure displacement of edge `i`: `pos(head) − pos(tail)`.
    pub fn edge_displacement(&self, i: usize) -> Vec<f64> {
        let (tail, head) = self.edges[i - 1];
        (0..self.dim)
            .map(|c| {
                self.positions[(head - 1) * self.dim + c]
                    - self.positions[(tail - 1) * self.dim + c]
            })
            .collect()
    }

    /// Even-split displacement table: every slot of edge `i` carries
    /// `(pos(head) − pos(tail)) / n`.
    pub fn straight_displacements(&self) -> Vec<f64> {
        let mut table = Vec::with_capacity(self.edges.len() * self.n * self.dim);
        for i in 1..=self.edges.len() {
            let share: Vec<f64> = self
                .edge_displacement(i)
                .into_iter()
                .map(|c| c / self.n as f64)
                .collect();
            for _ in 0..self.n {
                table.extend_from_slice(&share);
            }
        }
        table
    }
}
