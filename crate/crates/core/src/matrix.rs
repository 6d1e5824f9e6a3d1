//! Homomorphism matrices `(hom(F_i, F_j))_{i,j}`, their exact rank, and
//! detection of patterns whose rows are rational combinations of others.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::hom::{count_hom_with, CountOptions, HomCount};
use crate::pattern::PatternSet;

/// Largest matrix for which minimal dependent subsets are enumerated.
pub const MAX_CIRCUIT_SEARCH: usize = 16;

#[derive(Clone, Debug, Serialize)]
pub struct HomMatrix {
    pub names: Vec<String>,
    pub entries: Vec<Vec<HomCount>>,
}

impl HomMatrix {
    /// Wraps a literal matrix (for example one printed elsewhere) without
    /// recomputing anything. Must be square with nonnegative entries.
    pub fn literal(names: Vec<String>, entries: Vec<Vec<BigUint>>) -> Result<Self> {
        let m = entries.len();
        if names.len() != m || entries.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument(format!(
                "literal matrix must be square with {} names",
                names.len()
            )));
        }
        Ok(HomMatrix {
            names,
            entries: entries
                .into_iter()
                .map(|r| r.into_iter().map(HomCount::new).collect())
                .collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn to_integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|c| BigInt::from(c.value().clone())).collect())
            .collect()
    }

    pub fn rank(&self) -> usize {
        exact_rank(&self.to_integer_rows())
    }

    /// Header row of pattern names, then one labelled row per pattern.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (name, row) in self.names.iter().zip(&self.entries) {
            out.push_str(name);
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }

    /// Principal submatrix on `keep`.
    pub fn restrict(&self, keep: &[usize]) -> HomMatrix {
        HomMatrix {
            names: keep.iter().map(|&i| self.names[i].clone()).collect(),
            entries: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
        }
    }
}

pub fn build_hom_matrix(patterns: &PatternSet) -> Result<HomMatrix> {
    build_hom_matrix_with(patterns, &CountOptions::default())
}

pub fn build_hom_matrix_with(patterns: &PatternSet, opts: &CountOptions) -> Result<HomMatrix> {
    let ps = patterns.patterns();
    let m = ps.len();
    let cells: Vec<HomCount> = (0..m * m)
        .into_par_iter()
        .map(|k| count_hom_with(&ps[k / m].graph, &ps[k % m].graph, opts))
        .collect::<Result<_>>()?;
    let entries: Vec<Vec<HomCount>> = cells.chunks(m).map(<[HomCount]>::to_vec).collect();
    debug_assert!((0..m).all(|i| !entries[i][i].is_zero()));
    Ok(HomMatrix {
        names: patterns.names(),
        entries,
    })
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
///
/// After `k` pivots every remaining entry is a `(k+1)`-minor of the input,
/// so each division by the previous pivot is exact.
pub fn exact_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(pivot) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..nrows {
            for c in col + 1..ncols {
                let num = &a[r][c] * &a[rank][col] - &a[r][col] * &a[rank][c];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                a[r][c] = num / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, Serialize)]
pub struct RedundancyReport {
    pub rank: usize,
    /// Patterns whose row lies in the span of the other rows.
    pub dependent: Vec<usize>,
    /// Minimal linearly dependent row sets (empty when the matrix exceeds
    /// [`MAX_CIRCUIT_SEARCH`]).
    pub circuits: Vec<Vec<usize>>,
    /// Suggested reduced pattern set; its principal submatrix has rank
    /// `rank`.
    pub keep: Vec<usize>,
    pub dropped: Vec<usize>,
    pub reduced_rank: usize,
}

/// Analyses linear redundancy. The pattern set itself is never modified.
pub fn find_redundant_patterns(m: &HomMatrix) -> RedundancyReport {
    let rows = m.to_integer_rows();
    let n = rows.len();
    let row_rank = |idx: &[usize]| -> usize {
        let sub: Vec<Vec<BigInt>> = idx.iter().map(|&i| rows[i].clone()).collect();
        exact_rank(&sub)
    };
    let principal_rank = |idx: &[usize]| -> usize {
        let sub: Vec<Vec<BigInt>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| rows[i][j].clone()).collect())
            .collect();
        exact_rank(&sub)
    };
    let all: Vec<usize> = (0..n).collect();
    let rank = row_rank(&all);

    let dependent: Vec<usize> = (0..n)
        .filter(|&i| {
            let others: Vec<usize> = all.iter().copied().filter(|&j| j != i).collect();
            row_rank(&others) == rank
        })
        .collect();

    let mut circuits = Vec::new();
    if n <= MAX_CIRCUIT_SEARCH && rank < n {
        let mut subsets: Vec<u32> = (1u32..1 << n).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        for mask in subsets {
            let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if circuits
                .iter()
                .any(|c: &Vec<usize>| c.iter().all(|i| idx.contains(i)))
            {
                continue;
            }
            if row_rank(&idx) == idx.len() - 1 {
                circuits.push(idx);
            }
        }
    }

    let mut keep: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut trial = keep.clone();
        trial.push(i);
        if principal_rank(&trial) == trial.len() {
            keep = trial;
        }
    }
    if keep.len() < rank && n <= MAX_CIRCUIT_SEARCH {
        // greedy prefix choice failed; look for any nonsingular principal
        // submatrix of full size
        if let Some(mask) = (1u32..1 << n)
            .filter(|s| s.count_ones() as usize == rank)
            .find(|&s| {
                let idx: Vec<usize> = (0..n).filter(|&i| s >> i & 1 == 1).collect();
                principal_rank(&idx) == rank
            })
        {
            keep = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        }
    }
    let dropped = (0..n).filter(|i| !keep.contains(i)).collect();
    let reduced_rank = principal_rank(&keep);
    RedundancyReport {
        rank,
        dependent,
        circuits,
        keep,
        dropped,
        reduced_rank,
    }
}

/// Reads a matrix in the [`HomMatrix::to_csv`] layout. Header and row
/// labels are optional; missing names become `F1, F2, …`.
pub fn parse_matrix_csv(text: &str) -> std::result::Result<HomMatrix, ParseError> {
    let mut lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split(',').map(str::trim).collect()))
        .collect();
    let is_number = |s: &str| s.parse::<BigInt>().is_ok();
    let header: Option<Vec<String>> = match lines.first() {
        Some((_, cells)) if !cells.iter().all(|c| is_number(c)) => {
            let (_, cells) = lines.remove(0);
            Some(cells.iter().map(|s| s.to_string()).collect())
        }
        _ => None,
    };
    let mut names = Vec::new();
    let mut entries = Vec::new();
    for (line, cells) in &lines {
        let (label, values) = if cells.first().is_some_and(|c| !is_number(c)) {
            (Some(cells[0].to_string()), &cells[1..])
        } else {
            (None, &cells[..])
        };
        let row = values
            .iter()
            .map(|v| {
                v.parse::<BigUint>().map_err(|_| ParseError::Syntax {
                    line: *line,
                    msg: format!("expected nonnegative integer, found '{v}'"),
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        names.push(label.unwrap_or_else(|| format!("F{}", names.len() + 1)));
        entries.push(row);
    }
    if let Some(h) = header {
        // a leading corner cell ("pattern") is dropped
        let h = if h.len() == names.len() + 1 {
            &h[1..]
        } else {
            &h[..]
        };
        if h.len() != names.len() {
            return Err(ParseError::Syntax {
                line: 1,
                msg: "header width does not match rows".into(),
            });
        }
        names = h.to_vec();
    }
    let m = entries.len();
    if let Some((i, r)) = entries.iter().enumerate().find(|(_, r)| r.len() != m) {
        return Err(ParseError::Syntax {
            line: lines[i].0,
            msg: format!(
                "row has {} entries, expected {m} (matrix must be square)",
                r.len()
            ),
        });
    }
    Ok(HomMatrix {
        names,
        entries: entries
            .into_iter()
            .map(|r| r.into_iter().map(HomCount::new).collect())
            .collect(),
    })
}

/// `true` iff the square matrix has full rank.
pub fn is_nonsingular(m: &HomMatrix) -> bool {
    m.rank() == m.size()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::PatternSet;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn literal(rows: &[&[u64]]) -> HomMatrix {
        let names = (0..rows.len()).map(|i| format!("F{i}")).collect();
        HomMatrix::literal(
            names,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn printed_three_by_three_has_rank_two() {
        assert_eq!(
            exact_rank(&ints(&[&[6, 0, 0], &[24, 16, 32], &[18, 14, 28]])),
            2
        );
        assert_eq!(
            exact_rank(&ints(&[&[6, 0, 0], &[24, 16, 32], &[18, 14, 32]])),
            3
        );
    }

    #[test]
    fn rank_edge_cases() {
        assert_eq!(exact_rank(&[]), 0);
        assert_eq!(exact_rank(&ints(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(exact_rank(&ints(&[&[0, 1], &[1, 0]])), 2);
        assert_eq!(exact_rank(&ints(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(exact_rank(&ints(&[&[0, 2, 3], &[0, 4, 7], &[0, 0, 0]])), 2);
    }

    #[test]
    fn singleton_and_pair_have_no_redundancy() {
        let k3 = build_hom_matrix(&PatternSet::from_names("K3").unwrap()).unwrap();
        assert_eq!(k3.entries, vec![vec![HomCount::from(6)]]);
        let r = find_redundant_patterns(&k3);
        assert_eq!((r.rank, r.dropped.len()), (1, 0));

        let pair = build_hom_matrix(&PatternSet::from_names("P2,P3").unwrap()).unwrap();
        let r = find_redundant_patterns(&pair);
        assert_eq!(r.rank, 2);
        assert!(r.dependent.is_empty() && r.dropped.is_empty() && r.circuits.is_empty());
    }

    #[test]
    fn printed_matrix_flags_c4() {
        let mut m = literal(&[&[6, 0, 0], &[24, 16, 32], &[18, 14, 28]]);
        m.names = vec!["K3".into(), "P4".into(), "C4".into()];
        let r = find_redundant_patterns(&m);
        assert_eq!(r.rank, 2);
        assert_eq!(r.keep, vec![0, 1]);
        assert_eq!(r.dropped, vec![2]);
        assert_eq!(r.reduced_rank, 2);
        assert_eq!(r.circuits, vec![vec![0, 1, 2]]);
        assert_eq!(r.dependent, vec![0, 1, 2]);
    }

    #[test]
    fn reduced_set_falls_back_when_prefix_fails() {
        let m = literal(&[&[0, 1], &[1, 0]]);
        let r = find_redundant_patterns(&m);
        assert_eq!(r.rank, 2);
        assert_eq!(r.keep, vec![0, 1]);
        assert_eq!(r.reduced_rank, 2);
    }

    #[test]
    fn csv_round_trip() {
        let m = build_hom_matrix(&PatternSet::from_names("P2,P3,K3").unwrap()).unwrap();
        let csv = m.to_csv();
        assert_eq!(csv, "pattern,P2,P3,K3\nP2,2,4,6\nP3,2,6,12\nK3,0,0,6\n");
        let back = parse_matrix_csv(&csv).unwrap();
        assert_eq!(back.names, m.names);
        assert_eq!(back.entries, m.entries);
        let bare = parse_matrix_csv("6,0,0\n24,16,32\n18,14,28\n").unwrap();
        assert_eq!(bare.rank(), 2);
        assert_eq!(bare.names, vec!["F1", "F2", "F3"]);
        assert!(parse_matrix_csv("1,2\n3\n").is_err());
        assert!(parse_matrix_csv("1,-2\n3,4\n").is_err());
    }
}
