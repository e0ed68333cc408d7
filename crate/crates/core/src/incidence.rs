//! Plain point/block incidence structures and their text format.
//!
//! ```text
//! v b k
//! <b lines of k ascending 0-based point ids>
//! ```

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    v: usize,
    blocks: Vec<Vec<usize>>,
    point_blocks: Vec<Vec<usize>>,
}

impl Incidence {
    pub fn new(v: usize, blocks: Vec<Vec<usize>>) -> Result<Incidence> {
        let mut point_blocks = vec![Vec::new(); v];
        for (i, b) in blocks.iter().enumerate() {
            if b.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::BadIncidence(format!("block {i} is not strictly ascending")));
            }
            for &p in b {
                if p >= v {
                    return Err(Error::BadIncidence(format!("block {i} uses point {p} >= v = {v}")));
                }
                point_blocks[p].push(i);
            }
        }
        Ok(Incidence {
            v,
            blocks,
            point_blocks,
        })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn blocks_through(&self, p: usize) -> &[usize] {
        &self.point_blocks[p]
    }

    /// The common block size, if all blocks have the same size.
    pub fn block_size(&self) -> Option<usize> {
        let k = self.blocks.first()?.len();
        self.blocks.iter().all(|b| b.len() == k).then_some(k)
    }

    /// The common number of blocks through a point, if constant.
    pub fn replication(&self) -> Option<usize> {
        let r = self.point_blocks.first()?.len();
        self.point_blocks.iter().all(|b| b.len() == r).then_some(r)
    }

    pub fn to_text(&self) -> String {
        let k = self.block_size().unwrap_or(0);
        let mut out = format!("{} {} {}\n", self.v, self.blocks.len(), k);
        for b in &self.blocks {
            let ids: Vec<String> = b.iter().map(|p| p.to_string()).collect();
            out.push_str(&ids.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Incidence> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines
            .next()
            .ok_or_else(|| Error::BadIncidence("empty file".into()))?;
        let nums = parse_ids(header, ln)?;
        let [v, b, k] = nums[..] else {
            return Err(Error::BadIncidence(format!("line {ln}: header needs `v b k`")));
        };
        let mut blocks = Vec::with_capacity(b);
        for (ln, line) in lines {
            let ids = parse_ids(line, ln)?;
            if ids.len() != k {
                return Err(Error::BadIncidence(format!(
                    "line {ln}: expected {k} points, found {}",
                    ids.len()
                )));
            }
            blocks.push(ids);
        }
        if blocks.len() != b {
            return Err(Error::BadIncidence(format!(
                "header promises {b} blocks, found {}",
                blocks.len()
            )));
        }
        Incidence::new(v, blocks)
    }

    pub fn read(path: &Path) -> Result<Incidence> {
        Incidence::parse(&std::fs::read_to_string(path)?)
    }
}

fn parse_ids(line: &str, ln: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::BadIncidence(format!("line {ln}: `{t}` is not an id")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_round_trip() {
        let blocks = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        let inc = Incidence::new(7, blocks).unwrap();
        assert_eq!(inc.replication(), Some(3));
        let text = inc.to_text();
        assert!(text.starts_with("7 7 3\n"));
        assert_eq!(Incidence::parse(&text).unwrap(), inc);
    }

    #[test]
    fn malformed() {
        assert!(Incidence::parse("").is_err());
        assert!(Incidence::parse("3 1 2\n0 1 2\n").is_err());
        assert!(Incidence::parse("3 2 2\n0 1\n").is_err());
        assert!(Incidence::parse("3 1 2\n1 0\n").is_err());
        assert!(Incidence::parse("3 1 2\n0 3\n").is_err());
        assert!(Incidence::parse("3 1\n0 1\n").is_err());
    }
}
