//! Brute-force free cumulants by Moebius inversion over non-crossing
//! partitions. Kept independent of the series machinery on purpose.

use super::MomentData;
use crate::error::{Error, Result};

/// `|NC(10)| = 16796`; larger lattices are not enumerated.
pub const NC_ORACLE_MAX_ORDER: usize = 10;

/// All non-crossing partitions of `{0..n}`, each as a list of blocks with
/// increasing elements.
pub fn noncrossing_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    set_partitions(&mut rgs, 0, 0, &mut |labels| {
        let blocks = blocks_of(labels);
        if !is_crossing(labels) {
            out.push(blocks);
        }
    });
    out
}

// Enumerates restricted growth strings: labels[i] <= 1 + max(labels[..i]).
fn set_partitions(labels: &mut [usize], i: usize, max: usize, visit: &mut dyn FnMut(&[usize])) {
    if i == labels.len() {
        visit(labels);
        return;
    }
    let top = if i == 0 { 0 } else { max + 1 };
    for b in 0..=top {
        labels[i] = b;
        set_partitions(labels, i + 1, max.max(b), visit);
    }
}

fn blocks_of(labels: &[usize]) -> Vec<Vec<usize>> {
    let nblocks = labels.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); nblocks];
    for (i, &b) in labels.iter().enumerate() {
        blocks[b].push(i);
    }
    blocks
}

// a < b < c < d with a, c in one block and b, d in another.
fn is_crossing(labels: &[usize]) -> bool {
    let n = labels.len();
    for a in 0..n {
        for b in a + 1..n {
            if labels[b] == labels[a] {
                continue;
            }
            for cc in b + 1..n {
                if labels[cc] != labels[a] {
                    continue;
                }
                if (cc + 1..n).any(|d| labels[d] == labels[b]) {
                    return true;
                }
            }
        }
    }
    false
}

/// Block sizes of the Kreweras complement, read off the cycles of
/// `pi^{-1} gamma` with `gamma = (0 1 ... n-1)`.
fn kreweras_block_sizes(blocks: &[Vec<usize>], n: usize) -> Vec<usize> {
    // pi maps each element to the next one in its block, cyclically.
    let mut pi_inv = vec![0usize; n];
    for block in blocks {
        for (j, &e) in block.iter().enumerate() {
            let next = block[(j + 1) % block.len()];
            pi_inv[next] = e;
        }
    }
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut e = start;
        while !seen[e] {
            seen[e] = true;
            len += 1;
            e = pi_inv[(e + 1) % n];
        }
        sizes.push(len);
    }
    sizes
}

fn catalan(n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64)
}

/// `kappa_n = sum over NC(n) of mu(pi, 1_n) m_pi`, with the Moebius function
/// given by the signed Catalan numbers of the Kreweras complement blocks.
pub fn nc_cumulant_oracle(m: &MomentData, n: usize) -> Result<f64> {
    if n > NC_ORACLE_MAX_ORDER {
        return Err(Error::OrderTooLarge { order: n, cap: NC_ORACLE_MAX_ORDER });
    }
    if n == 0 || n > m.order() {
        return Err(Error::InvalidInput(format!("need 1 <= n <= {}, got {n}", m.order())));
    }
    let mut kappa = 0.0;
    for blocks in noncrossing_partitions(n) {
        let m_pi: f64 = blocks.iter().map(|b| m.m[b.len() - 1]).product();
        let mu: f64 = kreweras_block_sizes(&blocks, n)
            .into_iter()
            .map(|l| if l % 2 == 1 { catalan(l - 1) } else { -catalan(l - 1) })
            .product();
        kappa += mu * m_pi;
    }
    Ok(kappa)
}
