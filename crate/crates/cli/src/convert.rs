//! Shortest conversion path between transform kinds.

use std::collections::{HashMap, VecDeque};

use ringlab_core::transforms::{
    a_from_r, a_to_k, cumulants_from_moments, k_from_s, k_to_a, moments_from_cumulants, r_from_a, r_to_s,
    s_from_a, s_from_k, s_to_r,
};
use ringlab_core::{CumulantData, DeterminingSequence, MomentData, Result, TransformKind, TransformSeries};

use TransformKind::*;

type Edge = fn(&TransformSeries) -> Result<TransformSeries>;

fn edges() -> Vec<(TransformKind, TransformKind, Edge)> {
    vec![
        (M, R, |t| Ok(cumulants_from_moments(&MomentData::from_transform(t)?).to_transform())),
        (R, M, |t| Ok(moments_from_cumulants(&CumulantData::from_transform(t)?).to_transform())),
        (M, G, TransformSeries::g_from_m),
        (G, M, TransformSeries::m_from_g),
        (R, B, TransformSeries::b_from_r),
        (B, R, TransformSeries::r_from_b),
        (R, S, r_to_s),
        (S, R, s_to_r),
        (A, K, |t| a_to_k(&DeterminingSequence::from_transform(t)?)),
        (K, A, |t| Ok(k_to_a(t)?.to_transform())),
        (A, S, |t| s_from_a(&DeterminingSequence::from_transform(t)?)),
        (K, S, s_from_k),
        (S, K, k_from_s),
        (A, R, |t| r_from_a(&DeterminingSequence::from_transform(t)?)),
        (R, A, |t| Ok(a_from_r(t)?.to_transform())),
    ]
}

/// Kinds visited from `from` to `to`, both included.
pub fn path(from: TransformKind, to: TransformKind) -> Option<Vec<TransformKind>> {
    let edges = edges();
    let mut prev: HashMap<TransformKind, TransformKind> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    while let Some(k) = queue.pop_front() {
        if k == to {
            let mut out = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[&cur];
                out.push(cur);
            }
            out.reverse();
            return Some(out);
        }
        for (a, b, _) in &edges {
            if *a == k && *b != from && !prev.contains_key(b) {
                prev.insert(*b, k);
                queue.push_back(*b);
            }
        }
    }
    None
}

pub fn convert(input: &TransformSeries, to: TransformKind) -> Result<TransformSeries> {
    let route = path(input.kind, to).ok_or_else(|| {
        ringlab_core::Error::InvalidInput(format!("no conversion from {} to {to}", input.kind))
    })?;
    let edges = edges();
    let mut cur = input.clone();
    for pair in route.windows(2) {
        let (_, _, f) = edges.iter().find(|(a, b, _)| *a == pair[0] && *b == pair[1]).expect("edge on the path");
        cur = f(&cur)?;
    }
    Ok(cur)
}
