//! Tuple ranking shared across carriers, universes and frames: row-major
//! with the last coordinate fastest, so slices along the final axis are
//! contiguous.

/// Rank of a tuple whose coordinates all range over `m`.
#[inline]
pub fn rank(tuple: &[usize], m: usize) -> usize {
    tuple.iter().fold(0, |acc, &x| acc * m + x)
}

/// All tuples of the given arity over `m` values, in rank order. Arity 0
/// yields the single empty tuple; an empty range yields none.
pub fn tuples(m: usize, arity: usize) -> Vec<Vec<usize>> {
    if arity == 0 {
        return vec![Vec::new()];
    }
    if m == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(m.pow(arity as u32));
    let mut cur = vec![0usize; arity];
    loop {
        out.push(cur.clone());
        let mut i = arity;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < m {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// All index tuples over mixed sizes, row-major.
pub fn mixed_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for t in &out {
            for x in 0..s {
                let mut t2 = t.clone();
                t2.push(x);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_inverts_tuples() {
        for (i, t) in tuples(3, 2).iter().enumerate() {
            assert_eq!(rank(t, 3), i);
        }
        assert_eq!(tuples(3, 0), vec![Vec::<usize>::new()]);
        assert!(tuples(0, 2).is_empty());
    }
}
