use crate::state::BsrSet;
use crate::symbol::Alternate;

/// All ways the BSR set splits `alternate` over `[l, r)`.
///
/// A split of an alternate with `n > 0` symbols is `[p_1, …, p_n, r]` with
/// `p_1 = l`, symbol `i` spanning `[p_i, p_{i+1})`. The epsilon alternate has
/// the single split `[]` when `l = r` and its element is present. Splits are
/// returned in lexicographic order.
pub fn enumerate_splits(
    alternate: Alternate,
    l: usize,
    r: usize,
    bsrs: &BsrSet,
) -> Vec<Vec<usize>> {
    let n = alternate.len();
    if n == 0 {
        let present = l == r
            && bsrs
                .raw_pivots(alternate.first_slot(), l, l)
                .contains(&(l as u32));
        return if present {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    let mut bounds = vec![0usize; n + 1];
    bounds[n] = r;
    walk(alternate, l, n, &mut bounds, bsrs, &mut out);
    out.sort();
    out
}

fn walk(
    alternate: Alternate,
    l: usize,
    dot: usize,
    bounds: &mut Vec<usize>,
    bsrs: &BsrSet,
    out: &mut Vec<Vec<usize>>,
) {
    let right = bounds[dot];
    for &k in bsrs.raw_pivots(alternate.slot(dot), l, right) {
        let k = k as usize;
        bounds[dot - 1] = k;
        if dot == 1 {
            if k == l {
                out.push(bounds.clone());
            }
        } else {
            walk(alternate, l, dot - 1, bounds, bsrs, out);
        }
    }
}
