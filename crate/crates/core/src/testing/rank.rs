//! Wilcoxon-Mann-Whitney rank-sum statistic with midranks and the ties
//! correction of the standardised denominator.

use super::Sample;
use crate::{Error, Result};

/// Rank-sum statistic and its standardisation.
#[derive(Debug, Clone, PartialEq)]
pub struct WmwResult {
    /// Rank-sum W = Σ ranks of the first sample in the merged vector.
    pub w: f64,
    /// Mann-Whitney count u = W − n_x(n_x+1)/2, in 0..=n_x·n_y.
    pub u: f64,
    /// Standardised statistic; uses the ties-corrected denominator iff
    /// `ties_present`.
    pub z: f64,
    pub ties_present: bool,
    /// Sizes t_i of tied groups (groups of size 1 omitted).
    pub tie_multiplicities: Vec<usize>,
}

/// Midranks of `u`: tied values share the average of the ranks they span.
/// Returns the ranks and the tied-group sizes (t_i > 1 only).
pub fn rank_midranks(u: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let n = u.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u[a].partial_cmp(&u[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut multiplicities = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && u[order[j]] == u[order[i]] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        if j - i > 1 {
            multiplicities.push(j - i);
        }
        i = j;
    }
    (ranks, multiplicities)
}

/// Rank-sum statistic of `x` against `y`, standardised against N(0, 1).
pub fn wmw_statistic(x: &Sample, y: &Sample) -> Result<WmwResult> {
    let (nx, ny) = (x.len(), y.len());
    let mut merged = Vec::with_capacity(nx + ny);
    merged.extend_from_slice(x.values());
    merged.extend_from_slice(y.values());
    let (ranks, tie_multiplicities) = rank_midranks(&merged);

    let w: f64 = ranks[..nx].iter().sum();
    let (nxf, nyf) = (nx as f64, ny as f64);
    let u = w - nxf * (nxf + 1.0) / 2.0;
    let nt = nxf + nyf;

    let ties_present = !tie_multiplicities.is_empty();
    let var = if ties_present {
        let tie_term: f64 = tie_multiplicities
            .iter()
            .map(|&t| {
                let t = t as f64;
                t * t * t - t
            })
            .sum::<f64>()
            / (nt * (nt - 1.0));
        nxf * nyf / 12.0 * (nt + 1.0 - tie_term)
    } else {
        nxf * nyf * (nt + 1.0) / 12.0
    };
    if var <= 0.0 {
        // All pooled values identical: one tie group of size n_x+n_y.
        return Err(Error::DegenerateData);
    }
    let z = (u - 0.5 * nxf * nyf) / var.sqrt();
    Ok(WmwResult {
        w,
        u,
        z,
        ties_present,
        tie_multiplicities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn midranks_basic() {
        let (r, m) = rank_midranks(&[10.0, 20.0, 30.0]);
        assert_eq!(r, vec![1.0, 2.0, 3.0]);
        assert!(m.is_empty());

        let (r, m) = rank_midranks(&[5.0, 5.0, 7.0]);
        assert_eq!(r, vec![1.5, 1.5, 3.0]);
        assert_eq!(m, vec![2]);

        let (r, m) = rank_midranks(&[3.0, 3.0, 3.0, 3.0]);
        assert_eq!(r, vec![2.5; 4]);
        assert_eq!(m, vec![4]);
    }

    #[test]
    fn midranks_unsorted_input() {
        let (r, m) = rank_midranks(&[7.0, 5.0, 5.0]);
        assert_eq!(r, vec![3.0, 1.5, 1.5]);
        assert_eq!(m, vec![2]);
    }

    #[test]
    fn no_ties_example() {
        // x = {1,2}, y = {3,4}: W = 3, u = 0, z = -2/sqrt(5/3).
        let r = wmw_statistic(&s(&[1.0, 2.0]), &s(&[3.0, 4.0])).unwrap();
        assert_eq!(r.w, 3.0);
        assert_eq!(r.u, 0.0);
        assert!(!r.ties_present);
        assert!((r.z - (-2.0 / (5.0f64 / 3.0).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn swap_maps_u_to_complement() {
        let x = s(&[0.3, 2.0, 5.1]);
        let y = s(&[1.0, 4.4]);
        let a = wmw_statistic(&x, &y).unwrap();
        let b = wmw_statistic(&y, &x).unwrap();
        assert_eq!(a.u + b.u, (x.len() * y.len()) as f64);
        assert!((a.z + b.z).abs() < 1e-12);
    }

    #[test]
    fn ties_correction_applied() {
        // x = {1,1}, y = {1,2}: three 1s share midrank 2, so W = 4, u = 1,
        // and the corrected denominator is exactly 1.
        let r = wmw_statistic(&s(&[1.0, 1.0]), &s(&[1.0, 2.0])).unwrap();
        assert!(r.ties_present);
        assert_eq!(r.tie_multiplicities, vec![3]);
        assert_eq!(r.w, 4.0);
        assert_eq!(r.u, 1.0);
        assert!((r.z - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn all_identical_is_degenerate() {
        let r = wmw_statistic(&s(&[1.0, 1.0]), &s(&[1.0, 1.0]));
        assert_eq!(r, Err(Error::DegenerateData));
    }

    #[test]
    fn u_range() {
        let x = s(&[9.0, 10.0, 11.0]);
        let y = s(&[1.0, 2.0]);
        let r = wmw_statistic(&x, &y).unwrap();
        assert_eq!(r.u, 6.0); // all pairs have x > y → u = n_x·n_y
    }
}
