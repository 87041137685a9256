use serde::{Deserialize, Serialize};

use crate::error::{FkError, Result};
use crate::matchkit::lcs::lcs_pairs_by;
use crate::matchkit::Match;
use crate::scalar::Scalar;

use super::approx::GoodApproximation;

/// A match between `x_0 = Γ[x_start]` and `z_0 = Λ[z_start]` built from a projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedMatch<S> {
    pub matching: Match<S>,
    pub x_start: usize,
    pub z_start: usize,
}

/// Anchors of the unrolled projection: positions `θ(s)` in `x_0, …, x_{p−1}`
/// of the points of `Δ`, with their `Λ`-phases `ψ(y_s)`.
struct Unrolled {
    theta: Vec<usize>,
    psis: Vec<usize>,
    x0: usize,
    z0: usize,
}

fn unroll<S: Scalar>(ga: &GoodApproximation<S>, p: usize, q: usize) -> Result<Unrolled> {
    let big = ga.gamma_period;
    if q != ga.lambda_period || q == 0 {
        return Err(FkError::InvalidPeriods(format!("q = {q} but |Λ| = {}", ga.lambda_period)));
    }
    if p == 0 || !p.is_multiple_of(big) || !p.is_multiple_of(q) {
        return Err(FkError::InvalidPeriods(format!("p = {p} is not a common multiple of {big} and {q}")));
    }
    if ga.delta_set.is_empty() || ga.delta_set.len() != ga.psi.len() {
        return Err(FkError::InvalidPeriods("empty projection domain".into()));
    }
    let (x0, z0) = (ga.delta_set[0], ga.psi[0]);
    let mut phase_psi = vec![None; big];
    for (&d, &l) in ga.delta_set.iter().zip(&ga.psi) {
        phase_psi[d] = Some(l);
    }
    let (theta, psis) = (0..p).filter_map(|j| phase_psi[(x0 + j) % big].map(|l| (j, l))).unzip();
    Ok(Unrolled { theta, psis, x0, z0 })
}

/// Turns a `(γ, κ)`-projection into a `(p + q, γ)`-match.
///
/// Every `y_s ∈ Δ` certifies the pairs `θ(s) + i ↦ j` for `i < q` and every `j`
/// with `z_j` at phase `ψ(y_s) + i`, since `T^i y_s` stays `γ`-close to
/// `T^i ψ(y_s)`. The result is a longest increasing chain of certified pairs,
/// so it contains at least as many pairs as [`inductive_projection_match`]
/// and never more than an unrestricted maximal match.
pub fn projection_to_match<S: Scalar>(ga: &GoodApproximation<S>, p: usize, q: usize) -> Result<ProjectedMatch<S>> {
    let u = unroll(ga, p, q)?;
    let n = p + q;
    let words = q.div_ceil(64);
    // Row j holds the Λ-phases certified at x_j.
    let mut rows = vec![0u64; n * words];
    for (&th, &l) in u.theta.iter().zip(&u.psis) {
        for i in 0..q.min(n - th) {
            let ph = (l + i) % q;
            rows[(th + i) * words + ph / 64] |= 1 << (ph % 64);
        }
    }
    let pairs = lcs_pairs_by(n, n, |j, k| {
        let ph = (u.z0 + k) % q;
        rows[j * words + ph / 64] >> (ph % 64) & 1 == 1
    });
    Ok(ProjectedMatch { matching: Match { pairs, n, delta: ga.gamma }, x_start: u.x0, z_start: u.z0 })
}

/// The step-by-step re-anchoring construction.
///
/// Start at `x_0 = y_0 ∈ Δ`, `z_0 = ψ(y_0)`. From the current anchor `y_s`
/// matched to `z_a` with `a ≤ θ(s)`, copy the next `q` steps (`θ(s) + i ↦ a + i`).
/// Then jump to the first `y_t ∈ Δ` past that run, pick the least `ℓ ∈ [1, q]`
/// with `z_{θ(s)+ℓ} = ψ(y_t)` by `q`-periodicity, drop the pairs whose images
/// reach `θ(s) + ℓ` (at most `q − 1` of them) and anchor `θ(t) ↦ θ(s) + ℓ`.
///
/// The dropped pairs can include points of `Δ`, so the fit may fall short of
/// `κ p`; [`projection_to_match`] does not have that problem.
pub fn inductive_projection_match<S: Scalar>(ga: &GoodApproximation<S>, p: usize, q: usize) -> Result<ProjectedMatch<S>> {
    let Unrolled { theta, psis, x0, z0 } = unroll(ga, p, q)?;
    let n = p + q;
    let mut pairs: Vec<(usize, usize)> = vec![(0, 0)];
    let (mut s, mut a) = (0usize, 0usize);
    loop {
        for i in 1..q {
            let d = theta[s] + i;
            if d < n && a + i < n {
                pairs.push((d, a + i));
            }
        }
        let t = theta.partition_point(|&th| th < theta[s] + q);
        if t == theta.len() {
            break;
        }
        let phase = (z0 + theta[s]) % q;
        let mut ell = (psis[t] + q - phase) % q;
        if ell == 0 {
            ell = q;
        }
        let b = theta[s] + ell;
        while pairs.last().is_some_and(|&(_, img)| img >= b) {
            pairs.pop();
        }
        pairs.push((theta[t], b));
        s = t;
        a = b;
    }
    Ok(ProjectedMatch { matching: Match { pairs, n, delta: ga.gamma }, x_start: x0, z_start: z0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gikn::{verify_good_approximation_words, GoodApproximation};
    use crate::matchkit::{max_match, MatchMode};
    use crate::seqcore::{parse_word, FullShift, PeriodicOrbit};

    fn check(ga: &GoodApproximation<f64>, gw: &[u8], lw: &[u8], p: usize) -> usize {
        let q = lw.len();
        let pm = projection_to_match(ga, p, q).unwrap();
        let shift = FullShift::binary();
        let (g, l) = (PeriodicOrbit::from_word(gw).unwrap(), PeriodicOrbit::from_word(lw).unwrap());
        let x = g.segment(pm.x_start, p + q);
        let z = l.segment(pm.z_start, p + q);
        pm.matching.validate(&shift, &x, &z).unwrap();
        let ind = inductive_projection_match(ga, p, q).unwrap();
        ind.matching.validate(&shift, &x, &z).unwrap();
        assert!(ind.matching.fit() <= pm.matching.fit());
        let best = max_match(&shift, &x, &z, p + q, ga.gamma, MatchMode::Dp).unwrap();
        assert!(pm.matching.fit() <= best.fit());
        pm.matching.fit()
    }

    #[test]
    fn full_projection_gives_full_fit() {
        let shift = FullShift::binary();
        let w = parse_word("0010111").unwrap();
        let ga = verify_good_approximation_words(&shift, &w, &w, 0.1f64, 1.0).unwrap();
        assert!(check(&ga, &w, &w, 7) >= 7);
    }

    #[test]
    fn periodic_copy_example() {
        let shift = FullShift::binary();
        let big = parse_word(&format!("{}11", "01".repeat(8))).unwrap();
        let small = parse_word("01").unwrap();
        let ga = verify_good_approximation_words(&shift, &big, &small, 0.125f64, 0.5).unwrap();
        for mult in [1, 2, 3] {
            let p = 18 * mult;
            assert!(check(&ga, &big, &small, p) as f64 >= ga.kappa * p as f64);
        }
    }

    #[test]
    fn reanchoring_can_drop_projected_points() {
        let shift = FullShift::binary();
        let big = parse_word("101010101000101010").unwrap();
        let small = parse_word("10").unwrap();
        let ga = verify_good_approximation_words(&shift, &big, &small, 0.5f64, 0.5).unwrap();
        assert_eq!(ga.delta_set.len(), 14);
        let p = 72;
        let ind = inductive_projection_match(&ga, p, 2).unwrap();
        assert_eq!(ind.matching.fit(), 49);
        assert!(check(&ga, &big, &small, p) >= 56);
    }

    #[test]
    fn rejects_bad_periods() {
        let shift = FullShift::binary();
        let w = parse_word("011").unwrap();
        let ga = verify_good_approximation_words(&shift, &w, &w, 0.1f64, 1.0).unwrap();
        assert!(matches!(projection_to_match(&ga, 4, 3), Err(FkError::InvalidPeriods(_))));
        assert!(matches!(projection_to_match(&ga, 3, 2), Err(FkError::InvalidPeriods(_))));
    }
}
