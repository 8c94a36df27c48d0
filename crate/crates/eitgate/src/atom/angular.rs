//! Angular-momentum coefficients.
//!
//! All angular momenta are passed doubled (`tj = 2j`) so half-integers stay
//! exact. Wigner symbols use the Racah closed forms; the factorials involved
//! never exceed ~40! for alkali hyperfine structure, well inside f64 range.

fn fact(n: i32) -> f64 {
    debug_assert!(n >= 0);
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn is_even(x: i32) -> bool {
    x % 2 == 0
}

fn sign(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn triangle(ta: i32, tb: i32, tc: i32) -> bool {
    ta >= 0
        && tb >= 0
        && tc >= 0
        && tc <= ta + tb
        && tc >= (ta - tb).abs()
        && is_even(ta + tb + tc)
}

/// Δ(abc) with doubled arguments; caller guarantees the triangle condition.
fn delta(ta: i32, tb: i32, tc: i32) -> f64 {
    fact((ta + tb - tc) / 2) * fact((ta - tb + tc) / 2) * fact((-ta + tb + tc) / 2)
        / fact((ta + tb + tc) / 2 + 1)
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3).
pub fn wigner_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    if tm1 + tm2 + tm3 != 0 || !triangle(tj1, tj2, tj3) {
        return 0.0;
    }
    for (tj, tm) in [(tj1, tm1), (tj2, tm2), (tj3, tm3)] {
        if tm.abs() > tj || !is_even(tj + tm) {
            return 0.0;
        }
    }
    // integer combinations used by the Racah sum
    let a = (tj1 + tj2 - tj3) / 2;
    let b = (tj1 - tm1) / 2;
    let c = (tj2 + tm2) / 2;
    let d = (tj3 - tj2 + tm1) / 2;
    let e = (tj3 - tj1 - tm2) / 2;
    let kmin = 0.max(-d).max(-e);
    let kmax = a.min(b).min(c);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        sum += sign(k)
            / (fact(k) * fact(a - k) * fact(b - k) * fact(c - k) * fact(d + k) * fact(e + k));
    }
    let pre = delta(tj1, tj2, tj3).sqrt()
        * (fact((tj1 + tm1) / 2)
            * fact((tj1 - tm1) / 2)
            * fact((tj2 + tm2) / 2)
            * fact((tj2 - tm2) / 2)
            * fact((tj3 + tm3) / 2)
            * fact((tj3 - tm3) / 2))
            .sqrt();
    sign((tj1 - tj2 - tm3) / 2) * pre * sum
}

/// Clebsch-Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩.
pub fn clebsch_gordan(tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
    if tm1 + tm2 != tm {
        return 0.0;
    }
    sign((tj1 - tj2 + tm) / 2) * ((tj + 1) as f64).sqrt() * wigner_3j(tj1, tj2, tj, tm1, tm2, -tm)
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
pub fn wigner_6j(tj1: i32, tj2: i32, tj3: i32, tj4: i32, tj5: i32, tj6: i32) -> f64 {
    if !(triangle(tj1, tj2, tj3)
        && triangle(tj1, tj5, tj6)
        && triangle(tj4, tj2, tj6)
        && triangle(tj4, tj5, tj3))
    {
        return 0.0;
    }
    let a1 = (tj1 + tj2 + tj3) / 2;
    let a2 = (tj1 + tj5 + tj6) / 2;
    let a3 = (tj4 + tj2 + tj6) / 2;
    let a4 = (tj4 + tj5 + tj3) / 2;
    let b1 = (tj1 + tj2 + tj4 + tj5) / 2;
    let b2 = (tj2 + tj3 + tj5 + tj6) / 2;
    let b3 = (tj3 + tj1 + tj6 + tj4) / 2;
    let tmin = a1.max(a2).max(a3).max(a4);
    let tmax = b1.min(b2).min(b3);
    let mut sum = 0.0;
    for t in tmin..=tmax {
        sum += sign(t) * fact(t + 1)
            / (fact(t - a1)
                * fact(t - a2)
                * fact(t - a3)
                * fact(t - a4)
                * fact(b1 - t)
                * fact(b2 - t)
                * fact(b3 - t));
    }
    let pre = (delta(tj1, tj2, tj3) * delta(tj1, tj5, tj6) * delta(tj4, tj2, tj6) * delta(tj4, tj5, tj3))
        .sqrt();
    pre * sum
}

/// Relative σ⁺ dipole amplitude |F, m⟩ → |F', m+1⟩ on a J → J' line.
///
/// Computed in the decoupled |J mJ⟩|I mI⟩ basis with a common reduced matrix
/// element, so relative signs between hyperfine components are preserved.
pub fn hyperfine_dipole_factor(ti: i32, tj: i32, tjp: i32, tf: i32, tm: i32, tfp: i32) -> f64 {
    let mut amp = 0.0;
    let mut tmj = -tj;
    while tmj <= tj {
        let tmi = tm - tmj;
        if tmi.abs() <= ti {
            let lower = clebsch_gordan(tj, tmj, ti, tmi, tf, tm);
            let dip = clebsch_gordan(tj, tmj, 2, 2, tjp, tmj + 2);
            let upper = clebsch_gordan(tjp, tmj + 2, ti, tmi, tfp, tm + 2);
            amp += lower * dip * upper;
        }
        tmj += 2;
    }
    amp
}

/// Relative σ⁺ amplitude from |F', m'⟩ (J' manifold) to the stretched
/// Rydberg state |J_r, m_J = J_r⟩|I, m_I⟩ with m_I fixed by m_J' = J_r − 1.
pub fn rydberg_dipole_factor(ti: i32, tjp: i32, tfp: i32, tmp: i32, tjr: i32) -> f64 {
    let tmj = tjr - 2;
    let tmi = tmp - tmj;
    if tmj.abs() > tjp || tmi.abs() > ti {
        return 0.0;
    }
    clebsch_gordan(tjp, tmj, ti, tmi, tfp, tmp) * clebsch_gordan(tjp, tmj, 2, 2, tjr, tjr)
}

/// Fraction of spontaneous decay from |F', m'⟩ into |F, m⟩ on a J' → J line.
///
/// Summed over all F and m the fractions add to one.
pub fn decay_fraction(ti: i32, tj: i32, tjp: i32, tfp: i32, tmp: i32, tf: i32, tm: i32) -> f64 {
    let tq = tmp - tm;
    if tq.abs() > 2 {
        return 0.0;
    }
    let six = wigner_6j(tj, tjp, 2, tfp, tf, ti);
    let cg = clebsch_gordan(tf, tm, 2, tq, tfp, tmp);
    ((tf + 1) * (tjp + 1)) as f64 * six * six * cg * cg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_j_known_values() {
        // (1 1 0; 0 0 0) = -1/sqrt(3)
        assert!((wigner_3j(2, 2, 0, 0, 0, 0) + 1.0 / 3f64.sqrt()).abs() < 1e-14);
        // (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
        assert!((wigner_3j(1, 1, 2, 1, -1, 0) - 1.0 / 6f64.sqrt()).abs() < 1e-14);
        assert_eq!(wigner_3j(2, 2, 2, 0, 0, 0), 0.0);
    }

    #[test]
    fn cg_spin_half_pair() {
        let s = 0.5f64.sqrt();
        assert!((clebsch_gordan(1, 1, 1, -1, 0, 0) - s).abs() < 1e-14);
        assert!((clebsch_gordan(1, -1, 1, 1, 0, 0) + s).abs() < 1e-14);
        assert!((clebsch_gordan(1, 1, 1, 1, 2, 2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn six_j_known_value() {
        // {1 1 1; 1 1 1} = 1/6
        assert!((wigner_6j(2, 2, 2, 2, 2, 2) - 1.0 / 6.0).abs() < 1e-14);
        // {1/2 1/2 1; 1/2 1/2 0} = 1/2
        assert!((wigner_6j(1, 1, 2, 1, 1, 0) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn decay_fractions_sum_to_one() {
        // Cs 6P3/2 F'=4 m'=1
        let mut total = 0.0;
        for tf in [6, 8] {
            let mut tm = -tf;
            while tm <= tf {
                total += decay_fraction(7, 1, 3, 8, 2, tf, tm);
                tm += 2;
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }
}
