//! Fixtures shared by the property and acceptance suites.
#![allow(dead_code)]

use eitgate::atom::{Beam, Category, DecayChannel, DriveCoupling, Geometry, InteractionSpec, Level, LevelScheme};
use eitgate::dynamics::{CompositeSystem, DensityMatrix};
use eitgate::units::{ghz, mhz};
use num_complex::Complex64 as C64;
use rand::Rng;

pub fn coupling(lower: &str, upper: &str, rabi: f64, beam: Beam) -> DriveCoupling {
    DriveCoupling { lower: lower.into(), upper: upper.into(), peak_rabi: rabi, detuning: 0.0, beam, phase: 0.0 }
}

/// Lossless single-intermediate ladder with equal probe legs, q0 and q1
/// degenerate and r two-photon resonant: the ideal limit of the gate.
pub fn ideal_ladder() -> LevelScheme {
    LevelScheme {
        name: "ideal".into(),
        levels: vec![
            Level::new("q0", 0.0, Category::Computational),
            Level::new("q1", 0.0, Category::Computational),
            Level::new("e", ghz(1.0), Category::Intermediate),
            Level::new("r", 0.0, Category::Rydberg),
            Level::new("d", 0.0, Category::Leakage),
        ],
        decays: vec![],
        couplings: vec![
            coupling("q0", "e", mhz(45.0), Beam::Probe),
            coupling("q1", "e", mhz(45.0), Beam::Probe),
            coupling("e", "r", mhz(100.0), Beam::Coupling),
            coupling("q1", "r", mhz(2.0), Beam::Rydberg),
        ],
        light_shifts: vec![],
        reference_detuning: ghz(1.0),
        qubit_splitting: ghz(9.2),
        angular: None,
    }
}

/// q0, q1 and e driven on q1 ↔ e, with e decaying to both clock states
/// and a leakage sink.
pub fn decay_toy() -> CompositeSystem {
    let s = LevelScheme {
        name: "decay_toy".into(),
        levels: vec![
            Level::new("q0", 0.0, Category::Computational),
            Level::new("q1", 0.0, Category::Computational),
            Level::new("e", 0.0, Category::Intermediate),
            Level::new("d", 0.0, Category::Leakage),
        ],
        decays: vec![
            DecayChannel { from: "e".into(), to: "q0".into(), rate: mhz(0.3) },
            DecayChannel { from: "e".into(), to: "q1".into(), rate: mhz(0.2) },
            DecayChannel { from: "e".into(), to: "d".into(), rate: mhz(0.1) },
        ],
        couplings: vec![coupling("q1", "e", mhz(1.0), Beam::Probe)],
        light_shifts: vec![],
        reference_detuning: mhz(1.0),
        qubit_splitting: mhz(1.0),
        angular: None,
    };
    CompositeSystem::new(vec![s], Geometry { positions: vec![[0.0, 0.0]] }, InteractionSpec::new(1.0, 1.0).unwrap())
        .unwrap()
}

/// ρ = G G† / tr with Gaussian-ish complex G.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g: Vec<C64> = (0..dim * dim).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut rho = DensityMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            rho.data[i * dim + j] = (0..dim).map(|k| g[i * dim + k] * g[j * dim + k].conj()).sum();
        }
    }
    let tr: f64 = (0..dim).map(|i| rho.get(i, i).re).sum();
    rho.data.iter_mut().for_each(|x| *x /= tr);
    rho
}

/// Scales every element touching a `d` level so the x-population is
/// roughly `weight`, keeping ρ positive.
pub fn inject_x(rho: &mut DensityMatrix, sys: &CompositeSystem, weight: f64) {
    let d0 = sys.sites[0].index("d").unwrap();
    let d1 = sys.sites[1].index("d").unwrap();
    let n = rho.dim;
    let lost = |i: usize| sys.site_level(i, 0) == d0 || sys.site_level(i, 1) == d1;
    let px: f64 = (0..n).filter(|&i| lost(i)).map(|i| rho.get(i, i).re).sum();
    if px <= 0.0 {
        return;
    }
    let (a, b) = ((weight / px).sqrt(), ((1.0 - weight) / (1.0 - px)).sqrt());
    for i in 0..n {
        for j in 0..n {
            let s = if lost(i) { a } else { b } * if lost(j) { a } else { b };
            rho.data[i * n + j] *= s;
        }
    }
}

/// Each atom independently lost with probability ℓ: lost atoms go to d
/// and their partner keeps its reduced state.
pub fn with_uniform_loss(rho: &DensityMatrix, sys: &CompositeSystem, loss: f64) -> DensityMatrix {
    let n = rho.dim;
    let d = [sys.sites[0].index("d").unwrap(), sys.sites[1].index("d").unwrap()];
    let mut out = DensityMatrix::zeros(n);
    let keep = (1.0 - loss) * (1.0 - loss);
    for k in 0..n * n {
        out.data[k] = rho.data[k] * keep;
    }
    for lost_site in 0..2 {
        let other = 1 - lost_site;
        let w = loss * (1.0 - loss);
        for i in 0..n {
            for j in 0..n {
                if sys.site_level(i, lost_site) != sys.site_level(j, lost_site) {
                    continue;
                }
                let mut li = [0; 2];
                li[lost_site] = d[lost_site];
                li[other] = sys.site_level(i, other);
                let mut lj = li;
                lj[other] = sys.site_level(j, other);
                let (a, b) = (sys.index_of(&li).unwrap(), sys.index_of(&lj).unwrap());
                out.data[a * n + b] += rho.get(i, j) * w;
            }
        }
    }
    let both = sys.index_of(&d).unwrap();
    out.data[both * n + both] += C64::new(loss * loss, 0.0);
    out
}
