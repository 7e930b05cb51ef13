//! Seeded random instances for property checks and searches.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::space::{BasisLabel, Vector, WeightedSpace, C64};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn unit_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    Vector::from_coeffs((0..dim).map(|_| gaussian(rng)).collect())
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng))
}

/// Custom space with weights drawn from `[0.2, 5)`.
pub fn random_weighted_space<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> WeightedSpace {
    let labels = (0..dim as u32).map(|k| BasisLabel::new(vec![k])).collect();
    let weights = (0..dim).map(|_| rng.random_range(0.2..5.0)).collect();
    WeightedSpace::custom(labels, weights).expect("positive weights")
}

/// Unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    random_matrix(rng, dim).qr().q()
}

/// A point of the open unit disc, uniform in area.
pub fn random_in_disc<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let r: f64 = rng.random::<f64>().sqrt();
    unit_phase(rng) * r
}
