//! Closed-form quantities of the model: eigenstructure, the m_k
//! sequence, expectations, variances, and moment bounds across the three
//! criticality regimes.

use ginar::analytics::{mean_structure, second_moment_bound, variance_xn};

fn main() {
    for (m_xi, m_eta) in [(0.3, 0.2), (0.5, 0.5), (0.9, 0.4)] {
        let ms = mean_structure(m_xi, m_eta).unwrap();
        println!(
            "(m_xi, m_eta) = ({m_xi}, {m_eta}): lambda+ = {:.6}, lambda- = {:.6}, rho = {:.6} -> {}",
            ms.lambda_plus, ms.lambda_minus, ms.rho, ms.class
        );
        print!("  m_k, k <= 8: ");
        for k in 0..=8 {
            print!("{:.4} ", ms.m_seq(k));
        }
        println!();

        // Bernoulli offspring variances matching the means.
        let (vx, ve) = (m_xi * (1.0 - m_xi), m_eta * (1.0 - m_eta));
        println!("  Var(X_n) from (1,0), with the second-moment bound:");
        for n in [1u32, 5, 10] {
            let v = variance_xn(&ms, vx, ve, n);
            let second = v + ms.m_seq(n).powi(2);
            let bound = second_moment_bound(&ms, vx, ve, n).unwrap();
            println!(
                "    n = {n:2}: Var = {v:.5}, E(X_n^2) = {second:.5} <= bound {bound:.5}"
            );
        }
        println!();
    }

    let ms = mean_structure(0.3, 0.2).unwrap();
    println!("immigration with mean 1, started from (0, 0):");
    for n in [1u32, 5, 10, 20, 40] {
        println!("  E(X_{n:2}) = {:.8}", ms.expectation(n, 0.0, 0.0, 1.0));
    }
    println!("  limit    = {:.8}", ms.stationary_mean(1.0).unwrap());
}
