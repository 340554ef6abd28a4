use crate::common::{first_tan_root, navier_mu0_dim5, sobolev_closed_form};
use steepwell::bubble::{bubble_normalization, sobolev_constant, QuadratureOptions};
use steepwell::spectral::dirichlet_laplacian_eigen;
use steepwell::{mu_zero, EigenOptions, RadialGrid};

#[test]
fn tan_root_oracle() {
    let x = first_tan_root();
    assert!((x.tan() - x).abs() < 1e-9);
    assert!((navier_mu0_dim5() - 407.6655).abs() < 1e-3);
}

#[test]
fn sobolev_oracle_reference_values() {
    assert!((sobolev_closed_form(8) - 653.8247118264).abs() < 1e-8);
}

#[test]
fn dirichlet_eigenvalue_matches_root() {
    let grid = RadialGrid::new(5, 1.0, 1024).unwrap();
    let nu = dirichlet_laplacian_eigen(&grid, EigenOptions::default())
        .unwrap()
        .value;
    let x = first_tan_root();
    assert!((nu - x * x).abs() / (x * x) < 1e-5, "{nu} vs {}", x * x);
}

#[test]
fn mu_zero_second_order() {
    let exact = navier_mu0_dim5();
    let errs: Vec<f64> = [128, 256, 512]
        .iter()
        .map(|&m| {
            (mu_zero(
                &RadialGrid::new(5, 1.0, m).unwrap(),
                EigenOptions::default(),
            )
            .unwrap()
            .value
                - exact)
                .abs()
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..2.2).contains(&order), "order {order}");
    }
}

#[test]
fn sobolev_constant_matches_closed_form() {
    for dim in [8u32, 9, 10, 12] {
        let d = dim as usize;
        let s = sobolev_constant(d, bubble_normalization(d), QuadratureOptions::default()).unwrap();
        let exact = sobolev_closed_form(dim);
        assert!(
            (s.value - exact).abs() / exact < 1e-9,
            "N = {dim}: {} vs {exact}",
            s.value
        );
    }
}
