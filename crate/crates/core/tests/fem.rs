use rand::Rng;
use sphereflow_core::fem::{
    assemble_mass, assemble_stiffness, energy, error_norms, interpolate_nodal, lumped_inner,
    lumped_weights, ritz_project, ExactSolution, NodalLift, QuadratureRule,
};
use sphereflow_core::linalg::dot;
use sphereflow_core::verify::{exact_phase_solution, random, ConstantSolution};
use sphereflow_core::{Field, Mesh, P1Space};

/// `(x_1, 1 - x_1, ...)`: affine in space, constant in time.
struct Affine {
    d: usize,
}

impl ExactSolution for Affine {
    fn target_dim(&self) -> usize {
        2
    }
    fn spatial_dim(&self) -> usize {
        self.d
    }
    fn value(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        out[0] = x[0];
        out[1] = 1.0 - x[0] + 0.5 * x.get(1).copied().unwrap_or(0.0);
    }
    fn gradient(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        out[0] = 1.0;
        out[self.d] = -1.0;
        if self.d > 1 {
            out[self.d + 1] = 0.5;
        }
    }
    fn time_derivative(&self, _t: f64, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }
    fn description(&self) -> &str {
        "affine"
    }
}

fn dense(mesh: &Mesh, stiffness: bool) -> Vec<Vec<f64>> {
    let a = if stiffness { assemble_stiffness(mesh) } else { assemble_mass(mesh) }.unwrap();
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a.get(i, j)).collect()).collect()
}

#[test]
fn one_dimensional_matrices() {
    let mesh = Mesh::unit_cube(1, 2).unwrap();
    let a = dense(&mesh, true);
    let expected = [[2.0, -2.0, 0.0], [-2.0, 4.0, -2.0], [0.0, -2.0, 2.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((a[i][j] - expected[i][j]).abs() < 1e-14);
        }
    }
    let m = dense(&mesh, false);
    let expected = [[1.0 / 6.0, 1.0 / 12.0, 0.0], [1.0 / 12.0, 1.0 / 3.0, 1.0 / 12.0], [0.0, 1.0 / 12.0, 1.0 / 6.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert!((m[i][j] - expected[i][j]).abs() < 1e-15);
        }
    }
    assert_eq!(lumped_weights(&mesh), vec![0.25, 0.5, 0.25]);
}

#[test]
fn operator_properties_on_all_dimensions() {
    for d in 1..=3 {
        for n in [1, 2, 4] {
            let mesh = Mesh::unit_cube(d, n).unwrap();
            let a = assemble_stiffness(&mesh).unwrap();
            let m = assemble_mass(&mesh).unwrap();
            assert!(a.is_symmetric(1e-14) && m.is_symmetric(1e-14));
            assert!(m.values().iter().all(|&v| v >= 0.0));

            let ones = vec![1.0; mesh.num_vertices()];
            for v in a.spmv(&ones).unwrap() {
                assert!(v.abs() < 1e-13);
            }
            assert!((dot(&ones, &m.spmv(&ones).unwrap()) - 1.0).abs() < 1e-12);

            let beta = lumped_weights(&mesh);
            assert!((beta.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (b, r) in beta.iter().zip(m.row_sums()) {
                assert!(*b > 0.0 && (b - r).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn stiffness_is_semidefinite_and_mass_definite() {
    let mut rng = random::rng(21);
    for d in 1..=3 {
        let mesh = Mesh::unit_cube(d, 3).unwrap();
        let a = assemble_stiffness(&mesh).unwrap();
        let m = assemble_mass(&mesh).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..mesh.num_vertices()).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert!(dot(&x, &a.spmv(&x).unwrap()) >= -1e-14);
            assert!(dot(&x, &m.spmv(&x).unwrap()) > 0.0);
        }
    }
}

#[test]
fn square_weights_and_linear_energy() {
    let mesh = Mesh::unit_cube(2, 1).unwrap();
    let beta = lumped_weights(&mesh);
    let expected = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0];
    for (b, e) in beta.iter().zip(expected) {
        assert!((b - e).abs() < 1e-15);
    }
    let a = assemble_stiffness(&mesh).unwrap();
    for r in a.row_sums() {
        assert!(r.abs() < 1e-14);
    }
    let x1: Vec<f64> = (0..4).map(|z| mesh.vertex(z)[0]).collect();
    assert!((dot(&x1, &a.spmv(&x1).unwrap()) - 1.0).abs() < 1e-12);
}

#[test]
fn lumped_norm_is_equivalent_to_consistent() {
    let mut rng = random::rng(4);
    for d in 1..=3 {
        let mesh = Mesh::unit_cube(d, 3).unwrap();
        let space = P1Space::new(&mesh).unwrap();
        for _ in 0..50 {
            let v = random::field(mesh.num_vertices(), 1, &mut rng);
            let lumped = lumped_inner(space.lumped_weights(), &v, &v).unwrap();
            let consistent = space.l2_norm_sq(&v).unwrap();
            let ratio = lumped / consistent;
            assert!(ratio >= 1.0 - 1e-12 && ratio <= (d + 2) as f64 + 1e-12, "ratio {ratio}");
        }
    }
}

#[test]
fn lumped_inner_examples() {
    let mesh = Mesh::unit_cube(1, 4).unwrap();
    let beta = lumped_weights(&mesh);
    let e = Field::constant(5, &[0.0, 1.0]);
    assert!((lumped_inner(&beta, &e, &e).unwrap() - 1.0).abs() < 1e-15);

    let v = Field::constant(5, &[1.0, 0.0]);
    assert_eq!(lumped_inner(&beta, &v, &e).unwrap(), 0.0);

    let mut rng = random::rng(9);
    let v = random::field(5, 3, &mut rng);
    let w = random::field(5, 3, &mut rng);
    let mut by_hand = 0.0;
    for z in 0..5 {
        for c in 0..3 {
            by_hand += beta[z] * v.values()[3 * z + c] * w.values()[3 * z + c];
        }
    }
    assert!((lumped_inner(&beta, &v, &w).unwrap() - by_hand).abs() < 1e-14);
    assert!(lumped_inner(&beta, &v, &Field::zeros(5, 2)).is_err());
}

#[test]
fn interpolation_examples() {
    let mesh = Mesh::unit_cube(1, 8).unwrap();
    let e1 = ConstantSolution::unit(3, 1);
    let u = interpolate_nodal(&e1, &mesh, 0.0).unwrap();
    assert!(u.nodes().all(|n| n == [1.0, 0.0, 0.0]));

    let phase = exact_phase_solution(2, 1).unwrap();
    let u = interpolate_nodal(&phase, &mesh, 0.0).unwrap();
    assert!((u.node(0)[0] - 0.540302).abs() < 1e-6);
    assert!((u.node(0)[1] - 0.841471).abs() < 1e-6);

    for d in 1..=3 {
        let mesh = Mesh::unit_cube(d, 2).unwrap();
        let f = Affine { d };
        let u = interpolate_nodal(&f, &mesh, 0.0).unwrap();
        let e = error_norms(&u, &f, 0.0, &mesh, 2).unwrap();
        assert!(e.h1 < 1e-13, "d={d}: {e:?}");
    }
}

#[test]
fn ritz_reproduces_finite_element_fields() {
    let mut rng = random::rng(17);
    for (d, n) in [(1, 8), (2, 4), (3, 2)] {
        let mesh = Mesh::unit_cube(d, n).unwrap();
        let space = P1Space::new(&mesh).unwrap();
        let v = random::field(mesh.num_vertices(), 2, &mut rng);
        let lift = NodalLift::new(&mesh, &v);
        let r = space.ritz_project(&lift, 0.0, 2, 1e-13).unwrap();
        assert!(r.max_abs_diff(&v) < 1e-10, "d={d}: {}", r.max_abs_diff(&v));
    }
}

#[test]
fn ritz_of_constant_is_constant() {
    let mesh = Mesh::unit_cube(2, 4).unwrap();
    let c = ConstantSolution::new(vec![0.6, -0.8], 2);
    let r = ritz_project(&c, 0.0, &mesh, 2).unwrap();
    assert!(r.max_abs_diff(&Field::constant(mesh.num_vertices(), &[0.6, -0.8])) < 1e-12);
}

#[test]
fn ritz_preserves_mean_in_two_dimensions() {
    let phase = exact_phase_solution(2, 2).unwrap();
    let mesh = Mesh::unit_cube(2, 8).unwrap();
    let space = P1Space::new(&mesh).unwrap();
    let r = space.ritz_project(&phase, 0.05, 4, 1e-12).unwrap();

    let rule = QuadratureRule::simplex(2, 4).unwrap();
    let mut mean = [0.0; 2];
    let mut value = [0.0; 2];
    for (k, el) in mesh.elements().enumerate() {
        for (lambda, w) in rule.iter() {
            let mut x = [0.0; 2];
            for (a, &z) in el.iter().enumerate() {
                x[0] += lambda[a] * mesh.vertex(z)[0];
                x[1] += lambda[a] * mesh.vertex(z)[1];
            }
            phase.value(0.05, &x, &mut value);
            mean[0] += w * mesh.element_volume(k) * value[0];
            mean[1] += w * mesh.element_volume(k) * value[1];
        }
    }
    for c in 0..2 {
        assert!((dot(space.lumped_weights(), &r.component(c)) - mean[c]).abs() < 1e-11);
    }
}

#[test]
fn ritz_mean_matches_its_own_quadrature() {
    let phase = exact_phase_solution(3, 1).unwrap();
    let mesh = Mesh::unit_cube(1, 128).unwrap();
    let space = P1Space::new(&mesh).unwrap();
    let r = space.ritz_project(&phase, 0.25, 2, 1e-12).unwrap();
    let rule = QuadratureRule::simplex(1, 2).unwrap();
    let mut mean = [0.0; 3];
    let mut value = [0.0; 3];
    for (k, el) in mesh.elements().enumerate() {
        for (lambda, w) in rule.iter() {
            let x = lambda[0] * mesh.vertex(el[0])[0] + lambda[1] * mesh.vertex(el[1])[0];
            phase.value(0.25, &[x], &mut value);
            for c in 0..3 {
                mean[c] += w * mesh.element_volume(k) * value[c];
            }
        }
    }
    for c in 0..3 {
        assert!((dot(space.lumped_weights(), &r.component(c)) - mean[c]).abs() < 1e-11);
    }
}

#[test]
fn galerkin_orthogonality() {
    // for every hat function: (grad R f, grad phi_i) = (grad f, grad phi_i)
    // + ((f,1) - (R f,1)) (phi_i,1), the latter vanishing by mean preservation
    let phase = exact_phase_solution(2, 1).unwrap();
    let mesh = Mesh::unit_cube(1, 16).unwrap();
    let space = P1Space::new(&mesh).unwrap();
    let t = 0.1;
    let r = space.ritz_project(&phase, t, 4, 1e-12).unwrap();
    let ar = space.apply_stiffness(&r).unwrap();

    // (grad f, grad phi_i) in 1D is exact: f'(x) integrated against +-1/h
    let n = 16;
    let h = 1.0 / n as f64;
    let f_at = |x: f64| {
        let mut v = [0.0; 2];
        phase.value(t, &[x], &mut v);
        v
    };
    for i in 0..=n {
        let xi = i as f64 * h;
        let left = if i > 0 { Some(f_at(xi)) } else { None };
        let mut load = [0.0; 2];
        for c in 0..2 {
            // int_{x_{i-1}}^{x_i} f' / h - int_{x_i}^{x_{i+1}} f' / h
            if let Some(l) = left {
                load[c] += (l[c] - f_at(xi - h)[c]) / h;
            }
            if i < n {
                load[c] -= (f_at(xi + h)[c] - f_at(xi)[c]) / h;
            }
        }
        for c in 0..2 {
            assert!((ar.node(i)[c] - load[c]).abs() < 1e-9, "node {i}: {} vs {}", ar.node(i)[c], load[c]);
        }
    }
}

#[test]
fn ritz_h1_error_halves() {
    let phase = exact_phase_solution(2, 1).unwrap();
    let err = |n: usize| {
        let mesh = Mesh::unit_cube(1, n).unwrap();
        let space = P1Space::new(&mesh).unwrap();
        let r = space.ritz_project(&phase, 0.0, 2, 1e-12).unwrap();
        space.error_norms(&r, &phase, 0.0, 2).unwrap().h1
    };
    let ratio = err(16) / err(32);
    assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn ritz_moduli_stay_above_one_half() {
    let phase = exact_phase_solution(2, 1).unwrap();
    for n in [8, 16, 32] {
        let mesh = Mesh::unit_cube(1, n).unwrap();
        let space = P1Space::new(&mesh).unwrap();
        let rule = QuadratureRule::simplex(1, 4).unwrap();
        for t in [0.0, 0.1, 0.25] {
            let r = space.ritz_project(&phase, t, 2, 1e-12).unwrap();
            for el in mesh.elements() {
                for (lambda, _) in rule.iter() {
                    let v: Vec<f64> = (0..2)
                        .map(|c| lambda[0] * r.node(el[0])[c] + lambda[1] * r.node(el[1])[c])
                        .collect();
                    assert!((v[0] * v[0] + v[1] * v[1]).sqrt() >= 0.5);
                }
            }
        }
    }
}

#[test]
fn energy_examples() {
    let mesh = Mesh::unit_cube(1, 4).unwrap();
    let a = assemble_stiffness(&mesh).unwrap();
    let space = P1Space::new(&mesh).unwrap();
    let constant = Field::constant(5, &[0.3, 0.4]);
    assert_eq!(space.energy(&constant).unwrap(), 0.0);
    assert!(energy(&a, &constant).unwrap().abs() < 1e-15);

    let u = interpolate_nodal(&Affine { d: 1 }, &mesh, 0.0).unwrap();
    assert!((space.energy(&u).unwrap() - 1.0).abs() < 1e-14);
    assert!((energy(&a, &u).unwrap() - 1.0).abs() < 1e-14);
    assert!((space.energy(&u.scaled(2.0)).unwrap() - 4.0).abs() < 1e-13);
}

#[test]
fn error_norm_examples() {
    let mesh = Mesh::unit_cube(2, 3).unwrap();
    let mut rng = random::rng(2);
    let v = random::field(mesh.num_vertices(), 2, &mut rng);
    let lift = NodalLift::new(&mesh, &v);
    let e = error_norms(&v, &lift, 0.0, &mesh, 2).unwrap();
    assert!(e.l2 <= 1e-12 && e.h1_semi <= 1e-12 && e.h1 <= 1e-12);

    let zero = Field::zeros(mesh.num_vertices(), 2);
    let e1 = ConstantSolution::new(vec![1.0, 0.0], 2);
    let e = error_norms(&zero, &e1, 0.0, &mesh, 2).unwrap();
    assert!((e.l2 - 1.0).abs() < 1e-14 && e.h1_semi == 0.0);
}

#[test]
fn interpolation_error_rates() {
    let phase = exact_phase_solution(2, 1).unwrap();
    let err = |n: usize| {
        let mesh = Mesh::unit_cube(1, n).unwrap();
        let u = interpolate_nodal(&phase, &mesh, 0.0).unwrap();
        error_norms(&u, &phase, 0.0, &mesh, 4).unwrap()
    };
    let (coarse, fine) = (err(32), err(64));
    let l2 = coarse.l2 / fine.l2;
    let h1 = coarse.h1_semi / fine.h1_semi;
    assert!((3.6..=4.4).contains(&l2), "l2 ratio {l2}");
    assert!((1.8..=2.2).contains(&h1), "h1 ratio {h1}");
}

#[test]
fn phase_gradient_matches_finite_differences() {
    let mut rng = random::rng(31);
    for d in 1..=3 {
        let f = exact_phase_solution(3, d).unwrap();
        let mut grad = vec![0.0; 3 * d];
        let (mut plus, mut minus) = ([0.0; 3], [0.0; 3]);
        for _ in 0..50 {
            let t = rng.random_range(0.0..0.3);
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
            f.value(t, &x, &mut plus);
            let modulus = plus.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((modulus - 1.0).abs() < 1e-12);
            f.gradient(t, &x, &mut grad);
            for k in 0..d {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += 1e-6;
                xm[k] -= 1e-6;
                f.value(t, &xp, &mut plus);
                f.value(t, &xm, &mut minus);
                for c in 0..3 {
                    let fd = (plus[c] - minus[c]) / 2e-6;
                    assert!((fd - grad[c * d + k]).abs() < 1e-5);
                }
            }
        }
    }
}
