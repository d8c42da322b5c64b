mod common;

use std::collections::HashMap;
use std::f64::consts::PI;

use femwarp::analytic::{annulus_map, infinitesimal_rotation_angle, infinitesimal_rotation_map, AnnulusSpec};
use femwarp::assembly::{assemble_stiffness, Scheme, WeightSystem};
use femwarp::generators::{gen_annulus_with, gen_rectangle_jittered, Diagonals};
use femwarp::io::mesh_files::{format_ele, format_node, parse_ele, parse_node};
use femwarp::quality::{aspect_ratio, inverse_mean_ratio, OnDegenerate};
use femwarp::solve::IterOptions;
use femwarp::untangle::{maximin_reposition, untangle, LocalSubmesh};
use femwarp::warp::{femwarp, small_step_femwarp, BoundaryMotion, SmallStepOptions};
use femwarp::{Mesh, Simplex};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn simplex_strategy(d: usize) -> impl Strategy<Value = Simplex> {
    prop::collection::vec(-2.0f64..2.0, d * (d + 1))
        .prop_map(move |c| {
            let pts: Vec<&[f64]> = c.chunks(d).collect();
            Simplex::from_points(&pts).unwrap()
        })
        .prop_filter("well-shaped", |s| {
            s.signed_measure().abs() > 1e-2 * s.max_edge().powi(s.dim() as i32)
        })
}

fn dim_simplex() -> impl Strategy<Value = Simplex> {
    prop_oneof![simplex_strategy(2), simplex_strategy(3)]
}

fn points(s: &Simplex) -> Vec<Vec<f64>> {
    (0..s.n_vertices()).map(|k| s.vertex(k)[..s.dim()].to_vec()).collect()
}

fn from_vecs(p: &[Vec<f64>]) -> Simplex {
    let refs: Vec<&[f64]> = p.iter().map(Vec::as_slice).collect();
    Simplex::from_points(&refs).unwrap()
}

fn det(l: &[f64], d: usize) -> f64 {
    if d == 2 {
        l[0] * l[3] - l[1] * l[2]
    } else {
        l[0] * (l[4] * l[8] - l[5] * l[7]) - l[1] * (l[3] * l[8] - l[5] * l[6]) + l[2] * (l[3] * l[7] - l[4] * l[6])
    }
}

/// Small annulus or jittered rectangle chosen by `pick`.
fn small_mesh(pick: u8, seed: u64) -> Mesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match pick % 3 {
        0 => gen_annulus_with(rng.gen_range(0.2..0.7), rng.gen_range(3..7), rng.gen_range(8..30), Diagonals::Alternating)
            .unwrap(),
        1 => gen_annulus_with(rng.gen_range(0.2..0.7), rng.gen_range(3..6), rng.gen_range(8..24), Diagonals::Uniform)
            .unwrap(),
        _ => gen_rectangle_jittered(
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(3..12),
            rng.gen_range(3..10),
            rng.gen_range(0.0..0.2),
            seed,
        )
        .unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn swapping_two_vertices_negates_the_measure(s in dim_simplex(), i in 0usize..4, j in 0usize..4) {
        let n = s.n_vertices();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let mut p = points(&s);
        p.swap(i, j);
        let (a, b) = (from_vecs(&p).signed_measure(), s.signed_measure());
        prop_assert!((a + b).abs() <= 1e-12 * b.abs(), "{a} vs {b}");
    }

    #[test]
    fn affine_image_scales_measure_by_det(s in dim_simplex(), seed in any::<u64>()) {
        let d = s.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (l, v) = random_affine(&mut rng, d);
        let img: Vec<Vec<f64>> = points(&s)
            .iter()
            .map(|p| (0..d).map(|i| (0..d).map(|j| l[i * d + j] * p[j]).sum::<f64>() + v[i]).collect())
            .collect();
        let expect = det(&l, d) * s.signed_measure();
        let got = from_vecs(&img).signed_measure();
        prop_assert!((got - expect).abs() <= 1e-12 * expect.abs(), "{got} vs {expect}");
    }

    #[test]
    fn shape_metrics_ignore_rigid_motion_and_scale(
        s in dim_simplex(),
        angles in prop::array::uniform3(0.0..2.0 * PI),
        shift in prop::array::uniform3(-5.0f64..5.0),
        scale in 0.01f64..100.0,
    ) {
        let d = s.dim();
        // rotation about z, then about x (3D only)
        let (sa, ca) = angles[0].sin_cos();
        let (sb, cb) = angles[1].sin_cos();
        let moved: Vec<Vec<f64>> = points(&s)
            .iter()
            .map(|p| {
                let mut q = vec![ca * p[0] - sa * p[1], sa * p[0] + ca * p[1]];
                if d == 3 {
                    let z = p[2];
                    q = vec![q[0], cb * q[1] - sb * z, sb * q[1] + cb * z];
                }
                q.iter().enumerate().map(|(k, x)| scale * x + shift[k]).collect()
            })
            .collect();
        let t = from_vecs(&moved);
        let a0 = aspect_ratio(&s, OnDegenerate::Error).unwrap();
        let a1 = aspect_ratio(&t, OnDegenerate::Error).unwrap();
        prop_assert!((a0 - a1).abs() <= 1e-10 * a0);
        let pos = if s.signed_measure() > 0.0 { s } else { s.flipped() };
        let tpos = if t.signed_measure() > 0.0 { t } else { t.flipped() };
        let q0 = inverse_mean_ratio(&pos).unwrap();
        let q1 = inverse_mean_ratio(&tpos).unwrap();
        prop_assert!((q0 - q1).abs() <= 1e-10 * q0);
    }

    #[test]
    fn no_reversals_iff_valid(pick in any::<u8>(), seed in any::<u64>(), amount in 0.0f64..0.6) {
        let m = small_mesh(pick, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let h = m.max_edge_length();
        let c: Vec<f64> = m.coords().iter().map(|x| x + amount * h * rng.gen_range(-1.0..1.0)).collect();
        let m = m.with_coords(c).unwrap();
        prop_assert_eq!(m.count_reversals().is_empty(), m.is_valid());
    }

    #[test]
    fn generated_meshes_are_valid_and_conforming(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        prop_assert!(m.is_valid());
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for el in m.elements() {
            for (a, b) in [(el[0], el[1]), (el[1], el[2]), (el[2], el[0])] {
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for (&(a, b), &c) in &count {
            prop_assert!(c == 1 || c == 2);
            // edges used once lie on the boundary
            if c == 1 {
                prop_assert!(m.is_boundary(a) && m.is_boundary(b));
            }
        }
    }

    #[test]
    fn fem_stiffness_is_positive_semidefinite(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        let a = assemble_stiffness(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let x: Vec<f64> = (0..a.nrows()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ax = a.mul_vec(&x).unwrap();
            let q: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum::<f64>();
            let xx: f64 = x.iter().map(|v| v * v).sum();
            prop_assert!(q / xx >= -1e-12 * a.norm_inf());
        }
        WeightSystem::build(&m, Scheme::Fem).unwrap().factor().unwrap();
    }

    #[test]
    fn weight_systems_reproduce_their_mesh(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        for scheme in [Scheme::Fem, Scheme::LogBarrier] {
            let ws = WeightSystem::build(&m, scheme).unwrap();
            prop_assert!(ws.residual(&m) <= 1e-10 * norm_inf(m.coords()), "{scheme}");
        }
    }

    #[test]
    fn scaled_schemes_are_diagonally_dominant(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        for scheme in [Scheme::Uniform, Scheme::LogBarrier] {
            let ws = WeightSystem::build(&m, scheme).unwrap();
            let (ai, ab) = (ws.a_i(), ws.a_b());
            for i in 0..ws.n_interior() {
                let (cols, vals) = ai.row(i);
                let mut sum = 0.0;
                for (&j, &v) in cols.iter().zip(vals) {
                    if j == i {
                        prop_assert!((v - 1.0).abs() < 1e-15);
                    } else {
                        prop_assert!(v <= 0.0);
                    }
                    sum += v;
                }
                let boundary: f64 = ab.row(i).1.iter().sum();
                prop_assert!(ab.row(i).1.iter().all(|&v| v <= 0.0));
                prop_assert!(sum >= -1e-12);
                if !ab.row(i).0.is_empty() {
                    prop_assert!(sum > 1e-12, "row {i} touches the boundary (weight {boundary})");
                }
                if scheme == Scheme::LogBarrier {
                    prop_assert!(vals.iter().chain(ab.row(i).1).all(|&v| v != 0.0));
                }
            }
        }
    }

    #[test]
    fn gauss_seidel_matches_direct(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        for scheme in [Scheme::Fem, Scheme::Uniform, Scheme::LogBarrier] {
            let ws = WeightSystem::build(&m, scheme).unwrap();
            let boundary = ws.boundary_coords(&m);
            let direct = ws.factor().unwrap().solve_multi(&ws.rhs(&boundary).unwrap()).unwrap();
            let zeros = vec![vec![0.0; ws.n_interior()]; m.dim()];
            let opts = IterOptions { tol: 1e-10, max_iters: Some(100_000) };
            let gs = ws.gauss_seidel(&boundary, zeros, opts).unwrap();
            prop_assert!(gs.converged);
            for (x, y) in gs.x.iter().zip(&direct) {
                prop_assert!(max_abs_diff(x, y) <= 1e-6 * norm_inf(y).max(1.0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn affine_motions_are_reproduced(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (l, v) = random_affine(&mut rng, 2);
        let exact = apply_affine(&m, &l, &v);
        let tol = 1e-8 * (matrix_norm_inf(&l, 2) * m.bbox_diameter() + norm_inf(&v));
        let motion = BoundaryMotion::Affine { l: l.clone(), v: v.clone() };
        for scheme in [Scheme::Fem, Scheme::LogBarrier] {
            let (out, _) = femwarp(&m, scheme, &motion).unwrap();
            prop_assert!(max_abs_diff(out.coords(), &exact) <= tol, "{scheme}");
        }
        // uniform weights reproduce affine motions of their own smoothed mesh
        let (smooth, _) = femwarp(&m, Scheme::Uniform, &BoundaryMotion::identity(2)).unwrap();
        let (out, _) = femwarp(&smooth, Scheme::Uniform, &motion).unwrap();
        prop_assert!(max_abs_diff(out.coords(), &apply_affine(&smooth, &l, &v)) <= tol);
    }

    #[test]
    fn two_affine_steps_equal_one(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (l1, v1) = random_affine(&mut rng, 2);
        let (l2, v2) = random_affine(&mut rng, 2);
        for scheme in [Scheme::Fem, Scheme::LogBarrier] {
            let (mid, _) = femwarp(&m, scheme, &BoundaryMotion::Affine { l: l1.clone(), v: v1.clone() }).unwrap();
            if !mid.is_valid() && scheme == Scheme::LogBarrier {
                continue;
            }
            let (two, _) = match femwarp(&mid, scheme, &BoundaryMotion::Affine { l: l2.clone(), v: v2.clone() }) {
                Ok(r) => r,
                // barrier weights need each node inside its neighbors' hull
                Err(_) if scheme == Scheme::LogBarrier => continue,
                Err(e) => panic!("{e}"),
            };
            // composite map L2 (L1 p + v1) + v2
            let l: Vec<f64> = (0..4).map(|k| {
                let (i, j) = (k / 2, k % 2);
                l2[i * 2] * l1[j] + l2[i * 2 + 1] * l1[2 + j]
            }).collect();
            let v: Vec<f64> = (0..2).map(|i| l2[i * 2] * v1[0] + l2[i * 2 + 1] * v1[1] + v2[i]).collect();
            let (one, _) = femwarp(&m, scheme, &BoundaryMotion::Affine { l: l.clone(), v: v.clone() }).unwrap();
            let tol = 1e-8 * (matrix_norm_inf(&l, 2) * m.bbox_diameter() + norm_inf(&v));
            prop_assert!(max_abs_diff(two.coords(), one.coords()) <= tol, "{scheme}");
        }
    }

    #[test]
    fn warps_are_deterministic(pick in any::<u8>(), seed in any::<u64>(), theta in 0.0f64..3.0) {
        let m = small_mesh(pick, seed);
        let motion = if pick % 3 == 2 {
            BoundaryMotion::Shear { alpha: theta }
        } else {
            let r = m.coords().chunks(2).map(|p| p[0].hypot(p[1])).fold(f64::INFINITY, f64::min);
            BoundaryMotion::annulus_rotation(r, theta)
        };
        let a = small_step_femwarp(&m, Scheme::Fem, &motion, SmallStepOptions::default()).unwrap();
        let b = small_step_femwarp(&m, Scheme::Fem, &motion, SmallStepOptions::default()).unwrap();
        prop_assert_eq!(a, b);
        let c = untangle(&femwarp(&m, Scheme::Fem, &motion).unwrap().0, 5);
        let d = untangle(&femwarp(&m, Scheme::Fem, &motion).unwrap().0, 5);
        prop_assert_eq!(c, d);
    }

    #[test]
    fn untangling_keeps_boundary_and_never_lowers_a_vertex(
        pick in 0u8..2,
        seed in any::<u64>(),
        outer in 0.0f64..PI,
        inner in 0.0f64..PI,
    ) {
        let m = small_mesh(pick, seed);
        let r = m.coords().chunks(2).map(|p| p[0].hypot(p[1])).fold(f64::INFINITY, f64::min);
        let motion = BoundaryMotion::Annulus { r, s: r, theta_outer: outer, theta_inner: inner };
        let start = m.with_coords(motion.evaluate(&m, 1.0).unwrap()).unwrap();
        let res = untangle(&start, 10);
        for i in start.boundary_nodes() {
            prop_assert_eq!(res.mesh.point(i), start.point(i));
        }
        for mv in &res.moves {
            prop_assert!(mv.after >= mv.before, "{mv:?}");
        }
    }

    #[test]
    fn reposition_is_locally_optimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // regular polygon cavity with a randomly placed free vertex
        let n = rng.gen_range(4..9);
        let mut coords: Vec<f64> = (0..n)
            .flat_map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                let rho = 1.0 + 0.3 * (a * 3.0).sin();
                [rho * a.cos(), rho * a.sin()]
            })
            .collect();
        coords.extend_from_slice(&[rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)]);
        let elements: Vec<usize> = (0..n).flat_map(|k| [k, (k + 1) % n, n]).collect();
        let mut boundary = vec![true; n];
        boundary.push(false);
        let mesh = Mesh::new(2, coords, elements, boundary).unwrap();
        let sub = LocalSubmesh::from_mesh(&mesh, n, &mesh.node_elements()[n]);
        let rep = maximin_reposition(&sub).unwrap();
        let h = mesh.max_edge_length();
        let best = sub.min_measure_at(&rep.position);
        for a in 0..2 {
            for sign in [-1.0, 1.0] {
                let mut p = rep.position.clone();
                p[a] += sign * 1e-6 * h;
                prop_assert!(sub.min_measure_at(&p) <= best + 1e-9);
            }
        }
    }

    #[test]
    fn annulus_boundaries_land_on_circles(
        r in 0.1f64..0.9,
        frac in 0.0f64..1.0,
        theta in -PI..PI,
        phi in 0.0f64..2.0 * PI,
    ) {
        let s = r + frac * (0.99 - r);
        let spec = AnnulusSpec::new(r, s, theta).unwrap();
        let outer = annulus_map(&spec, [phi.cos(), phi.sin()]).unwrap();
        let inner = annulus_map(&spec, [r * phi.cos(), r * phi.sin()]).unwrap();
        prop_assert!((outer[0].hypot(outer[1]) - 1.0).abs() <= 1e-12);
        prop_assert!((inner[0].hypot(inner[1]) - s).abs() <= 1e-12);
    }

    #[test]
    fn infinitesimal_rotation_inverts(
        r in 0.1f64..0.9,
        theta in -10.0f64..10.0,
        frac in 0.0f64..1.0,
        phi in 0.0f64..2.0 * PI,
    ) {
        let rho = r + frac * (1.0 - r);
        let p = [rho * phi.cos(), rho * phi.sin()];
        let q = infinitesimal_rotation_map(r, theta, p).unwrap();
        let back = -infinitesimal_rotation_angle(r, theta, rho);
        let (sn, cs) = back.sin_cos();
        let b = [cs * q[0] - sn * q[1], sn * q[0] + cs * q[1]];
        prop_assert!((b[0] - p[0]).abs() <= 1e-12 && (b[1] - p[1]).abs() <= 1e-12);
    }

    #[test]
    fn mesh_files_round_trip_bitwise(pick in any::<u8>(), seed in any::<u64>()) {
        let m = small_mesh(pick, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<f64> = m.coords().iter().map(|x| x * (1.0 + 1e-3 * rng.gen_range(-1.0..1.0))).collect();
        let m = m.with_coords(c).unwrap();
        let p = std::path::Path::new("mem");
        let nodes = parse_node(&format_node(&m), p).unwrap();
        let el = parse_ele(&format_ele(&m), p, &nodes).unwrap();
        prop_assert_eq!(nodes.coords.as_slice(), m.coords());
        prop_assert_eq!(el.as_slice(), m.connectivity());
        let markers: Vec<bool> = nodes.markers.unwrap().iter().map(|&k| k != 0).collect();
        prop_assert_eq!(markers.as_slice(), m.boundary_markers());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refactoring_keeps_the_pattern_and_ordering(pick in 0u8..2, seed in any::<u64>(), theta in 0.05f64..0.6) {
        let m = small_mesh(pick, seed);
        let r = m.coords().chunks(2).map(|p| p[0].hypot(p[1])).fold(f64::INFINITY, f64::min);
        let motion = BoundaryMotion::annulus_rotation(r, theta);
        for scheme in [Scheme::Fem, Scheme::LogBarrier] {
            let ws0 = WeightSystem::build(&m, scheme).unwrap();
            let f0 = ws0.factor().unwrap();
            let (moved, _) = femwarp(&m, scheme, &motion).unwrap();
            prop_assume!(moved.is_valid());
            let ws1 = WeightSystem::build(&moved, scheme).unwrap();
            prop_assert!(ws0.a_i().same_pattern(ws1.a_i()));
            prop_assert!(ws0.a_b().same_pattern(ws1.a_b()));
            let f1 = ws1.refactor(&f0).unwrap();
            prop_assert!(std::sync::Arc::ptr_eq(f0.symbolic(), f1.symbolic()));
        }
    }
}
