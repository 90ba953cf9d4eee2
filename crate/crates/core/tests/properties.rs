use proptest::prelude::*;

use hyperlace::fault::{check_conditions, format_instance};
use hyperlace::oracle::{random_instance, InstanceSpec};
use hyperlace::{
    ham_path_laceable, parse_instance, split, verify_hamiltonian_path, Dim, Edge, FaultSet, Path, SolveRequest, Vertex,
};

fn vertex(max_n: u32) -> impl Strategy<Value = Vertex> {
    (1..=max_n).prop_flat_map(|n| (0..1u64 << n).prop_map(move |l| Vertex::new(n, l).unwrap()))
}

fn fault_set(n: u32, max: usize) -> impl Strategy<Value = FaultSet> {
    proptest::collection::vec((0..1u64 << n, 0..n), 0..=max).prop_map(move |picks| {
        let mut f = FaultSet::new(n).unwrap();
        for (v, b) in picks {
            let e = Edge::new(Vertex::new(n, v).unwrap(), Vertex::new(n, v ^ (1 << b)).unwrap()).unwrap();
            f.insert(e).unwrap();
        }
        f
    })
}

proptest! {
    #[test]
    fn vertex_text_round_trip(v in vertex(20)) {
        let back: Vertex = v.to_string().parse().unwrap();
        prop_assert_eq!(back, v);
        prop_assert_eq!(v.parity() as u32, v.label().count_ones() % 2);
    }

    #[test]
    fn edges_are_canonical(v in vertex(12), b in 0u32..12) {
        let n = v.cube_dim();
        let w = Vertex::new(n, v.label() ^ (1 << (b % n))).unwrap();
        let e = Edge::new(v, w).unwrap();
        prop_assert_eq!(e, Edge::new(w, v).unwrap());
        prop_assert_eq!(Edge::along(v, e.dim()), e);
        prop_assert_eq!(e.to_string().parse::<Edge>().unwrap(), e);
    }

    #[test]
    fn project_then_embed(v in vertex(12), j in 1u32..=12) {
        let n = v.cube_dim();
        prop_assume!(n >= 2 && j <= n);
        let d = Dim::new(n, j).unwrap();
        let (theta, sub) = v.project(d);
        prop_assert_eq!(sub.cube_dim(), n - 1);
        prop_assert_eq!(theta, v.coord(d));
        prop_assert_eq!(Vertex::embed(sub, d, theta), v);
    }

    #[test]
    fn split_accounts_for_every_fault(f in fault_set(7, 25), j in 1u32..=7) {
        let sv = split(&f, Dim::new(7, j).unwrap());
        prop_assert_eq!(sv.side_faults(0).len() + sv.side_faults(1).len() + sv.crossing().len(), f.len());
        for v in Vertex::all(7) {
            let (s, sub) = sv.locate(v);
            prop_assert_eq!(sv.lift(s, sub), v);
        }
        let heavy = sv.heavier_first();
        prop_assert!(heavy.side_faults(0).len() >= heavy.side_faults(1).len());
    }

    #[test]
    fn instance_text_round_trip(f in fault_set(6, 20)) {
        prop_assert_eq!(parse_instance(&format_instance(&f)).unwrap(), f);
    }

    #[test]
    fn degree_counts_match_faults(f in fault_set(6, 20)) {
        let sum: u32 = Vertex::all(6).map(|v| f.degree(v)).sum();
        prop_assert_eq!(sum as usize, 6 * 64 - 2 * f.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn engine_paths_verify(n in 5u32..=9, frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let k = ((4 * n - 17) as f64 * frac).round() as usize;
        let inst = random_instance(&InstanceSpec { n, fault_count: k, admissible: true, seed }).unwrap();
        prop_assert!(check_conditions(&inst.faults).admissible);
        let (path, _) = ham_path_laceable(&SolveRequest::new(inst.faults.clone(), inst.x, inst.y)).unwrap();
        prop_assert!(verify_hamiltonian_path(&inst.faults, inst.x, inst.y, &path).passed());
        let back = Path::parse(&path.to_string()).unwrap();
        prop_assert_eq!(&back, &path);
    }

    #[test]
    fn verifier_rejects_swapped_vertices(seed in any::<u64>(), i in 1usize..62, j in 1usize..62) {
        prop_assume!(i != j);
        let inst = random_instance(&InstanceSpec { n: 6, fault_count: 7, admissible: true, seed }).unwrap();
        let (path, _) = ham_path_laceable(&SolveRequest::new(inst.faults.clone(), inst.x, inst.y)).unwrap();
        let mut vs = path.into_vertices();
        vs.swap(i, j);
        let broken = Path::new(vs);
        // Swapping interior vertices keeps the vertex set; the result is
        // valid only if every step is still a live edge.
        let steps_ok = broken.vertices().windows(2).all(|w| inst.faults.is_live(w[0], w[1]));
        prop_assert_eq!(verify_hamiltonian_path(&inst.faults, inst.x, inst.y, &broken).passed(), steps_ok);
    }
}
