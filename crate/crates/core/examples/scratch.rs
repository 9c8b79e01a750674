//! Development probe; not part of the library.

use num_complex::Complex64 as C64;
use spinlab::fields::SpinorField;
use spinlab::geometry::MetricFamily;
use spinlab::grid::GridChart;
use spinlab::levelsets::{
    level_profile, select_level, verify_theorem1, verify_trace_inequality,
};
use spinlab::witten::{solve_witten, SolverConfig, SpinSetup};

fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect()
}

fn study(label: &str, setup: &SpinSetup, psi: &SpinorField, taus: &[f64]) {
    let t0 = std::time::Instant::now();
    let profile = level_profile(setup, psi, taus).unwrap();
    println!("[{label}] profile over {} levels in {:?}", taus.len(), t0.elapsed());
    println!("  regular: {} / {}", profile.regular.iter().filter(|&&r| r).count(), taus.len());
    println!(
        "  truncated rows: {:?}",
        (0..taus.len()).filter(|&i| profile.truncated[i]).collect::<Vec<_>>()
    );
    let t1 = verify_theorem1(&profile, 0.25).unwrap();
    println!(
        "  thm1: second_diff {:.3e} (vs -{:.3e}) slope {:.4} sandwich {:.4} floor {:.4} pass={}",
        t1.min_second_difference,
        1e-3 * t1.max_dirichlet,
        t1.worst_slope_gap,
        t1.worst_sandwich_defect,
        t1.worst_floor_defect,
        t1.pass()
    );
    let mut worst = 0.0f64;
    let mut wargs = (0.0, 0.0);
    let mut fails = 0usize;
    for i in 0..taus.len() {
        for j in i + 1..taus.len() {
            let rep = verify_trace_inequality(&profile, taus[i], taus[j]).unwrap();
            let q = rep.int_area * rep.int_area / (rep.delta_volume * rep.delta_dirichlet);
            if q > worst {
                worst = q;
                wargs = (taus[i], taus[j]);
            }
            if !rep.pass() {
                fails += 1;
            }
            if !rep.schwarz_ok {
                println!("  !! schwarz fails at ({}, {})", taus[i], taus[j]);
            }
        }
    }
    println!("  trace: worst ratio {worst:.5} at {wargs:?}, fails {fails}/190");
    let pick = select_level(&profile, 0.5, 0.75, 0.25).unwrap();
    println!("  select [0.5,0.75]: t={} area={:.3} bound={:.3}", pick.t, pick.area, pick.bound);
    println!("  flux gap {:.4}", profile.worst_flux_gap());
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let half_width: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(11.0);
    let n: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(93);

    let family = MetricFamily::SchwCap { mass: 2.0, cap: 1.0 };
    let chart = GridChart::new(half_width, n).unwrap();
    let t0 = std::time::Instant::now();
    let setup = SpinSetup::new(&family, chart).unwrap();
    println!("setup L={half_width} n={n} in {:?}", t0.elapsed());

    let conf = family.conformal_factor().unwrap();
    let mut exact = SpinorField::zeros(chart);
    for (idx, node) in chart.nodes().enumerate() {
        let [x, y, z] = chart.position(node);
        let r = (x * x + y * y + z * z).sqrt();
        exact.set(idx, [C64::new(conf.u(r).powi(-2), 0.0), C64::new(0.0, 0.0)]);
    }
    let taus = grid(0.44, 0.82, 20);
    study("exact kernel", &setup, &exact, &taus);

    let t1 = std::time::Instant::now();
    let sol = solve_witten(&setup, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], &SolverConfig::default())
        .unwrap();
    println!("solved in {:?} ({} iters)", t1.elapsed(), sol.iterations);
    study("solved spinor", &setup, &sol.psi, &taus);
}
