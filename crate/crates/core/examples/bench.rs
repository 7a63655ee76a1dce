use cuspmink::config::{builtin, parse_field_config};
use cuspmink::cusp::{brute_force_nearest, nearest_cusps, Cusp, SearchBudget, SearchContext};
use cuspmink::ideal::FractionalIdeal;
use cuspmink::minkowski::verify_minkowski;
use cuspmink::volume::FdSampler;
use std::time::Instant;

fn main() {
    let budget = SearchBudget::default();
    for (name, text) in builtin::ALL {
        let k = parse_field_config(text).unwrap();
        let ok = FractionalIdeal::ring_of_integers(&k);
        let ctx = SearchContext::new(&k, &ok);
        let c_up = k.default_c_upper();
        let reps: Vec<Cusp> = k
            .cusp_reps
            .iter()
            .map(|(a, b)| Cusp::new(a.clone(), b.clone()).unwrap())
            .collect();
        let sampler = FdSampler::new(&k, &ok, &reps, c_up);

        // sample reduced points, run k=2 verifies
        let t0 = Instant::now();
        let n_verify = 200u64;
        let mut certified = 0;
        let mut pass = 0;
        for i in 0..n_verify {
            let s = sampler.sample(7, i, false);
            let rep = verify_minkowski(&ctx, &s.tau, c_up, &budget);
            if rep.certified {
                certified += 1;
            }
            if rep.pass {
                pass += 1;
            }
        }
        let dt = t0.elapsed().as_secs_f64();
        println!(
            "{name}: {n_verify} verifies in {dt:.2}s ({:.2} ms each), pass {pass}, certified {certified}",
            dt * 1000.0 / n_verify as f64
        );

        // k=1 queries (integral workload)
        let t0 = Instant::now();
        let n_mu = 500u64;
        for i in 0..n_mu {
            let s = sampler.sample(13, i, false);
            let _ = nearest_cusps(&ctx, &s.tau, 1, c_up, &budget);
        }
        let dt = t0.elapsed().as_secs_f64();
        println!("  mu1: {:.3} ms each", dt * 1000.0 / n_mu as f64);

        // brute force oracle cost (quadratic fields only)
        if k.degree == 2 {
            let s = sampler.sample(99, 0, false);
            let t0 = Instant::now();
            let _ = brute_force_nearest(&k, &s.tau, &ok, 6);
            println!("  brute force H=6: {:.2} s", t0.elapsed().as_secs_f64());
        }
    }
}
