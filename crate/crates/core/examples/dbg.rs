use timescale_core::matfun::{lyap_dt, rootq_principal, SymMatrix};
use timescale_core::presets;

fn main() {
    let coarse = presets::companion_coarse_dt();
    let bb = SymMatrix::new(coarse.b() * coarse.b().transpose()).unwrap();
    let p = lyap_dt(coarse.a(), &bb).unwrap();
    for q in 1..=8u32 {
        let r = rootq_principal(coarse.a(), q).unwrap();
        let m = p.as_matrix() - &r * p.as_matrix() * r.transpose();
        let m = (&m + m.transpose()) * 0.5;
        let tested = SymMatrix::new(m).unwrap();
        let eigs = tested.eigenvalues_desc();
        println!("q={q}: {:?}", eigs);
    }
    // ratio sweep for h
    let ct = presets::companion_ct();
    for k in 0..8 {
        let h = 2f64.powi(-k);
        let q = timescale_core::matfun::noise_gramian(ct.f(), ct.g(), h).unwrap();
        let e = q.eigenvalues_desc();
        println!("h=2^-{k}: l1/l2={:.6} l3/l1={:.3e}", e[0]/e[1], e[2]/e[0]);
    }
}
