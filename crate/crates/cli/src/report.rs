use zcz_core::correlation::{FamilyCertificate, Optimality, RhoFormula, ZczCertificate};

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn class(cert: &ZczCertificate) -> String {
    let perf = &cert.performance;
    match perf.class {
        Optimality::Optimal => format!("rho={} optimal", perf.rho),
        Optimality::NearOptimal => {
            let (num, label) = match perf.formula {
                RhoFormula::Binary => (2 * cert.k * (cert.z + 1), "2K(Z+1)/L"),
                RhoFormula::General => (cert.k * (cert.z + 2), "K(Z+2)/L"),
            };
            format!("rho={} near-optimal ({label}={})", perf.rho, num as f64 / cert.l as f64)
        }
        Optimality::Neither => format!("rho={}", perf.rho),
    }
}

pub fn print_family(cert: &FamilyCertificate, zc: usize) {
    let first = &cert.sets[0];
    println!(
        "family: {} sets, K={} Z={} L={} Zc={zc}",
        cert.sets.len(),
        first.k,
        first.z,
        first.l
    );
    for (t1, set) in cert.sets.iter().enumerate() {
        println!(
            "set {t1}: ({},{},{}) {} {}",
            set.k,
            set.z,
            set.l,
            class(set),
            verdict(set.pass)
        );
        if let Some(w) = set.first_witness() {
            println!("  witness: ({}, {}) shift {} value {:?}", w.i, w.j, w.shift, w.value);
        }
    }
    for pair in &cert.inter {
        println!(
            "sets {}-{}: Zc={} {}",
            pair.a,
            pair.b,
            pair.report.zc,
            verdict(pair.report.pass)
        );
        if let Some(v) = pair.report.violations.first() {
            println!(
                "  witness: ({}, {}) shift {} value {:?}",
                v.first.i, v.first.j, v.first.shift, v.first.value
            );
        }
    }
    let u = &cert.union;
    println!("union: ({},{},{}) {} {}", u.k, u.z, u.l, class(u), verdict(u.pass));
}

pub fn print_result(pass: bool) {
    println!("result: {}", if pass { "PASS" } else { "FAIL" });
}
