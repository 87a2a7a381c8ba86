// Temporary calibration probe: compares optimizer winners against the
// published table for each transfer model. Not part of the library.

use pcfec::optimizer::{full_report, ModelChoice, OhTarget, OptimizerConfig};
use pcfec::product::DecoderKind;

const PUBLISHED_SR: [(u32, u32, u32); 14] = [
    (8, 3, 76),
    (8, 3, 28),
    (9, 3, 201),
    (9, 3, 147),
    (9, 3, 93),
    (9, 3, 39),
    (9, 3, 0),
    (10, 3, 378),
    (10, 3, 318),
    (10, 3, 258),
    (10, 3, 198),
    (10, 3, 138),
    (10, 3, 78),
    (10, 3, 18),
];

const PUBLISHED_IBDD: [(u32, u32, u32); 14] = [
    (8, 4, 16),
    (8, 3, 28),
    (9, 4, 98),
    (9, 4, 26),
    (9, 3, 93),
    (9, 3, 39),
    (9, 3, 0),
    (10, 4, 163),
    (10, 4, 83),
    (10, 4, 3),
    (10, 4, 0),
    (10, 3, 138),
    (10, 3, 78),
    (10, 3, 18),
];

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "ideal".into());
    let choice = match which.as_str() {
        "ideal" => ModelChoice::Ideal,
        "analytic" => ModelChoice::AnalyticWe,
        "mc" => ModelChoice::McEstimated {
            trials: 20_000,
            seed: 7,
        },
        other => panic!("unknown model {other}"),
    };
    let cfg = OptimizerConfig::default();
    let targets = OhTarget::all();
    for (kind, published) in [
        (DecoderKind::IbddSr, &PUBLISHED_SR),
        (DecoderKind::Ibdd, &PUBLISHED_IBDD),
    ] {
        let t0 = std::time::Instant::now();
        let report = full_report(&targets, &[kind], &cfg, &choice).unwrap();
        let mut vt_matches = 0;
        println!("== model={which} kind={kind} ({:?})", t0.elapsed());
        for (entry, &(pv, pt, ps)) in report.entries.iter().zip(published) {
            let w = &entry.winner;
            let vt_ok = w.params.v == pv && w.params.t == pt;
            if vt_ok {
                vt_matches += 1;
            }
            let pub_thr = if vt_ok {
                String::new()
            } else {
                match entry
                    .runners_up
                    .iter()
                    .find(|c| c.params.v == pv && c.params.t == pt)
                {
                    Some(c) => format!(
                        " published ({pv},{pt},{ps}) thr={:.6e} gap={:+.3e}",
                        c.threshold_p,
                        w.threshold_p - c.threshold_p
                    ),
                    None => format!(" published ({pv},{pt},{ps}) NOT ADMISSIBLE"),
                }
            };
            println!(
                "{:>5}  winner ({},{},{:>4}) thr={:.6e} ebn0={:.3} {}{}",
                entry.target_label,
                w.params.v,
                w.params.t,
                w.params.s,
                w.threshold_p,
                w.threshold_ebn0_db,
                if vt_ok { "OK" } else { "MISS" },
                pub_thr
            );
            assert!(w.params.v < 11, "winner must avoid v in 11,12");
        }
        println!("-- {kind}: {vt_matches}/14 (v,t) matches");
    }
}
