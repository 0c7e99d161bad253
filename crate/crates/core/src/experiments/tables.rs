//! Plot-ready CSV tables for the experiment records. One writer per record
//! type, fixed column order, dot decimal separator, shortest-round-trip
//! float formatting; the bodies are deterministic functions of the records,
//! which the determinism criteria compare byte for byte.

use super::{ChenSteinRecord, ExponentReport, LimitLawReport, PoissonSummary, TailCurve};
use crate::constants::{ConstMethod, ConstantEstimate};
use std::fmt::Write;

/// `eps,estimate,std_error,hits,clipped,retained` per grid point,
/// decreasing eps.
pub fn tail_csv(curve: &TailCurve) -> String {
    let mut out = String::from("eps,estimate,std_error,hits,clipped,retained\n");
    for p in &curve.points {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.eps, p.estimate, p.std_error, p.hits, p.clipped, p.retained
        )
        .expect("write to string");
    }
    out
}

/// `rep,min_deficit,count_t0,...` per replication; `min_deficit` is empty
/// when no pair qualified at the largest grid epsilon.
pub fn poisson_csv(summary: &PoissonSummary) -> String {
    let mut out = String::from("rep,min_deficit");
    for i in 0..summary.t_grid.len() {
        write!(out, ",count_t{i}").expect("write to string");
    }
    out.push('\n');
    for rep in &summary.per_rep {
        write!(out, "{}", rep.rep).expect("write to string");
        match rep.min_deficit {
            Some(d) => write!(out, ",{d}").expect("write to string"),
            None => out.push(','),
        }
        for c in &rep.counts {
            write!(out, ",{c}").expect("write to string");
        }
        out.push('\n');
    }
    out
}

/// `rep,rescaled_deficit` per replication.
pub fn limit_csv(report: &LimitLawReport) -> String {
    let mut out = String::from("rep,rescaled_deficit\n");
    for (rep, d) in report.rescaled_deficits.iter().enumerate() {
        writeln!(out, "{rep},{d}").expect("write to string");
    }
    out
}

/// `mode,n,rep,deficit` per replication per grid point.
pub fn exponent_csv(report: &ExponentReport) -> String {
    let mut out = String::from("mode,n,rep,deficit\n");
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            report.mode.label(),
            row.n,
            row.rep,
            row.deficit
        )
        .expect("write to string");
    }
    out
}

/// `n,t,eps_n,p,q,b1,b2,b1_scaled,b2_scaled` per diagnostic point.
pub fn chen_stein_csv(records: &[ChenSteinRecord]) -> String {
    let mut out = String::from("n,t,eps_n,p,q,b1,b2,b1_scaled,b2_scaled\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n, r.t, r.eps_n, r.p, r.q, r.b1, r.b2, r.b1_scaled, r.b2_scaled
        )
        .expect("write to string");
    }
    out
}

/// `a,method,budget,value,std_error,converged,shell_hits` per estimate.
pub fn constants_csv(estimates: &[ConstantEstimate]) -> String {
    let mut out = String::from("a,method,budget,value,std_error,converged,shell_hits\n");
    for e in estimates {
        let method = match e.method {
            ConstMethod::Mc5d => "mc5d",
            ConstMethod::Reduced3d => "reduced3d",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.a, method, e.budget, e.value, e.std_error, e.converged, e.shell_hits
        )
        .expect("write to string");
    }
    out
}
