//! Reproduction pipelines, single-check reports and grid rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::certify::{
    certify_indistinguishability, certify_irreducibility, certify_irredundancy, check_orthogonality,
    classify_hidden_nonlocality, oplm_space, CertVerdict, Classification, Irreducibility, IrredundancyVerdict,
    PartyOplm, Verdict,
};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::ket::print_ket;
use crate::state::StateSet;

pub const UNKNOWN_BANNER: &str = "NOTE: Unknown ≠ disproven: the certifiers check sufficient conditions only.";

/// Reproduction targets and the verdict claimed for each.
pub const EXAMPLES: &[(&str, &str, &str)] = &[
    ("example1", "type1:11", "TypeI"),
    ("example2", "type1:13", "TypeI"),
    ("example3", "strong11", "StrongTypeI"),
    ("example4", "type2-78", "TypeII"),
    ("multiparty", "multi:11,11,13", "TypeI"),
];

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub pipeline: String,
    pub family: String,
    pub claimed: String,
    pub matches_claim: bool,
    pub classification: Classification,
    /// Wall-clock milliseconds per stage.
    pub timings_ms: BTreeMap<String, f64>,
}

pub fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::TypeI => "TypeI",
        Verdict::StrongTypeI => "StrongTypeI",
        Verdict::TypeII => "TypeII",
        Verdict::NotEstablished(_) => "NotEstablished",
    }
}

/// Classify a family with its shipped measurement, protocol and witnesses.
pub fn classify_family(family: &Family) -> Result<(StateSet, Classification, BTreeMap<String, f64>)> {
    let mut timings = BTreeMap::new();
    let t = Instant::now();
    let set = family.construct()?;
    timings.insert("construct".into(), t.elapsed().as_secs_f64() * 1e3);
    let m = family
        .activating_measurement()
        .ok_or_else(|| Error::UnsupportedFamily(format!("{family} has no activating measurement")))?;
    let protocol = family.builtin_protocol()?;
    let witnesses = family.outcome_witnesses().unwrap_or_default();
    let t = Instant::now();
    let c = classify_hidden_nonlocality(&set, &m, &protocol, &format!("builtin:{family}"), &witnesses);
    timings.insert("classify".into(), t.elapsed().as_secs_f64() * 1e3);
    Ok((set, c, timings))
}

pub fn reproduce(id: &str) -> Result<Report> {
    let &(_, fam, claimed) =
        EXAMPLES.iter().find(|(e, _, _)| *e == id).ok_or_else(|| Error::UnknownExample(id.to_string()))?;
    let family: Family = fam.parse()?;
    let (_, classification, timings_ms) = classify_family(&family)?;
    Ok(Report {
        pipeline: id.to_string(),
        family: fam.to_string(),
        claimed: claimed.to_string(),
        matches_claim: verdict_name(&classification.verdict) == claimed,
        classification,
        timings_ms,
    })
}

pub fn classification_text(c: &Classification) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set size:        {}", c.set_size);
    let _ = writeln!(s, "orthogonal:      {}", c.orthogonality.orthogonal);
    if let Some(p) = &c.protocol {
        let _ = writeln!(s, "protocol:        {} ({}, {} leaves)", c.protocol_id, if p.accepted { "accepted" } else { "rejected" }, p.leaves);
        for f in p.failures.iter().take(5) {
            let _ = writeln!(s, "  failing leaf {} with {}", f.path.join(" "), f.candidates.join(","));
        }
    }
    let _ = writeln!(s, "irredundancy:    {:?}", c.irredundancy.verdict);
    for pc in &c.irredundancy.parties {
        let _ = writeln!(s, "  discard {}: clique {} vs threshold {}", pc.party, pc.clique_size, pc.threshold);
    }
    let _ = writeln!(s, "measurement:     {} (OP: {})", c.measurement, c.orthogonality_preserving.as_ref().is_some_and(|o| o.preserving));
    for o in &c.outcomes {
        let ind = o.indistinguishability.as_ref();
        let _ = write!(
            s,
            "  outcome {}: {} states, witness {} -> {:?}",
            o.outcome_id,
            o.cardinality,
            ind.map_or(0, |c| c.witness.len()),
            ind.map(|c| c.verdict)
        );
        if let Some(ir) = &o.irreducibility {
            let _ = write!(s, ", irreducibility {}", irreducibility_name(&ir.verdict));
        }
        s.push('\n');
    }
    let _ = writeln!(s, "verdict:         {}", c.verdict);
    s
}

fn irreducibility_name(v: &Irreducibility) -> &'static str {
    match v {
        Irreducibility::Irreducible => "Irreducible",
        Irreducibility::Reducible { .. } => "Reducible",
        Irreducibility::Unknown => "Unknown",
    }
}

pub fn report_text(r: &Report) -> String {
    let mut s = format!("pipeline {} ({})\n", r.pipeline, r.family);
    s.push_str(&classification_text(&r.classification));
    let _ = writeln!(
        s,
        "claimed:         {} -> {}",
        r.claimed,
        if r.matches_claim { "reproduced" } else { "NOT reproduced" }
    );
    s
}

/// Result of a single certification check; `passed == None` means Unknown.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: Option<bool>,
    pub details: Value,
    #[serde(skip)]
    pub text: String,
}

pub const CHECKS: &[&str] = &["orthogonality", "irredundancy", "irreducibility", "indistinguishability", "oplm-dim"];

fn oplm_rows(rows: &[PartyOplm]) -> String {
    rows.iter()
        .map(|p| format!("  party {}: support dim {}, OPLM dim {}, {} constraints\n", p.party, p.support_dim, p.dimension, p.n_constraints))
        .collect()
}

pub fn run_check(check: &str, set: &StateSet, party: Option<&str>, witness: Option<&[String]>) -> Result<CheckReport> {
    let (passed, details, text) = match check {
        "orthogonality" => {
            let r = check_orthogonality(set);
            let text = if r.orthogonal {
                format!("{} states pairwise orthogonal\n", set.len())
            } else {
                let pairs: Vec<String> = r.violations.iter().map(|(a, b)| format!("({a},{b})")).collect();
                format!("non-orthogonal pairs: {}\n", pairs.join(" "))
            };
            (Some(r.orthogonal), serde_json::to_value(&r)?, text)
        }
        "irredundancy" => {
            let c = certify_irredundancy(set);
            let mut text = format!("verdict: {:?}\n", c.verdict);
            for p in &c.parties {
                let _ = writeln!(text, "  discard {}: clique {} vs threshold {}", p.party, p.clique_size, p.threshold);
            }
            let passed = match c.verdict {
                IrredundancyVerdict::Irredundant => Some(true),
                IrredundancyVerdict::Redundant(_) => Some(false),
                IrredundancyVerdict::Unknown => None,
            };
            (passed, serde_json::to_value(&c)?, text)
        }
        "irreducibility" => {
            let c = certify_irreducibility(set)?;
            let passed = match c.verdict {
                Irreducibility::Irreducible => Some(true),
                Irreducibility::Reducible { .. } => Some(false),
                Irreducibility::Unknown => None,
            };
            let text = format!("verdict: {}\n{}", irreducibility_name(&c.verdict), oplm_rows(&c.parties));
            (passed, serde_json::to_value(&c)?, text)
        }
        "indistinguishability" => {
            let c = certify_indistinguishability(set, witness)?;
            let passed = (c.verdict == CertVerdict::Certified).then_some(true);
            let mut text = format!("verdict: {:?} (witness of {} states)\n{}", c.verdict, c.witness.len(), oplm_rows(&c.parties));
            if let Some(r) = &c.reason {
                let _ = writeln!(text, "  {r}");
            }
            (passed, serde_json::to_value(&c)?, text)
        }
        "oplm-dim" => {
            let parties: Vec<String> = match party {
                Some(p) => vec![p.to_string()],
                None => set.space().parties().iter().map(|p| p.label.clone()).collect(),
            };
            let bases = parties.iter().map(|p| oplm_space(set, p, true)).collect::<Result<Vec<_>>>()?;
            let rows: Vec<PartyOplm> = bases.iter().map(PartyOplm::from).collect();
            let trivial = rows.iter().all(|r| r.dimension == 1);
            (Some(trivial), serde_json::to_value(&bases)?, oplm_rows(&rows))
        }
        other => return Err(Error::Parse(format!("unknown check `{other}` (expected one of {})", CHECKS.join(", ")))),
    };
    Ok(CheckReport { check: check.to_string(), passed, details, text })
}

/// Figure label for each small-support state; `None` sends it to the legend.
fn figure_labels(set: &StateSet) -> Vec<Option<String>> {
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    set.states()
        .iter()
        .map(|s| {
            if s.coordinate_count() > 4 {
                return None;
            }
            let base = crate::measurement::base_label(&s.label);
            let one_row = s.factors[0].nonzero_indices().len() == 1;
            let kind = if base.starts_with("psi") {
                if one_row { "h" } else { "v" }
            } else if base.starts_with("phi") {
                if one_row { "H" } else { "V" }
            } else {
                return Some(base.to_lowercase());
            };
            let n = counters.entry(kind).or_insert(0);
            *n += 1;
            Some(format!("{kind}{n}"))
        })
        .collect()
}

struct Grid {
    rows: usize,
    cols: usize,
    cells: BTreeMap<(usize, usize), Vec<String>>,
    legend: Vec<String>,
}

fn grid(set: &StateSet) -> Result<Grid> {
    if set.space().n_parties() != 2 {
        return Err(Error::Precondition("rendering needs a bipartite set".into()));
    }
    let mut cells: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    let mut legend = Vec::new();
    for (s, label) in set.states().iter().zip(figure_labels(set)) {
        match label {
            Some(l) => {
                for c in s.coordinates() {
                    cells.entry((c[0], c[1])).or_default().push(l.clone());
                }
            }
            None => legend.push(format!(
                "{} = {} ⊗ {}",
                s.label,
                print_ket(&s.factors[0]),
                print_ket(&s.factors[1])
            )),
        }
    }
    Ok(Grid { rows: set.space().dim(0), cols: set.space().dim(1), cells, legend })
}

/// Plain-text grid: rows are A indices, columns B indices.
pub fn render_text(set: &StateSet) -> Result<String> {
    let g = grid(set)?;
    let width = g.cells.values().map(|v| v.join("/").chars().count()).max().unwrap_or(1).max(3);
    let mut out = format!("{:>3} ", "");
    for j in 0..g.cols {
        let _ = write!(out, "{j:>width$} ");
    }
    out.push('\n');
    for i in 0..g.rows {
        let _ = write!(out, "{i:>3} ");
        for j in 0..g.cols {
            let cell = g.cells.get(&(i, j)).map_or(".".to_string(), |v| v.join("/"));
            let _ = write!(out, "{cell:>width$} ");
        }
        out.push('\n');
    }
    if !g.legend.is_empty() {
        out.push_str("legend:\n");
        for l in &g.legend {
            let _ = writeln!(out, "  {l}");
        }
    }
    Ok(out)
}

pub fn render_svg(set: &StateSet) -> Result<String> {
    let g = grid(set)?;
    let cell = 44;
    let margin = 30;
    let w = margin + cell * g.cols + 10;
    let h = margin + cell * g.rows + 20 + 18 * g.legend.len();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"monospace\" font-size=\"11\">\n"
    );
    for j in 0..g.cols {
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{j}</text>", margin + cell * j + cell / 2, margin - 8);
    }
    for i in 0..g.rows {
        let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{i}</text>", margin - 6, margin + cell * i + cell / 2 + 4);
        for j in 0..g.cols {
            let (x, y) = (margin + cell * j, margin + cell * i);
            let fill = if g.cells.contains_key(&(i, j)) { "#dde8f4" } else { "white" };
            let _ = writeln!(out, "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{fill}\" stroke=\"#555\"/>");
            if let Some(v) = g.cells.get(&(i, j)) {
                let _ = writeln!(
                    out,
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                    x + cell / 2,
                    y + cell / 2 + 4,
                    v.join("/")
                );
            }
        }
    }
    for (k, l) in g.legend.iter().enumerate() {
        let y = margin + cell * g.rows + 20 + 18 * k;
        let l = l.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(out, "<text x=\"{margin}\" y=\"{y}\">{l}</text>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// JSON envelope shared by CLI outputs.
pub fn envelope(kind: &str, passed: Option<bool>, body: Value) -> Value {
    json!({ "kind": kind, "passed": passed, "result": body })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{strong_type1_set, type1_set};
    use crate::state::SpaceSpec;

    #[test]
    fn render_type1_labels() {
        let t = render_text(&type1_set(11).unwrap()).unwrap();
        let g = grid(&type1_set(11).unwrap()).unwrap();
        for c in [(1, 0), (1, 1), (1, 9), (1, 10)] {
            assert_eq!(g.cells[&c], ["h1"]);
        }
        assert!(t.contains("legend:"));
        assert_eq!(g.legend.len(), 2);
        assert_eq!(g.cells[&(5, 3)], ["V1"]);
    }

    #[test]
    fn render_strong_m() {
        let g = grid(&strong_type1_set().unwrap()).unwrap();
        for c in [(1, 0), (1, 9), (6, 0), (6, 9)] {
            assert!(g.cells[&c].contains(&"m".to_string()));
        }
        assert!(render_svg(&strong_type1_set().unwrap()).unwrap().starts_with("<svg"));
    }

    #[test]
    fn render_single_state() {
        let s = StateSet::parse(SpaceSpec::bipartite(2, 3).unwrap(), &[("x", &["|1>", "|2>"])]).unwrap();
        let g = grid(&s).unwrap();
        assert_eq!(g.cells.len(), 1);
        assert_eq!(g.cells[&(1, 2)], ["x"]);
    }

    #[test]
    fn unknown_check_and_example() {
        let s = type1_set(11).unwrap();
        assert!(run_check("bogus", &s, None, None).is_err());
        assert!(matches!(reproduce("example9"), Err(Error::UnknownExample(_))));
    }
}
