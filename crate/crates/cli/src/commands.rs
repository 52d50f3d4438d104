use std::fs;
use std::io::Write;
use std::path::Path;

use bellpoly::geometry::{behavior_hull, enumerate_facets_with_progress, is_facet, membership, violating_vertex};
use bellpoly::io::{
    inequalities_to_json, inequalities_to_text, parse_inequalities, parse_vertices, vertices_to_json, vertices_to_text,
};
use bellpoly::quantum::{quantum_value_seesaw, ModelExport, SeesawOptions};
use bellpoly::rational::{format as fmt_q, to_f64};
use bellpoly::scenario::enumerate_vertices;
use bellpoly::symmetry::SymmetryGroup;
use bellpoly::wernerwolf::{membership_threshold, ww_enumerate, ww_membership, DEFAULT_WW_CAP};
use bellpoly::{FacetStatus, Inequality, Limits, MembershipCertificate, Rational, Representation, Scenario};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Command, Failure, Format, Global, SPEC_VERSION};

/// Facet enumeration beyond these sizes needs `--allow-long`.
const LONG_VERTICES: usize = 32;
const LONG_DIM: usize = 12;

type Outcome<T = ()> = Result<T, Failure>;

#[derive(Serialize)]
struct Caps {
    strategy: u64,
    vertex: u64,
    dim: u64,
    group: u64,
}

#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    scenario: Option<String>,
    representation: Option<&'static str>,
    seed: u64,
    caps: Caps,
    format: Format,
    output: Option<String>,
    options: Value,
}

struct Ctx<'a> {
    global: &'a Global,
    config: RunConfig,
}

impl<'a> Ctx<'a> {
    fn new(global: &'a Global, command: &'static str, options: Value) -> Self {
        let config = RunConfig {
            command,
            scenario: None,
            representation: None,
            seed: global.seed,
            caps: Caps {
                strategy: global.strategy_cap,
                vertex: global.vertex_cap,
                dim: global.dim_cap,
                group: global.group_cap,
            },
            format: global.format,
            output: global.output.as_ref().map(|p| p.display().to_string()),
            options,
        };
        Ctx { global, config }
    }

    fn set_scenario(&mut self, s: &Scenario, rep: Representation) {
        self.config.scenario = Some(format!("{},{},{}", s.n_parties, s.n_settings, s.n_outcomes));
        self.config.representation = Some(rep.tag());
    }

    fn limits(&self) -> Limits {
        Limits {
            max_vertices: usize::try_from(self.global.vertex_cap).unwrap_or(usize::MAX),
            max_dim: usize::try_from(self.global.dim_cap).unwrap_or(usize::MAX),
        }
    }

    fn text_preamble(&self) -> String {
        format!(
            "# spec_version {SPEC_VERSION}\n# config {}\n",
            serde_json::to_string(&self.config).expect("serializable config")
        )
    }

    /// Data file (vertices or inequalities): the core format plus the echo.
    fn emit_data(&self, text: String, json: String) -> Outcome {
        match self.global.format {
            Format::Text => self.write(&(self.text_preamble() + &text)),
            Format::Json => {
                let mut v: Value = serde_json::from_str(&json).map_err(|e| Failure { code: 3, message: e.to_string() })?;
                v["spec_version"] = json!(SPEC_VERSION);
                v["config"] = serde_json::to_value(&self.config).expect("serializable config");
                self.write(&(serde_json::to_string_pretty(&v).expect("serializable") + "\n"))
            }
        }
    }

    /// Report: text lines, or a JSON object with the echo added.
    fn emit_report(&self, lines: &[String], body: Value) -> Outcome {
        match self.global.format {
            Format::Text => {
                let mut out = self.text_preamble();
                for l in lines {
                    out.push_str(l);
                    out.push('\n');
                }
                self.write(&out)
            }
            Format::Json => {
                let mut v = json!({
                    "spec_version": SPEC_VERSION,
                    "config": serde_json::to_value(&self.config).expect("serializable config"),
                });
                if let Value::Object(fields) = body {
                    for (k, x) in fields {
                        v[k] = x;
                    }
                }
                self.write(&(serde_json::to_string_pretty(&v).expect("serializable") + "\n"))
            }
        }
    }

    fn write(&self, content: &str) -> Outcome {
        match &self.global.output {
            Some(path) => fs::write(path, content)
                .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes()).map_err(|e| Failure::usage(e.to_string()))
            }
        }
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn row(v: &[Rational]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
}

fn ineq_line(f: &Inequality) -> String {
    format!("{} : {}", fmt_q(&f.bound), row(&f.coefficients))
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

pub fn run(global: &Global, command: &Command) -> Outcome {
    match command {
        Command::Vertices(a) => {
            let mut ctx = Ctx::new(global, "vertices", json!({}));
            let rep = a.rep.into();
            ctx.set_scenario(&a.scenario, rep);
            let vertices = enumerate_vertices(&a.scenario, rep, global.strategy_cap)?;
            ctx.emit_data(vertices_to_text(&a.scenario, rep, &vertices), vertices_to_json(&a.scenario, rep, &vertices))
        }
        Command::Facets(a) => {
            let mut ctx = Ctx::new(global, "facets", json!({ "allow_long": global.allow_long }));
            let rep = a.rep.into();
            ctx.set_scenario(&a.scenario, rep);
            let facets = facets(&ctx, &a.scenario, rep)?;
            ctx.emit_data(inequalities_to_text(&a.scenario, rep, &facets), inequalities_to_json(&a.scenario, rep, &facets))
        }
        Command::Classify { input } => {
            let mut ctx = Ctx::new(global, "classify", json!({ "input": input.display().to_string() }));
            let (s, rep, ineqs) = parse_inequalities(&read(input)?)?;
            ctx.set_scenario(&s, rep);
            classify(&ctx, &s, rep, &ineqs)
        }
        Command::Check { input, points } => {
            let mut ctx = Ctx::new(
                global,
                "check",
                json!({
                    "input": input.display().to_string(),
                    "points": points.as_ref().map(|p| p.display().to_string()),
                }),
            );
            let (s, rep, ineqs) = parse_inequalities(&read(input)?)?;
            ctx.set_scenario(&s, rep);
            let queries = match points {
                Some(p) => {
                    let (ps, prep, pts) = parse_vertices(&read(p)?)?;
                    if ps != s || prep != rep {
                        return Err(Failure::usage("points and inequalities belong to different scenarios"));
                    }
                    pts
                }
                None => Vec::new(),
            };
            check(&ctx, &s, rep, &ineqs, &queries)
        }
        Command::Ww { parties, points } => {
            let mut ctx = Ctx::new(
                global,
                "ww",
                json!({ "parties": parties, "points": points.as_ref().map(|p| p.display().to_string()) }),
            );
            match (parties, points) {
                (Some(n), None) => {
                    let n = *n;
                    let s = Scenario::new(n, 2, 2)?;
                    let rep = Representation::FullCorrelation;
                    ctx.set_scenario(&s, rep);
                    let family: Vec<Inequality> = ww_enumerate(n, DEFAULT_WW_CAP)?.collect();
                    ctx.emit_data(inequalities_to_text(&s, rep, &family), inequalities_to_json(&s, rep, &family))
                }
                (None, Some(p)) => {
                    let (s, rep, pts) = parse_vertices(&read(p)?)?;
                    ctx.set_scenario(&s, rep);
                    ww_points(&ctx, &s, &pts)
                }
                _ => Err(Failure::usage("give exactly one of --parties or --points")),
            }
        }
        Command::Quantum { input, dims, restarts, max_sweeps } => {
            let mut ctx = Ctx::new(
                global,
                "quantum",
                json!({
                    "input": input.display().to_string(),
                    "dims": dims,
                    "restarts": restarts,
                    "max_sweeps": max_sweeps,
                }),
            );
            let (s, rep, ineqs) = parse_inequalities(&read(input)?)?;
            ctx.set_scenario(&s, rep);
            let dims = dims.clone().unwrap_or_else(|| vec![2; s.n_parties]);
            ctx.config.options["dims"] = json!(dims);
            let opts = SeesawOptions {
                restarts: *restarts as usize,
                seed: global.seed,
                max_sweeps: *max_sweeps,
                ..Default::default()
            };
            quantum(&ctx, &ineqs, &dims, &opts)
        }
    }
}

fn facets(ctx: &Ctx, s: &Scenario, rep: Representation) -> Outcome<Vec<Inequality>> {
    let vertices = enumerate_vertices(s, rep, ctx.global.strategy_cap)?;
    let dim = behavior_hull(&vertices)?.dim;
    let long = vertices.len() > LONG_VERTICES || dim > LONG_DIM;
    if long && !ctx.global.allow_long {
        return Err(Failure {
            code: 2,
            message: format!(
                "{s} has {} vertices in dimension {dim}; enumeration may take hours, rerun with --allow-long",
                vertices.len()
            ),
        });
    }
    let mut progress = |p: bellpoly::geometry::DdProgress| {
        if long {
            eprintln!("facets: vertex {}/{}, {} rays", p.inserted + 1, p.total, p.rays);
        }
    };
    Ok(enumerate_facets_with_progress(&vertices, ctx.limits(), &mut progress)?)
}

fn status_tag(s: FacetStatus) -> &'static str {
    match s {
        FacetStatus::Facet => "facet",
        FacetStatus::ValidNotFacet => "valid-not-facet",
        FacetStatus::Invalid => "invalid",
    }
}

fn classify(ctx: &Ctx, s: &Scenario, rep: Representation, ineqs: &[Inequality]) -> Outcome {
    let group = SymmetryGroup::new(s, rep, ctx.global.group_cap)?;
    let classes = group.classify(ineqs)?;
    let mut lines = vec![format!("# classes {} inequalities {} group_order {}", classes.len(), ineqs.len(), group.order())];
    for (i, c) in classes.iter().enumerate() {
        lines.push(format!(
            "class {} orbit_size {} members_seen {} : {}",
            i + 1,
            c.orbit_size,
            c.members_seen,
            ineq_line(&c.canonical)
        ));
    }
    let body = json!({
        "group_order": group.order(),
        "inequalities": ineqs.len(),
        "classes": classes.iter().map(|c| json!({
            "orbit_size": c.orbit_size,
            "members_seen": c.members_seen,
            "bound": fmt_q(&c.canonical.bound),
            "coefficients": strings(&c.canonical.coefficients),
        })).collect::<Vec<_>>(),
    });
    ctx.emit_report(&lines, body)
}

fn check(ctx: &Ctx, s: &Scenario, rep: Representation, ineqs: &[Inequality], points: &[bellpoly::Behavior]) -> Outcome {
    let vertices = enumerate_vertices(s, rep, ctx.global.strategy_cap)?;
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for (i, f) in ineqs.iter().enumerate() {
        let max = vertices.iter().map(|v| f.value(&v.entries)).max().expect("at least one vertex");
        let valid = max <= f.bound;
        let tight = max == f.bound;
        let status = is_facet(f, &vertices)?;
        let witness = violating_vertex(f, &vertices)?.map(|v| v.entries.clone());
        let mut line = format!(
            "inequality {}: {} {} max {} bound {} status {}",
            i + 1,
            if valid { "valid" } else { "invalid" },
            if tight { "tight" } else { "not-tight" },
            fmt_q(&max),
            fmt_q(&f.bound),
            status_tag(status),
        );
        if let Some(w) = &witness {
            line.push_str(&format!(" witness {}", row(w)));
        }
        lines.push(line);
        records.push(json!({
            "index": i + 1,
            "valid": valid,
            "tight": tight,
            "max_value": fmt_q(&max),
            "bound": fmt_q(&f.bound),
            "facet": status == FacetStatus::Facet,
            "status": status_tag(status),
            "witness": witness.as_deref().map(strings),
        }));
    }
    let mut point_records = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match membership(p, &vertices)? {
            MembershipCertificate::Inside { weights } => {
                lines.push(format!("point {}: inside", i + 1));
                point_records.push(json!({ "index": i + 1, "inside": true, "weights": strings(&weights) }));
            }
            MembershipCertificate::Outside { separator } => {
                lines.push(format!("point {}: outside separator {}", i + 1, ineq_line(&separator)));
                point_records.push(json!({
                    "index": i + 1,
                    "inside": false,
                    "separator": { "bound": fmt_q(&separator.bound), "coefficients": strings(&separator.coefficients) },
                }));
            }
        }
    }
    ctx.emit_report(&lines, json!({ "inequalities": records, "points": point_records }))
}

fn ww_points(ctx: &Ctx, s: &Scenario, points: &[bellpoly::Behavior]) -> Outcome {
    let threshold = membership_threshold(s.n_parties);
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let (inside, l1) = ww_membership(p)?;
        lines.push(format!(
            "point {}: {} l1 {} threshold {}",
            i + 1,
            if inside { "inside" } else { "outside" },
            fmt_q(&l1),
            fmt_q(&threshold)
        ));
        records.push(json!({ "index": i + 1, "inside": inside, "l1": fmt_q(&l1), "threshold": fmt_q(&threshold) }));
    }
    ctx.emit_report(&lines, json!({ "points": records }))
}

fn quantum(ctx: &Ctx, ineqs: &[Inequality], dims: &[usize], opts: &SeesawOptions) -> Outcome {
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for (i, f) in ineqs.iter().enumerate() {
        let r = quantum_value_seesaw(f, dims, opts)?;
        let bound = to_f64(&f.bound);
        let ratio = r.best.violation_ratio;
        lines.push(format!(
            "inequality {}: value {:.10} bound {} ratio {} converged {} best_restart {}",
            i + 1,
            r.best.value,
            fmt_q(&f.bound),
            ratio.map_or("n/a".to_string(), |x| format!("{x:.6}")),
            r.converged,
            r.best_restart,
        ));
        records.push(json!({
            "index": i + 1,
            "value": r.best.value,
            "bound": fmt_q(&f.bound),
            "bound_f64": bound,
            "violation_ratio": ratio,
            "converged": r.converged,
            "best_restart": r.best_restart,
            "sweeps": r.sweeps,
            "restart_values": r.restart_values,
            "model": ModelExport::new(&r.best.model, Some(r.best.value))?,
        }));
    }
    ctx.emit_report(&lines, json!({ "inequalities": records }))
}
