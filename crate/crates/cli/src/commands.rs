//! One planner per subcommand. Planning reads and canonicalizes the inputs
//! (so the cache key is known) and returns the computation as a closure.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rht_core::catalog::{
    cross_section_table, koszul_numeric_test, lcs_formula_check, lcs_rank_table, model_minimality, psi_table,
    CatalogError, SurfaceSpec, MAX_KOSZUL_CAP, MAX_LCS_CAP,
};
use rht_core::cce::{cce_cdga, check_jacobi_via_d2, one_minimal_tower};
use rht_core::gca::GcaPresentation;
use rht_core::gradedlie::{free_lie_dims, presented_lie, witt_number, LieGradedData, LiePresentation};
use rht_core::malcev::{
    commutator_filtration_ranks, exp_magnus, grouplike_filtration_ranks, log_series, magnus, primitive_dims,
    GroupWord, SeriesError,
};
use rht_core::poly::TruncatedPoly;
use rht_core::sullivan::{build_minimal_model, PsiSpace, RelativeModel, SullivanAlgebra};
use serde_json::{json, Map, Value};

use crate::doc::{Document, Kind, LieDoc};
use crate::report::Report;
use crate::{CceCommand, Cli, Command, ConfCommand, KoszulCommand, LieCommand, LieSource, MalcevCommand, ModelCommand, Orientation, SpecArgs};

pub(crate) struct Request {
    /// Subcommand path, part of the cache key.
    pub subcommand: &'static str,
    pub echo: String,
    /// Canonical inputs: rendered documents and flag values, never paths.
    pub inputs: Vec<String>,
    pub cap: Option<usize>,
}

/// `cce build` skips `H²` above this many degree-2 monomials; genus 2 at
/// cap 6 has over 200000 and takes minutes.
const MAX_H2_MONOMIALS: usize = 25_000;

pub(crate) type Compute = Box<dyn FnOnce() -> Result<Report, String>>;

fn load(path: &Path, kind: Kind) -> Result<Document, String> {
    let doc = Document::from_file(path)?;
    if doc.kind != kind {
        return Err(format!("{}: expected a {kind} document, found {}", path.display(), doc.kind));
    }
    Ok(doc)
}

fn err(context: &str) -> impl Fn(&dyn std::fmt::Display) -> String + '_ {
    move |e| format!("{context}: {e}")
}

fn cap_u32(cap: usize) -> Result<u32, String> {
    if cap < 1 {
        return Err("--max-degree must be at least 1".into());
    }
    u32::try_from(cap).map_err(|_| "--max-degree is too large".to_string())
}

fn big(c: &BigInt) -> Value {
    c.to_i64().map_or_else(|| Value::String(c.to_string()), Value::from)
}

fn poly(p: &TruncatedPoly) -> Value {
    Value::Array(p.coeffs().iter().map(big).collect())
}

fn psi(space: &PsiSpace) -> Value {
    Value::Object(space.0.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

fn differentials(p: &GcaPresentation) -> Value {
    Value::Array(
        p.generators()
            .iter()
            .enumerate()
            .map(|(i, g)| json!({"name": g.name, "degree": g.degree, "d": p.format_element(p.d_of(i))}))
            .collect(),
    )
}

pub(crate) fn plan(cli: &Cli) -> Result<(Request, Compute), String> {
    let cap = cli.max_degree;
    match &cli.command {
        Command::Model(ModelCommand::Build { file }) => {
            let doc = load(file, Kind::Cohomology)?;
            let table = doc.cohomology().map_err(|e| format!("{}: {e}", file.display()))?;
            let cap32 = cap_u32(cap)?;
            let echo = format!("model build {} --max-degree {cap}", file.display());
            let request = Request {
                subcommand: "model build",
                echo: echo.clone(),
                inputs: vec![doc.render()],
                cap: Some(cap),
            };
            Ok((
                request,
                Box::new(move || {
                    let mm = build_minimal_model(&table, cap32).map_err(|e| err("model build")(&e))?;
                    let mut r = Report::new(echo, Some(cap));
                    r.set("generators", differentials(mm.model.algebra()));
                    r.set("psi", psi(&mm.model.psi_space()));
                    r.set("minimal", mm.model.check_minimal());
                    r.set("converged", mm.converged);
                    let verified = mm.verify().map_err(|e| err("model build")(&e))?;
                    r.set("quasi_isomorphism", verified);
                    if !mm.converged {
                        r.guards.push(format!(
                            "construction did not converge within cap {cap}; the model is only valid through that degree"
                        ));
                    }
                    if !verified {
                        r.fail("the map to the cohomology table is not a quasi-isomorphism through the cap");
                    }
                    Ok(r)
                }),
            ))
        }
        Command::Model(ModelCommand::CheckMinimal { file }) => {
            let (doc, p) = cdga(file)?;
            let echo = format!("model check-minimal {}", file.display());
            let request = Request {
                subcommand: "model check-minimal",
                echo: echo.clone(),
                inputs: vec![doc.render()],
                cap: None,
            };
            Ok((
                request,
                Box::new(move || {
                    let s = SullivanAlgebra::new(p).map_err(|e| err("model check-minimal")(&e))?;
                    let mut r = Report::new(echo, None);
                    r.set("minimal", s.check_minimal());
                    r.set("filtration", json!(s.filtration()));
                    if let Some(g) = s.minimality_witness() {
                        let i = s.algebra().index_of(&g).expect("witness is a generator");
                        r.fail(format!("d({g}) = {} has a linear term", s.algebra().format_element(s.algebra().d_of(i))));
                    }
                    Ok(r)
                }),
            ))
        }
        Command::Model(ModelCommand::RelCriterion { file }) => {
            let doc = load(file, Kind::Cdga)?;
            let c = doc.cdga().map_err(|e| format!("{}: {e}", file.display()))?;
            let base = c
                .base
                .ok_or_else(|| format!("{}: a relative model needs a `base` entry", file.display()))?;
            let echo = format!("model rel-criterion {}", file.display());
            let request = Request {
                subcommand: "model rel-criterion",
                echo: echo.clone(),
                inputs: vec![doc.render()],
                cap: None,
            };
            let p = c.presentation;
            Ok((
                request,
                Box::new(move || {
                    let names: Vec<&str> = base.iter().map(String::as_str).collect();
                    let m = RelativeModel::new(p, &names).map_err(|e| err("model rel-criterion")(&e))?;
                    let seq = m.psi_exact_sequence().map_err(|e| err("model rel-criterion")(&e))?;
                    let crit = m.minimality_criterion().map_err(|e| err("model rel-criterion")(&e))?;
                    let mut r = Report::new(echo, None);
                    r.set("base", json!(m.base_generators()));
                    r.set("fiber", json!(m.fiber_generators()));
                    r.set("relatively_minimal", m.check_relative_minimal());
                    r.set("psi_base", psi(&seq.base));
                    r.set("psi_fiber", psi(&seq.fiber));
                    r.set("psi_total", psi(&seq.total));
                    let connecting: Vec<Value> = seq
                        .connecting
                        .iter()
                        .filter(|(_, mat)| mat.rows() + mat.cols() > 0)
                        .map(|(k, mat)| {
                            let (rows, cols) = (mat.rows(), mat.cols());
                            json!({
                                "degree": k,
                                "rank": mat.rank(),
                                "from": format!("H^{k}(Q fiber) dim {cols}"),
                                "to": format!("H^{}(Q base) dim {rows}", k + 1),
                                "isomorphism": rows == cols && mat.rank() == rows,
                            })
                        })
                        .collect();
                    r.set("connecting", Value::Array(connecting));
                    r.set("c1_connecting_zero", crit.c1);
                    r.set("c2_inclusion_injective", crit.c2);
                    r.set("c3_projection_surjective", crit.c3);
                    r.set("total_minimal", crit.total_minimal);
                    r.set("consistent", crit.consistent());
                    if !crit.consistent() {
                        r.fail(format!(
                            "criteria disagree: c1={} c2={} c3={} total minimal={}",
                            crit.c1, crit.c2, crit.c3, crit.total_minimal
                        ));
                    }
                    if !crit.total_minimal {
                        let total = m.total().map_err(|e| err("model rel-criterion")(&e))?;
                        let g = total.minimality_witness().expect("total is not minimal");
                        r.fail(format!("total algebra is not minimal: d({g}) has a linear term"));
                    }
                    Ok(r)
                }),
            ))
        }
        Command::Psi { file } => {
            let (doc, p) = cdga(file)?;
            let echo = format!("psi {}", file.display());
            let request = Request {
                subcommand: "psi",
                echo: echo.clone(),
                inputs: vec![doc.render()],
                cap: None,
            };
            Ok((
                request,
                Box::new(move || {
                    let s = SullivanAlgebra::new(p).map_err(|e| err("psi")(&e))?;
                    let mut r = Report::new(echo, None);
                    r.set("psi", psi(&s.psi_space()));
                    r.set("minimal", s.check_minimal());
                    Ok(r)
                }),
            ))
        }
        Command::Lie(LieCommand::Dims(source)) => plan_lie(source, cap, false),
        Command::Lie(LieCommand::Lcs(source)) => plan_lie(source, cap, true),
        Command::Cce(CceCommand::Build(source)) => {
            let (label, input, source) = lie_source(source)?;
            let echo = format!("cce build {label} --max-degree {cap}");
            let cap32 = cap_u32(cap)?;
            let request = Request {
                subcommand: "cce build",
                echo: echo.clone(),
                inputs: vec![input],
                cap: Some(cap),
            };
            Ok((
                request,
                Box::new(move || {
                    let l = source.resolve(cap32)?;
                    let mut r = Report::new(echo, Some(cap));
                    if l.cap() < cap32 {
                        r.cap = Some(l.cap() as usize);
                        r.guards.push(format!("bracket table is only given through degree {}", l.cap()));
                    }
                    r.set("lie_dims", json!(l.dims()));
                    if let Some(w) = check_jacobi_via_d2(&l).map_err(|e| err("cce build")(&e))? {
                        r.set("d_squared_zero", false);
                        if let Some((a, b, c)) = l.jacobi_violation() {
                            let names = l.labels();
                            r.set("jacobi_violation", json!([names[a], names[b], names[c]]));
                        }
                        r.fail(format!("d²({}) = {}", w.generator, w.value));
                        return Ok(r);
                    }
                    let c = cce_cdga(&l, 3).map_err(|e| err("cce build")(&e))?;
                    let p = c.algebra();
                    let rows: Vec<Value> = p
                        .generators()
                        .iter()
                        .enumerate()
                        .map(|(i, g)| {
                            json!({"name": g.name, "weight": c.weights[i], "dual": c.duals[i], "d": p.format_element(p.d_of(i))})
                        })
                        .collect();
                    r.set("generators", Value::Array(rows));
                    r.set("d_squared_zero", true);
                    r.set("h1", p.cohomology_dim(1).map_err(|e| err("cce build")(&e))?);
                    let n = p.num_generators();
                    let pairs = n * n.saturating_sub(1) / 2;
                    if pairs <= MAX_H2_MONOMIALS {
                        r.set("h2", p.cohomology_dim(2).map_err(|e| err("cce build")(&e))?);
                    } else {
                        r.notes.push(format!("h2 skipped: {pairs} degree-2 monomials; lower --max-degree"));
                    }
                    r.notes.push("cohomology is of the truncated Lie algebra".into());
                    Ok(r)
                }),
            ))
        }
        Command::Cce(CceCommand::Tower { source, stage }) => {
            let stage = *stage;
            let (label, input, source) = lie_source(source)?;
            let LieInput::Presented(p) = source else {
                return Err("cce tower needs a presentation (generators and relators), not a bracket table".into());
            };
            let echo = format!("cce tower {label} --stage {stage}");
            let request = Request {
                subcommand: "cce tower",
                echo: echo.clone(),
                inputs: vec![input, format!("stage={stage}")],
                cap: Some(stage),
            };
            Ok((
                request,
                Box::new(move || {
                    let tower = one_minimal_tower(&p, stage, 3).map_err(|e| err("cce tower")(&e))?;
                    let mut r = Report::new(echo, Some(stage));
                    let mut rows = Vec::new();
                    let mut previous = 0;
                    for (s, c) in tower.stages.iter().enumerate() {
                        let a = c.algebra();
                        let new: Vec<String> = (previous..a.num_generators())
                            .map(|i| {
                                format!(
                                    "{} (weight {}): d = {}",
                                    a.generator(i).name,
                                    c.weights[i],
                                    a.format_element(a.d_of(i))
                                )
                            })
                            .collect();
                        previous = a.num_generators();
                        let h2 = a.cohomology(2).map_err(|e| err("cce tower")(&e))?.dim();
                        rows.push(json!({"stage": s + 2, "generators": a.num_generators(), "h2": h2, "new": new}));
                    }
                    r.set("stages", Value::Array(rows));
                    let mut ranks = Vec::new();
                    for f in &tower.inclusions {
                        ranks.push(f.induced_on_cohomology(2).map_err(|e| err("cce tower")(&e))?.rank());
                    }
                    r.set("inclusion_h2_ranks", json!(ranks));
                    Ok(r)
                }),
            ))
        }
        Command::Malcev(MalcevCommand::Verify { arity, samples, seed }) => {
            let (arity, samples, seed) = (*arity, *samples, *seed);
            if !(1..=4).contains(&arity) {
                return Err("--arity must be between 1 and 4".into());
            }
            if !(1..=8).contains(&cap) {
                return Err("malcev verify supports --max-degree between 1 and 8".into());
            }
            let echo = format!("malcev verify --arity {arity} --samples {samples} --seed {seed} --max-degree {cap}");
            let request = Request {
                subcommand: "malcev verify",
                echo: echo.clone(),
                inputs: vec![format!("arity={arity} samples={samples} seed={seed}")],
                cap: Some(cap),
            };
            Ok((request, Box::new(move || malcev_verify(echo, arity, cap, samples, seed).map_err(|e| err("malcev verify")(&e)))))
        }
        Command::Conf(c) => plan_conf(c, cap),
        Command::Koszul(KoszulCommand::Check { file }) => {
            let doc = load(file, Kind::Quadratic)?;
            let q = doc.quadratic().map_err(|e| format!("{}: {e}", file.display()))?;
            if cap > MAX_KOSZUL_CAP {
                return Err(format!("--max-degree {cap} exceeds the supported maximum {MAX_KOSZUL_CAP}"));
            }
            let echo = format!("koszul check {} --max-degree {cap}", file.display());
            let request = Request {
                subcommand: "koszul check",
                echo: echo.clone(),
                inputs: vec![doc.render()],
                cap: Some(cap),
            };
            Ok((
                request,
                Box::new(move || {
                    let k = koszul_numeric_test(&q, cap).map_err(|e| err("koszul check")(&e))?;
                    let mut r = Report::new(echo, Some(cap));
                    r.set("hilbert", poly(&k.hilbert));
                    r.set("dual_hilbert", poly(&k.dual_hilbert));
                    r.set("product", poly(&k.product));
                    r.set("holds", k.holds());
                    if let Some(i) = k.product.first_difference(&TruncatedPoly::one(cap)) {
                        r.fail(format!("coefficient of t^{i} in h_A(t)·h_A!(-t) is {}", k.product.coeff(i)));
                    }
                    r.notes.push("h_A(t)·h_A!(-t) = 1 is necessary for Koszulity, not sufficient".into());
                    Ok(r)
                }),
            ))
        }
    }
}

fn cdga(file: &Path) -> Result<(Document, GcaPresentation), String> {
    let doc = load(file, Kind::Cdga)?;
    let c = doc.cdga().map_err(|e| format!("{}: {e}", file.display()))?;
    Ok((doc, c.presentation))
}

enum LieInput {
    Presented(LiePresentation),
    Table(LieGradedData),
}

impl LieInput {
    fn resolve(self, cap: u32) -> Result<LieGradedData, String> {
        match self {
            LieInput::Presented(p) => presented_lie(&p, cap).map_err(|e| e.to_string()),
            LieInput::Table(t) => Ok(if t.cap() > cap { t.truncate(cap) } else { t }),
        }
    }
}

/// The echo label, the canonical input and the Lie algebra itself.
fn lie_source(source: &LieSource) -> Result<(String, String, LieInput), String> {
    if let Some(m) = source.free {
        return Ok((format!("--free {m}"), format!("free {m}"), LieInput::Presented(LiePresentation::free(m))));
    }
    if let Some(g) = source.surface {
        if g == 0 {
            return Err("--surface needs genus at least 1".into());
        }
        return Ok((
            format!("--surface {g}"),
            format!("surface {g}"),
            LieInput::Presented(LiePresentation::surface(g)),
        ));
    }
    let file = source.file.as_ref().expect("clap requires one source");
    let doc = load(file, Kind::Lie)?;
    let lie = doc.lie().map_err(|e| format!("{}: {e}", file.display()))?;
    let input = match lie {
        LieDoc::Presented(p) => LieInput::Presented(p),
        LieDoc::Table(t) => LieInput::Table(t),
    };
    Ok((file.display().to_string(), doc.render(), input))
}

fn plan_lie(source: &LieSource, cap: usize, lcs: bool) -> Result<(Request, Compute), String> {
    let cap32 = cap_u32(cap)?;
    let (label, input, lie) = lie_source(source)?;
    let (subcommand, key) = if lcs { ("lie lcs", "phi") } else { ("lie dims", "dims") };
    let echo = format!("{subcommand} {label} --max-degree {cap}");
    let free = source.free;
    let request = Request {
        subcommand,
        echo: echo.clone(),
        inputs: vec![input],
        cap: Some(cap),
    };
    Ok((
        request,
        Box::new(move || {
            let mut r = Report::new(echo, Some(cap));
            if let Some(m) = free {
                // Free algebras go straight to the necklace formula; the ideal
                // computation would only enumerate m^cap words to find no relations.
                r.set(key, json!(free_lie_dims(m as u64, cap32)));
                r.notes.push("free Lie algebra: Witt numbers".into());
                return Ok(r);
            }
            let l = lie.resolve(cap32)?;
            if l.cap() < cap32 {
                r.cap = Some(l.cap() as usize);
                r.guards.push(format!("bracket table is only given through degree {}", l.cap()));
            }
            if lcs {
                let t = l.lcs_ranks().map_err(|e| err(subcommand)(&e))?;
                r.set(key, json!(t.ranks));
            } else {
                r.set(key, json!(l.dims()));
            }
            Ok(r)
        }),
    ))
}

fn surface_spec(args: &SpecArgs) -> Result<(String, SurfaceSpec), String> {
    let spec = if let Some(path) = &args.spec {
        let doc = load(path, Kind::SurfaceSpec)?;
        doc.surface().map_err(|e| format!("{}: {e}", path.display()))?
    } else {
        let (Some(g), Some(l), Some(m)) = (args.genus, args.punctures, args.group) else {
            return Err("give --genus, --punctures and --group, or --spec".into());
        };
        let mut spec = SurfaceSpec::new(g, l, m);
        if let Some(o) = args.orientation {
            spec = spec.with_orientation(o == Orientation::Preserving);
        }
        spec.validate().map_err(|e| e.to_string())?;
        spec
    };
    let orientation = if spec.orientation_preserving { "preserving" } else { "reversing" };
    Ok((
        format!(
            "--genus {} --punctures {} --group {} --orientation {orientation}",
            spec.genus, spec.punctures, spec.group_order
        ),
        spec,
    ))
}

fn catalog_err(e: CatalogError) -> String {
    e.to_string()
}

fn plan_conf(c: &ConfCommand, cap: usize) -> Result<(Request, Compute), String> {
    match c {
        ConfCommand::Psi { spec, n } => {
            let (flags, spec) = surface_spec(spec)?;
            let n = *n;
            let echo = format!("conf psi {flags} --n {n}");
            let request = Request {
                subcommand: "conf psi",
                echo: echo.clone(),
                inputs: vec![flags, format!("n={n}")],
                cap: None,
            };
            Ok((
                request,
                Box::new(move || {
                    let mut r = Report::new(echo, None);
                    r.set("psi", psi(&psi_table(&spec, n).map_err(catalog_err)?));
                    if !spec.is_sphere() {
                        r.notes.push("rational K(π,1): ψ vanishes in degrees ≥ 2".into());
                    }
                    Ok(r)
                }),
            ))
        }
        ConfCommand::Minimality { spec, n, k } => {
            let (flags, spec) = surface_spec(spec)?;
            let (n, k) = (*n, *k);
            let echo = format!("conf minimality {flags} --n {n} --k {k}");
            let request = Request {
                subcommand: "conf minimality",
                echo: echo.clone(),
                inputs: vec![flags, format!("n={n} k={k}")],
                cap: None,
            };
            Ok((
                request,
                Box::new(move || {
                    let minimal = model_minimality(&spec, n, k).map_err(catalog_err)?;
                    let mut r = Report::new(echo, None);
                    r.set("minimal", minimal);
                    if !minimal {
                        let total = psi_table(&spec, n).map_err(catalog_err)?.dim(2);
                        let base = psi_table(&spec, k).map_err(catalog_err)?.dim(2);
                        let fiber = psi_table(&spec.fiber_surface(k), n - k).map_err(catalog_err)?.dim(2);
                        r.fail(format!("dim ψ² is {total} for C_{n} but {base} + {fiber} for base and fiber"));
                    }
                    Ok(r)
                }),
            ))
        }
        ConfCommand::Sections { spec, n } => {
            let (flags, spec) = surface_spec(spec)?;
            let n = *n;
            let echo = format!("conf sections {flags} --n {n}");
            let request = Request {
                subcommand: "conf sections",
                echo: echo.clone(),
                inputs: vec![flags, format!("n={n}")],
                cap: None,
            };
            Ok((
                request,
                Box::new(move || {
                    let mut r = Report::new(echo, None);
                    match cross_section_table(&spec, n) {
                        Ok(b) => {
                            r.set("cross_section", b);
                        }
                        Err(CatalogError::Undetermined(why)) => {
                            r.set("cross_section", "undetermined");
                            r.guards.push(why);
                        }
                        Err(e) => return Err(catalog_err(e)),
                    }
                    Ok(r)
                }),
            ))
        }
        ConfCommand::Lcs { spec, n, poincare } => {
            let (flags, spec) = surface_spec(spec)?;
            let n = *n;
            if cap > MAX_LCS_CAP {
                return Err(format!("--max-degree {cap} exceeds the supported maximum {MAX_LCS_CAP}"));
            }
            let mut inputs = vec![flags.clone(), format!("n={n}")];
            let mut echo = format!("conf lcs {flags} --n {n} --max-degree {cap}");
            let coefficients = match poincare {
                Some(path) => {
                    let doc = load(path, Kind::Poincare)?;
                    let p = doc.poincare().map_err(|e| format!("{}: {e}", path.display()))?;
                    inputs.push(doc.render());
                    echo.push_str(&format!(" --poincare {}", path.display()));
                    Some(p)
                }
                None => None,
            };
            let request = Request {
                subcommand: "conf lcs",
                echo: echo.clone(),
                inputs,
                cap: Some(cap),
            };
            Ok((
                request,
                Box::new(move || {
                    let d = lcs_rank_table(&spec, n, cap).map_err(catalog_err)?;
                    let mut r = Report::new(echo, Some(cap));
                    r.set("phi", json!(d.table.ranks));
                    r.set("base_phi", json!(d.base));
                    r.set("fiber_free_ranks", json!(d.free_ranks));
                    let Some(coefficients) = coefficients else { return Ok(r) };
                    let f = lcs_formula_check(&spec, n, &coefficients, cap).map_err(catalog_err)?;
                    r.set("lhs", poly(&f.lhs));
                    r.set("rhs", poly(&f.rhs));
                    r.set("holds", f.holds());
                    r.set("within_guarantee", f.within_guarantee);
                    if !f.within_guarantee {
                        r.guards.push(
                            "the LCS formula is only asserted for punctured genus-0 surfaces with an orientation-preserving action; a mismatch here is not a failure"
                                .into(),
                        );
                    }
                    if let Some(i) = f.first_mismatch {
                        r.set("first_mismatch", i);
                        if f.within_guarantee {
                            r.fail(format!("coefficient of t^{i}: P(-t) has {}, ∏(1-t^i)^φ_i has {}", f.lhs.coeff(i), f.rhs.coeff(i)));
                        }
                    }
                    Ok(r)
                }),
            ))
        }
    }
}

fn random_word(rng: &mut StdRng, arity: usize, max_len: usize) -> GroupWord {
    let len = rng.gen_range(0..=max_len);
    GroupWord::new((0..len).map(|_| (rng.gen_range(0..arity as u16), if rng.gen_bool(0.5) { 1 } else { -1 })))
}

fn malcev_verify(echo: String, arity: usize, cap: usize, samples: usize, seed: u64) -> Result<Report, SeriesError> {
    let mut r = Report::new(echo, Some(cap));
    let mut rng = StdRng::seed_from_u64(seed);
    let mut checks: Map<String, Value> = Map::new();
    let (mut multiplicative, mut grouplike, mut log_primitive) = (true, true, true);
    for _ in 0..samples {
        let u = random_word(&mut rng, arity, 6);
        let v = random_word(&mut rng, arity, 6);
        let uv = u.concat(&v);
        for (name, expansion) in [("magnus", magnus as fn(&GroupWord, usize, usize) -> _), ("exp_magnus", exp_magnus)] {
            if expansion(&uv, arity, cap)? != expansion(&u, arity, cap)?.mul(&expansion(&v, arity, cap)?) {
                multiplicative = false;
                r.fail(format!("{name}(u·v) ≠ {name}(u)·{name}(v) for u = {u}, v = {v}"));
            }
        }
        let e = exp_magnus(&u, arity, cap)?;
        if !e.is_grouplike() {
            grouplike = false;
            r.fail(format!("exp_magnus({u}) is not group-like"));
        }
        if !log_series(&e)?.is_primitive() {
            log_primitive = false;
            r.fail(format!("log exp_magnus({u}) is not primitive"));
        }
    }
    checks.insert("multiplicative".into(), multiplicative.into());
    checks.insert("grouplike".into(), grouplike.into());
    checks.insert("log_primitive".into(), log_primitive.into());
    r.set("samples", samples);
    r.set("checks", Value::Object(checks));

    let witt: Vec<u64> = (1..=cap as u64).map(|i| witt_number(arity as u64, i)).collect();
    let grouplike_ranks = grouplike_filtration_ranks(arity, cap)?;
    let magnus_ranks = commutator_filtration_ranks(arity, cap, magnus)?;
    r.set("witt", json!(witt));
    r.set("filtration_ranks_exp", json!(grouplike_ranks));
    r.set("filtration_ranks_magnus", json!(magnus_ranks));
    for (name, ranks) in [("exp_magnus", &grouplike_ranks), ("magnus", &magnus_ranks)] {
        if let Some(i) = (0..cap).find(|&i| ranks[i] as u64 != witt[i]) {
            r.fail(format!("{name}: rank of gr_{} is {}, Witt number is {}", i + 1, ranks[i], witt[i]));
        }
    }
    if arity.pow(cap as u32) <= 1 << 12 {
        let prim = primitive_dims(arity, cap);
        r.set("primitive_dims", json!(prim));
        if let Some(i) = (0..cap).find(|&i| prim[i] as u64 != witt[i]) {
            r.fail(format!("primitives of degree {} have dimension {}, Witt number is {}", i + 1, prim[i], witt[i]));
        }
    } else {
        r.notes.push("primitive dimensions skipped: too many words".into());
    }
    Ok(r)
}
