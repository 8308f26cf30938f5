use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use fraisse_core::arrows::{
    arrow_search, classical_arrow, convex_arrow, definable_arrow, proximal_arrow, proximal_check,
    roelcke_witness, stable_arrow, Coloring, DefinableOutcome, Verdict,
};
use fraisse_core::certificate::{self, age_digest, AgeInput, Body, Certificate, StructureInput};
use fraisse_core::patterns::JointEmbedding;
use fraisse_core::stability::stable_up_to;
use fraisse_core::structures::{embeddings, serialize_structure, Structure};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::args::*;
use crate::commands::{cache_key, embedding_list, label, new_report, value, write_file, Ctx};
use crate::inputs::{self, need, required_age, Loaded, Usage};
use crate::report::{Outcome, Report};

fn si(l: &Loaded) -> StructureInput {
    StructureInput::new(&l.structure)
}

fn describe_joint(r: &mut Report, j: &JointEmbedding) {
    r.line(format!("  parts: {}", embedding_list(&j.parts)));
    r.block(&serialize_structure(&j.union));
}

/// Write the certificate and requested artifacts of a finished run.
fn emit(outcome: &Outcome, cert: Option<&PathBuf>, artifacts: &[(&str, Option<&PathBuf>)]) -> Result<()> {
    if let (Some(path), Some(text)) = (cert, &outcome.certificate) {
        write_file(path, text)?;
    }
    for (kind, path) in artifacts {
        if let (Some(path), Some(text)) = (path, outcome.artifact(kind)) {
            write_file(path, text)?;
        }
    }
    Ok(())
}

/// Digests of the files given next to `--verify`, by role.
fn supplied(age: &Option<String>, files: &[(&'static str, &Option<PathBuf>)], zs: &[PathBuf]) -> Result<Vec<(&'static str, String)>> {
    let mut out = Vec::new();
    if let Some(source) = age {
        out.push(("age", age_digest(&inputs::age(source)?)));
    }
    for (role, path) in files {
        if let Some(path) = path {
            out.push((*role, inputs::structure(path)?.digest));
        }
    }
    for z in zs {
        out.push(("z", inputs::structure(z)?.digest));
    }
    Ok(out)
}

/// Re-check a certificate file, comparing any supplied inputs with the
/// recorded digests first. Never consults the cache.
pub fn replay(ctx: &Ctx, kinds: &[&str], path: &Path, given: Vec<(&'static str, String)>) -> Result<Outcome> {
    let cert = Certificate::from_json(&inputs::read(path)?)?;
    if !kinds.is_empty() && !kinds.contains(&cert.kind()) {
        return Err(Usage(format!(
            "certificate is of kind {}, expected {}",
            cert.kind(),
            kinds.join(" or ")
        ))
        .into());
    }
    let recorded = cert.input_digests();
    let mut z_seen = 0;
    for (role, digest) in &given {
        let candidates: Vec<&String> = recorded.iter().filter(|(r, _)| r == role).map(|(_, d)| d).collect();
        let expected = if *role == "z" {
            z_seen += 1;
            candidates.get(z_seen - 1).copied()
        } else {
            candidates.first().copied()
        };
        match expected {
            None => return Err(Usage(format!("the certificate records no input for --{role}")).into()),
            Some(d) if d != digest => {
                return Err(anyhow!("digest mismatch: --{role} differs from the input recorded in the certificate"))
            }
            Some(_) => {}
        }
    }
    let v = certificate::verify(&cert, &ctx.budget)?;
    let mut r = Report::new("verify", json!({ "kind": cert.kind() }));
    for (role, digest) in &recorded {
        r.input(role, digest.clone());
    }
    r.line(format!("kind: {}", cert.kind()));
    r.line(v.detail.clone());
    let (outcome, exit) = if v.valid { ("valid", 0) } else { ("invalid", 1) };
    Ok(r.finish(outcome, exit, json!({ "kind": cert.kind(), "valid": v.valid, "detail": v.detail })))
}

pub fn verify_cmd(ctx: &Ctx, args: &VerifyArgs) -> Result<Outcome> {
    let given = supplied(&args.age.age, &[("a", &args.a), ("b", &args.b), ("c", &args.c)], &args.zs)?;
    replay(ctx, &[], &args.certificate, given)
}

fn exit_for(verdict: Verdict) -> i32 {
    if verdict.holds() {
        0
    } else {
        1
    }
}

fn positive(v: usize, flag: &str) -> Result<()> {
    if v == 0 {
        return Err(Usage(format!("{flag} must be positive")).into());
    }
    Ok(())
}

fn check_members(spec: &fraisse_core::ages::AgeSpec, labeled: &[(&str, &Loaded)]) -> Result<()> {
    for (role, l) in labeled {
        spec.check_signature(&l.structure)?;
        spec.require_members(&[(role, &l.structure)])?;
    }
    Ok(())
}

pub fn arrow(ctx: &Ctx, args: &ArrowArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(&args.age.age, &[("a", &args.a), ("b", &args.b), ("c", &args.c)], &[])?;
        return replay(ctx, &["classical-arrow"], path, given);
    }
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    let b = inputs::structure(need(&args.b, "--b")?)?;
    let c = inputs::structure(need(&args.c, "--c")?)?;
    positive(args.colors, "--colors")?;
    let labeled = [("a", &a), ("b", &b), ("c", &c)];
    check_members(&spec, &labeled)?;
    let params = json!({ "colors": args.colors });
    let outcome = ctx.cached(cache_key("arrow", &params, Some(&spec), &labeled), || {
        let (a_s, b_s, c_s) = (&a.structure, &b.structure, &c.structure);
        let o = classical_arrow(c_s, a_s, b_s, args.colors, &ctx.budget)?;
        let mut r = new_report("arrow", &params, Some(&spec), &labeled);
        r.line(format!(
            "C -> (B)^A_{}: {} copies of A, {} copies of B in C, symmetry group of order {}",
            args.colors, o.domain_size, o.copy_count, o.symmetry_order
        ));
        if let Some(reason) = &o.reason {
            r.line(format!("reason: {reason}"));
        }
        if let Some(values) = &o.coloring {
            let domain = embeddings(a_s, c_s)?;
            let mut text = String::from("# coloring of embeddings(A, C) in this order:\n");
            for (i, e) in domain.iter().enumerate() {
                text.push_str(&format!("# {i}: {e}\n"));
            }
            text.push_str(&Coloring::colors(domain, args.colors, values.clone())?.to_text());
            r.line("coloring with no monochromatic copy of B:");
            r.block(&text);
            r.artifact("coloring", text);
        }
        r.certificate(&Certificate::new(Body::ClassicalArrow {
            age: Some(AgeInput::new(&spec)),
            a: si(&a),
            b: si(&b),
            c: si(&c),
            outcome: o.clone(),
        }));
        Ok(r.finish(&label(&o.verdict), exit_for(o.verdict), value(&o)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[("coloring", args.coloring_out.as_ref())])?;
    Ok(outcome)
}

pub fn arrow_search_cmd(ctx: &Ctx, args: &ArrowSearchArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(&args.age.age, &[("a", &args.a), ("b", &args.b)], &[])?;
        return replay(ctx, &["arrow-search"], path, given);
    }
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    let b = inputs::structure(need(&args.b, "--b")?)?;
    positive(args.colors, "--colors")?;
    let labeled = [("a", &a), ("b", &b)];
    check_members(&spec, &labeled)?;
    let params = json!({ "colors": args.colors, "max_n": args.max_n });
    let outcome = ctx.cached(cache_key("arrow-search", &params, Some(&spec), &labeled), || {
        let o = arrow_search(&spec, &a.structure, &b.structure, args.colors, args.max_n, &ctx.budget)?;
        let mut r = new_report("arrow-search", &params, Some(&spec), &labeled);
        r.line(format!("{} candidates rejected", o.rejected.len()));
        if let Some(found) = &o.found {
            r.line(format!("least C with C -> (B)^A_{} (size {}):", args.colors, found.size()));
            r.block(&serialize_structure(found));
        } else {
            r.line(format!("no member of size at most {} works", args.max_n));
        }
        r.certificate(&Certificate::new(Body::ArrowSearch {
            age: AgeInput::new(&spec),
            a: si(&a),
            b: si(&b),
            colors: args.colors,
            outcome: o.clone(),
        }));
        let (label, exit) = if o.found.is_some() { ("found", 0) } else { ("none-found", 1) };
        Ok(r.finish(label, exit, value(&o)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[])?;
    Ok(outcome)
}

fn describe_definable(r: &mut Report, o: &DefinableOutcome) {
    r.line(format!("{} patterns of (C, Z)", o.pattern_count));
    if let Some(reason) = &o.reason {
        r.line(format!("reason: {reason}"));
    }
    for (i, s) in o.stability.iter().enumerate() {
        r.line(format!(
            "(A, Z{}) stable up to depth {}: {}",
            i + 1,
            s.depth,
            s.stable_up_to_depth
        ));
    }
    if let Some(j) = &o.offending {
        r.line("joint embedding of C and Z with no pattern-constant copy of B:");
        describe_joint(r, j);
    }
}

pub fn definable(ctx: &Ctx, args: &DefinableArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(
            &args.age.age,
            &[("a", &args.a), ("b", &args.b), ("c", &args.c), ("z", &args.z)],
            &[],
        )?;
        return replay(ctx, &["definable-arrow"], path, given);
    }
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    let b = inputs::structure(need(&args.b, "--b")?)?;
    let c = inputs::structure(need(&args.c, "--c")?)?;
    let z = inputs::structure(need(&args.z, "--z")?)?;
    let labeled = [("a", &a), ("b", &b), ("c", &c), ("z", &z)];
    check_members(&spec, &labeled)?;
    let params = json!({});
    let outcome = ctx.cached(cache_key("definable-arrow", &params, Some(&spec), &labeled), || {
        let o = definable_arrow(&spec, &c.structure, &a.structure, &b.structure, &z.structure, &ctx.budget)?;
        let mut r = new_report("definable-arrow", &params, Some(&spec), &labeled);
        describe_definable(&mut r, &o);
        r.certificate(&Certificate::new(Body::DefinableArrow {
            age: AgeInput::new(&spec),
            a: si(&a),
            b: si(&b),
            c: si(&c),
            zs: vec![si(&z)],
            outcome: o.clone(),
        }));
        Ok(r.finish(&label(&o.verdict), exit_for(o.verdict), value(&o)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[])?;
    Ok(outcome)
}

pub fn stable(ctx: &Ctx, args: &StableArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(&args.age.age, &[("a", &args.a), ("b", &args.b), ("c", &args.c)], &args.zs)?;
        return replay(ctx, &["stable-arrow"], path, given);
    }
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    let b = inputs::structure(need(&args.b, "--b")?)?;
    let c = inputs::structure(need(&args.c, "--c")?)?;
    if args.zs.is_empty() {
        return Err(Usage("missing required flag --z".into()).into());
    }
    let zs: Vec<Loaded> = args.zs.iter().map(|p| inputs::structure(p)).collect::<Result<_>>()?;
    let mut labeled = vec![("a", &a), ("b", &b), ("c", &c)];
    labeled.extend(zs.iter().map(|z| ("z", z)));
    check_members(&spec, &labeled)?;
    let params = json!({ "depth": args.depth });
    let outcome = ctx.cached(cache_key("stable-arrow", &params, Some(&spec), &labeled), || {
        let structs: Vec<Structure> = zs.iter().map(|z| z.structure.clone()).collect();
        let o = stable_arrow(&spec, &c.structure, &a.structure, &b.structure, &structs, args.depth, &ctx.budget)?;
        let mut r = new_report("stable-arrow", &params, Some(&spec), &labeled);
        describe_definable(&mut r, &o);
        r.certificate(&Certificate::new(Body::StableArrow {
            age: AgeInput::new(&spec),
            a: si(&a),
            b: si(&b),
            c: si(&c),
            zs: zs.iter().map(si).collect(),
            outcome: o.clone(),
        }));
        Ok(r.finish(&label(&o.verdict), exit_for(o.verdict), value(&o)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[])?;
    Ok(outcome)
}

pub fn roelcke(ctx: &Ctx, args: &RoelckeArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(&args.age.age, &[("a", &args.a), ("b", &args.b), ("z", &args.z)], &[])?;
        return replay(ctx, &["roelcke-witness"], path, given);
    }
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    let b = inputs::structure(need(&args.b, "--b")?)?;
    let z = inputs::structure(need(&args.z, "--z")?)?;
    let labeled = [("a", &a), ("b", &b), ("z", &z)];
    check_members(&spec, &labeled)?;
    let max_n = args.max_n.unwrap_or(b.structure.size() + z.structure.size());
    let params = json!({ "max_n": max_n });
    let outcome = ctx.cached(cache_key("roelcke-witness", &params, Some(&spec), &labeled), || {
        let o = roelcke_witness(&spec, &a.structure, &b.structure, &z.structure, max_n, &ctx.budget)?;
        let mut r = new_report("roelcke-witness", &params, Some(&spec), &labeled);
        r.line(format!("{} unions of B and Z checked, up to size {}", o.unions_checked, o.max_size));
        if let (Some(j), Some(p)) = (&o.witness, &o.pattern) {
            r.line(format!("every copy of A in B has pattern {} with Z in:", p.short_digest()));
            describe_joint(&mut r, j);
        }
        r.certificate(&Certificate::new(Body::RoelckeWitness {
            age: AgeInput::new(&spec),
            a: si(&a),
            b: si(&b),
            z: si(&z),
            max_n,
            outcome: o.clone(),
        }));
        let (label, exit) = if o.witness.is_some() { ("found", 0) } else { ("none-found", 1) };
        Ok(r.finish(label, exit, value(&o)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[])?;
    Ok(outcome)
}

pub fn stability(ctx: &Ctx, args: &StabilityArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(&args.age.age, &[("a", &args.a), ("z", &args.z)], &[])?;
        return replay(ctx, &["stability"], path, given);
    }
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    let z = inputs::structure(need(&args.z, "--z")?)?;
    let labeled = [("a", &a), ("z", &z)];
    check_members(&spec, &labeled)?;
    if args.depth < 2 {
        return Err(Usage("--depth must be at least 2".into()).into());
    }
    let max_host = args
        .max_host
        .unwrap_or(args.depth * (a.structure.size() + z.structure.size()));
    let params = json!({ "depth": args.depth, "max_host": max_host });
    let outcome = ctx.cached(cache_key("stability", &params, Some(&spec), &labeled), || {
        let report = stable_up_to(&spec, &a.structure, &z.structure, args.depth, max_host, &ctx.budget)?;
        let mut r = new_report("stability", &params, Some(&spec), &labeled);
        r.line(format!(
            "{} patterns, {} ordered pattern pairs, hosts of at most {} vertices",
            report.pattern_count, report.pattern_pairs, max_host
        ));
        if let Some(w) = &report.witness {
            r.line(format!(
                "unstable sequence of depth {}: [a_m, z_k] = {} for m < k, {} for m > k",
                w.depth,
                w.tau_lt.short_digest(),
                w.tau_gt.short_digest()
            ));
            for (i, (x, y)) in w.a_parts.iter().zip(&w.z_parts).enumerate() {
                r.line(format!("  a_{} = {x}  z_{} = {y}", i + 1, i + 1));
            }
            let text = serialize_structure(&w.host);
            r.line("host:");
            r.block(&text);
            r.artifact("witness", text);
        }
        r.certificate(&Certificate::new(Body::Stability {
            age: AgeInput::new(&spec),
            a: si(&a),
            z: si(&z),
            report: report.clone(),
        }));
        let (label, exit) = if report.witness.is_some() {
            ("unstable-witness-found", 0)
        } else {
            ("stable-up-to-depth", 1)
        };
        Ok(r.finish(label, exit, value(&report)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[("witness", args.witness_out.as_ref())])?;
    Ok(outcome)
}

struct ProximalInputs {
    spec: fraisse_core::ages::AgeSpec,
    u: Loaded,
    a: Loaded,
    coloring: Coloring,
    coloring_digest: String,
}

fn proximal_inputs(args: &ProximalArgs) -> Result<ProximalInputs> {
    let spec = required_age(&args.age.age)?;
    let u = inputs::structure(need(&args.c, "--c")?)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    check_members(&spec, &[("c", &u), ("a", &a)])?;
    let domain = embeddings(&a.structure, &u.structure)?;
    let coloring = Coloring::parse(&inputs::read(need(&args.coloring, "--coloring")?)?, domain)?;
    let coloring_digest = hex::encode(Sha256::digest(coloring.to_text().as_bytes()));
    Ok(ProximalInputs {
        spec,
        u,
        a,
        coloring,
        coloring_digest,
    })
}

fn describe_proximal(r: &mut Report, report: &fraisse_core::arrows::ProximalReport) {
    r.line(format!(
        "E ranges over substructures of the given universe; D up to size {}",
        report.d_max
    ));
    for (i, e) in report.entries.iter().enumerate() {
        r.line(format!(
            "D #{} (size {}): {}",
            i + 1,
            e.d.size(),
            if e.pass { "pass" } else { "fail" }
        ));
    }
}

pub fn proximal(ctx: &Ctx, args: &ProximalArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(&args.age.age, &[("c", &args.c), ("a", &args.a)], &[])?;
        return replay(ctx, &["proximal-check"], path, given);
    }
    let p = proximal_inputs(args)?;
    let labeled = [("c", &p.u), ("a", &p.a)];
    let params = json!({ "max_n": args.max_n, "coloring": p.coloring_digest });
    let outcome = ctx.cached(cache_key("proximal-check", &params, Some(&p.spec), &labeled), || {
        let report = proximal_check(&p.spec, &p.u.structure, &p.a.structure, &p.coloring, args.max_n, &ctx.budget)?;
        let mut r = new_report("proximal-check", &params, Some(&p.spec), &labeled);
        describe_proximal(&mut r, &report);
        r.certificate(&Certificate::new(Body::ProximalCheck {
            age: AgeInput::new(&p.spec),
            u: si(&p.u),
            a: si(&p.a),
            coloring: p.coloring.clone(),
            report: report.clone(),
        }));
        let (label, exit) = if report.all_pass { ("pass", 0) } else { ("fail", 1) };
        Ok(r.finish(label, exit, value(&report)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[])?;
    Ok(outcome)
}

pub fn proximal_arrow_cmd(ctx: &Ctx, args: &ProximalArrowArgs) -> Result<Outcome> {
    let pa = &args.proximal;
    if let Some(path) = &pa.cert.verify {
        let given = supplied(&pa.age.age, &[("c", &pa.c), ("a", &pa.a), ("b", &args.b)], &[])?;
        return replay(ctx, &["proximal-arrow", "proximal-check"], path, given);
    }
    let p = proximal_inputs(pa)?;
    let b = inputs::structure(need(&args.b, "--b")?)?;
    check_members(&p.spec, &[("b", &b)])?;
    let labeled = [("c", &p.u), ("a", &p.a), ("b", &b)];
    let params = json!({ "max_n": pa.max_n, "coloring": p.coloring_digest });
    let outcome = ctx.cached(cache_key("proximal-arrow", &params, Some(&p.spec), &labeled), || {
        let report = proximal_check(&p.spec, &p.u.structure, &p.a.structure, &p.coloring, pa.max_n, &ctx.budget)?;
        let mut r = new_report("proximal-arrow", &params, Some(&p.spec), &labeled);
        describe_proximal(&mut r, &report);
        if !report.all_pass || report.entries.is_empty() {
            r.line("the coloring is not proximal at this depth");
            r.certificate(&Certificate::new(Body::ProximalCheck {
                age: AgeInput::new(&p.spec),
                u: si(&p.u),
                a: si(&p.a),
                coloring: p.coloring.clone(),
                report: report.clone(),
            }));
            let result = json!({ "proximal": report, "witness": null });
            return Ok(r.finish("precondition-failed", 1, result));
        }
        let witness = proximal_arrow(&p.u.structure, &p.a.structure, &b.structure, &p.coloring, &report)?;
        match &witness {
            Some(w) => r.line(format!("constant copy of B: {w}")),
            None => r.line("no copy of B is constant"),
        }
        r.certificate(&Certificate::new(Body::ProximalArrow {
            age: AgeInput::new(&p.spec),
            u: si(&p.u),
            a: si(&p.a),
            b: si(&b),
            coloring: p.coloring.clone(),
            report: report.clone(),
            witness: witness.clone(),
        }));
        let (label, exit) = if witness.is_some() { ("found", 0) } else { ("none-found", 1) };
        let result = json!({ "proximal": report, "witness": witness });
        Ok(r.finish(label, exit, result))
    })?;
    emit(&outcome, pa.cert.certificate.as_ref(), &[])?;
    Ok(outcome)
}

pub fn convex(ctx: &Ctx, args: &ConvexArgs) -> Result<Outcome> {
    if let Some(path) = &args.cert.verify {
        let given = supplied(&args.age.age, &[("a", &args.a), ("b", &args.b), ("c", &args.c)], &[])?;
        return replay(ctx, &["convex-arrow"], path, given);
    }
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(need(&args.a, "--a")?)?;
    let b = inputs::structure(need(&args.b, "--b")?)?;
    let c = inputs::structure(need(&args.c, "--c")?)?;
    let epsilon = *need(&args.epsilon, "--epsilon")?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Usage("--epsilon must lie in (0, 1]".into()).into());
    }
    positive(args.colors, "--colors")?;
    let labeled = [("a", &a), ("b", &b), ("c", &c)];
    check_members(&spec, &labeled)?;
    let params = json!({ "epsilon": epsilon, "colors": args.colors });
    let outcome = ctx.cached(cache_key("convex-arrow", &params, Some(&spec), &labeled), || {
        let o = convex_arrow(&c.structure, &a.structure, &b.structure, epsilon, args.colors, &ctx.budget)?;
        let mut r = new_report("convex-arrow", &params, Some(&spec), &labeled);
        r.line(format!(
            "game value {:.9} against epsilon {} over {}-colorings",
            o.value, o.epsilon, o.colors
        ));
        if let Some(reason) = &o.reason {
            r.line(format!("reason: {reason}"));
        }
        r.line(format!(
            "worst coloring: {}",
            o.worst_coloring.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        ));
        if let Some(s) = &o.strategy {
            for (w, e) in s.weights.iter().zip(&s.copies) {
                r.line(format!("  {w:.6} x {e}"));
            }
        }
        r.certificate(&Certificate::new(Body::ConvexArrow {
            age: Some(AgeInput::new(&spec)),
            a: si(&a),
            b: si(&b),
            c: si(&c),
            outcome: o.clone(),
        }));
        Ok(r.finish(&label(&o.verdict), exit_for(o.verdict), value(&o)))
    })?;
    emit(&outcome, args.cert.certificate.as_ref(), &[])?;
    Ok(outcome)
}
