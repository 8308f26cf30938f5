use std::path::Path;

use anyhow::{Context, Result};
use fraisse_core::ages::{amalgamation_probe, enumerate_up_to, AgeSpec};
use fraisse_core::certificate::age_digest;
use fraisse_core::groups::{coherent_partitions, invariant_partitions, orbits_on_embeddings, InvariantPartition};
use fraisse_core::patterns::{joint_embeddings, pattern_count};
use fraisse_core::structures::{embeddings, serialize_structure, Embedding};
use fraisse_core::Budget;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::cache::Cache;
use crate::inputs::{self, required_age, Loaded};
use crate::report::{Outcome, Report};

pub struct Ctx {
    pub budget: Budget,
    pub cache: Cache,
}

impl Ctx {
    /// Serve `compute` from the cache when possible. Only conclusive
    /// outcomes are stored.
    pub fn cached(&self, parts: Vec<String>, compute: impl FnOnce() -> Result<Outcome>) -> Result<Outcome> {
        let key = Cache::key(&parts);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit);
        }
        let outcome = compute()?;
        self.cache.put(&key, &outcome);
        Ok(outcome)
    }
}

pub fn cache_key(op: &str, params: &Value, age: Option<&AgeSpec>, inputs: &[(&str, &Loaded)]) -> Vec<String> {
    let mut parts = vec![op.to_string(), params.to_string()];
    if let Some(spec) = age {
        parts.push(format!("age:{}", age_digest(spec)));
    }
    for (role, l) in inputs {
        parts.push(format!("{role}:{}:{}", l.digest, l.code));
    }
    parts
}

pub fn new_report(command: &str, params: &Value, age: Option<&AgeSpec>, inputs: &[(&str, &Loaded)]) -> Report {
    let mut r = Report::new(command, params.clone());
    if let Some(spec) = age {
        r.input("age", age_digest(spec));
    }
    for (role, l) in inputs {
        r.input(role, l.digest.clone());
    }
    r
}

pub fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        _ => String::new(),
    }
}

pub fn value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

pub fn embedding_list(es: &[Embedding]) -> String {
    es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn optional_age(source: &Option<String>) -> Result<Option<AgeSpec>> {
    source.as_deref().map(inputs::age).transpose()
}

fn members(spec: Option<&AgeSpec>, inputs: &[(&str, &Loaded)]) -> Result<()> {
    if let Some(spec) = spec {
        for (role, l) in inputs {
            spec.check_signature(&l.structure)?;
            spec.require_members(&[(role, &l.structure)])?;
        }
    }
    Ok(())
}

pub fn parse(args: &ParseArgs) -> Result<Outcome> {
    let spec = optional_age(&args.age.age)?;
    let mut all_members = true;
    let mut entries = Vec::new();
    let mut r = Report::new("parse", json!({}));
    if let Some(spec) = &spec {
        r.input("age", age_digest(spec));
    }
    for path in &args.files {
        let l = inputs::structure(path)?;
        let member = match &spec {
            Some(spec) => {
                spec.check_signature(&l.structure)?;
                Some(spec.member(&l.structure)?)
            }
            None => None,
        };
        all_members &= member != Some(false);
        let text = serialize_structure(&l.structure);
        r.input("structure", l.digest.clone());
        if let Some(m) = member {
            r.line(format!("# member of the age: {m}"));
        }
        for line in text.lines() {
            r.line(line);
        }
        entries.push(json!({
            "digest": l.digest,
            "size": l.structure.size(),
            "canonical_code": l.code,
            "member": member,
            "text": text,
        }));
    }
    let (outcome, exit) = if all_members { ("ok", 0) } else { ("not-a-member", 1) };
    Ok(r.finish(outcome, exit, json!({ "structures": entries })))
}

pub fn enumerate(ctx: &Ctx, args: &EnumerateArgs) -> Result<Outcome> {
    let spec = required_age(&args.age.age)?;
    let params = json!({ "max_n": args.max_n, "counts_only": args.counts });
    ctx.cached(cache_key("enumerate", &params, Some(&spec), &[]), || {
        let levels = enumerate_up_to(&spec, args.max_n, &ctx.budget)?;
        let mut r = new_report("enumerate", &params, Some(&spec), &[]);
        let mut out = Vec::new();
        for (i, level) in levels.iter().enumerate() {
            let n = i + 1;
            r.line(format!("n = {n}: {} structures", level.len()));
            let texts: Vec<String> = level.iter().map(serialize_structure).collect();
            if !args.counts {
                for (j, t) in texts.iter().enumerate() {
                    r.line(format!("# n = {n}, #{}", j + 1));
                    for line in t.lines() {
                        r.line(line);
                    }
                }
            }
            let mut entry = json!({ "n": n, "count": level.len() });
            if !args.counts {
                entry["structures"] = json!(texts);
            }
            out.push(entry);
        }
        Ok(r.finish("ok", 0, json!({ "levels": out })))
    })
}

pub fn embeddings_cmd(args: &EmbeddingsArgs) -> Result<Outcome> {
    let a = inputs::structure(&args.a)?;
    let b = inputs::structure(&args.b)?;
    let es = embeddings(&a.structure, &b.structure)?;
    let mut r = new_report("embeddings", &json!({}), None, &[("a", &a), ("b", &b)]);
    r.line(format!("{} embeddings", es.len()));
    for e in &es {
        r.line(e.to_string());
    }
    let (outcome, exit) = if es.is_empty() { ("none", 1) } else { ("found", 0) };
    let list: Vec<String> = es.iter().map(|e| e.to_string()).collect();
    Ok(r.finish(outcome, exit, json!({ "count": es.len(), "embeddings": list })))
}

pub fn patterns(ctx: &Ctx, args: &PatternsArgs) -> Result<Outcome> {
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(&args.a)?;
    let zs: Vec<Loaded> = args.zs.iter().map(|p| inputs::structure(p)).collect::<Result<_>>()?;
    let mut labeled = vec![("a", &a)];
    labeled.extend(zs.iter().map(|z| ("z", z)));
    let params = json!({});
    ctx.cached(cache_key("patterns", &params, Some(&spec), &labeled), || {
        let zstructs: Vec<_> = zs.iter().map(|z| z.structure.clone()).collect();
        let found = joint_embeddings(&spec, &a.structure, &zstructs, &ctx.budget)?;
        let mut r = new_report("patterns", &params, Some(&spec), &labeled);
        let mut out = Vec::new();
        for (code, j) in &found {
            let text = serialize_structure(&j.union);
            r.line(format!("pattern {} parts {}", code.short_digest(), embedding_list(&j.parts)));
            for line in text.lines() {
                r.line(format!("  {line}"));
            }
            out.push(json!({
                "code": code.0.to_hex(),
                "digest": code.short_digest(),
                "parts": j.parts.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "union": text,
            }));
        }
        Ok(r.finish("ok", 0, json!({ "count": found.len(), "patterns": out })))
    })
}

pub fn pattern_count_cmd(ctx: &Ctx, args: &PatternCountArgs) -> Result<Outcome> {
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(&args.a)?;
    let z = inputs::structure(&args.z)?;
    let labeled = [("a", &a), ("z", &z)];
    let params = json!({});
    ctx.cached(cache_key("pattern-count", &params, Some(&spec), &labeled), || {
        let n = pattern_count(&spec, &a.structure, &z.structure, &ctx.budget)?;
        let mut r = new_report("pattern-count", &params, Some(&spec), &labeled);
        r.line(format!("{n} patterns"));
        Ok(r.finish("ok", 0, json!({ "count": n })))
    })
}

fn partition_json(p: &InvariantPartition) -> Value {
    json!(p.blocks)
}

fn describe_partition(r: &mut Report, p: &InvariantPartition) {
    for (i, block) in p.blocks.iter().enumerate() {
        let es: Vec<Embedding> = block.iter().map(|&j| p.base[j].clone()).collect();
        r.line(format!("  block {}: {}", i + 1, embedding_list(&es)));
    }
}

pub fn orbits(ctx: &Ctx, args: &OrbitsArgs) -> Result<Outcome> {
    let spec = optional_age(&args.age.age)?;
    let a = inputs::structure(&args.a)?;
    let c = inputs::structure(&args.c)?;
    let labeled = [("a", &a), ("c", &c)];
    members(spec.as_ref(), &labeled)?;
    let params = json!({});
    ctx.cached(cache_key("orbits", &params, spec.as_ref(), &labeled), || {
        let p = orbits_on_embeddings(&c.structure, &a.structure, &ctx.budget)?;
        let mut r = new_report("orbits", &params, spec.as_ref(), &labeled);
        r.line(format!("{} orbits on {} embeddings", p.blocks.len(), p.base.len()));
        describe_partition(&mut r, &p);
        let result = json!({
            "embeddings": p.base.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "orbits": partition_json(&p),
        });
        Ok(r.finish("ok", 0, result))
    })
}

pub fn partitions(ctx: &Ctx, args: &PartitionArgs) -> Result<Outcome> {
    let spec = optional_age(&args.age.age)?;
    let a = inputs::structure(&args.a)?;
    let c = inputs::structure(&args.c)?;
    let labeled = [("a", &a), ("c", &c)];
    members(spec.as_ref(), &labeled)?;
    let params = json!({ "max_blocks": args.max_blocks });
    ctx.cached(cache_key("invariant-partitions", &params, spec.as_ref(), &labeled), || {
        let ps = invariant_partitions(&c.structure, &a.structure, args.max_blocks, &ctx.budget)?;
        let mut r = new_report("invariant-partitions", &params, spec.as_ref(), &labeled);
        r.line(format!("{} invariant partitions with at most {} blocks", ps.len(), args.max_blocks));
        for (i, p) in ps.iter().enumerate() {
            r.line(format!("partition {}", i + 1));
            describe_partition(&mut r, p);
        }
        let base: Vec<String> = ps
            .first()
            .map(|p| p.base.iter().map(|e| e.to_string()).collect())
            .unwrap_or_default();
        let result = json!({
            "embeddings": base,
            "partitions": ps.iter().map(partition_json).collect::<Vec<_>>(),
        });
        Ok(r.finish("ok", 0, result))
    })
}

pub fn coherent(ctx: &Ctx, args: &CoherentArgs) -> Result<Outcome> {
    let spec = required_age(&args.age.age)?;
    let a = inputs::structure(&args.a)?;
    let chain: Vec<Loaded> = args.chain.iter().map(|p| inputs::structure(p)).collect::<Result<_>>()?;
    let mut labeled = vec![("a", &a)];
    labeled.extend(chain.iter().map(|f| ("chain", f)));
    let params = json!({ "max_blocks": args.max_blocks });
    ctx.cached(cache_key("coherent-partitions", &params, Some(&spec), &labeled), || {
        let structs: Vec<_> = chain.iter().map(|f| f.structure.clone()).collect();
        let report = coherent_partitions(&spec, &structs, &a.structure, args.max_blocks, &ctx.budget)?;
        let mut r = new_report("coherent-partitions", &params, Some(&spec), &labeled);
        r.line(format!("notion: {}", report.notion));
        r.line(format!("inclusions: {}", embedding_list(&report.inclusions)));
        r.line(format!("{} coherent families", report.families.len()));
        r.line(format!("evidence: {}", label(&report.evidence)));
        Ok(r.finish(&label(&report.evidence), 0, value(&report)))
    })
}

pub fn amalgamation(ctx: &Ctx, args: &AmalgamationArgs) -> Result<Outcome> {
    let spec = required_age(&args.age.age)?;
    let property = args.property.parse()?;
    let params = json!({ "property": property, "max_n": args.max_n });
    ctx.cached(cache_key("amalgamation", &params, Some(&spec), &[]), || {
        let report = amalgamation_probe(&spec, property, args.max_n, &ctx.budget)?;
        let mut r = new_report("amalgamation", &params, Some(&spec), &[]);
        r.line(format!(
            "{} instances checked, holds up to size {}; completions searched on at most {} vertices",
            report.instances_checked, report.holds_up_to, report.completion_cap
        ));
        if let Some(cx) = &report.counterexample {
            if let Some(a) = &cx.a {
                r.line("A:");
                r.block(&serialize_structure(a));
            }
            r.line("B:");
            r.block(&serialize_structure(&cx.b));
            r.line("C:");
            r.block(&serialize_structure(&cx.c));
            if let (Some(f), Some(g)) = (&cx.f, &cx.g) {
                r.line(format!("f = {f}, g = {g}"));
            }
        }
        let (outcome, exit) = if report.holds() {
            ("holds-up-to-bound", 0)
        } else {
            ("counterexample", 1)
        };
        Ok(r.finish(outcome, exit, value(&report)))
    })
}
