//! Self-contained certificate documents and their independent re-check.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ages::{enumerate_structures, AgeSpec};
use crate::arrows::{
    check_bad_coloring, find_bad_coloring_plain, verify_convex, verify_definable, verify_proximal,
    roelcke_valid, roelcke_witness, ArrowSearchOutcome, ClassicalOutcome, Coloring, ConvexOutcome,
    DefinableOutcome, ProximalReport, RoelckeOutcome, Verdict,
};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::stability::{stable_up_to, StabilityReport};
use crate::structures::{canonical_form, embeddings, parse_structure, serialize_structure, Embedding, Structure};

pub const CERTIFICATE_VERSION: u32 = 1;

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// A structure embedded in normalized text form with its digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureInput {
    pub digest: String,
    pub text: String,
}

impl StructureInput {
    pub fn new(s: &Structure) -> Self {
        let text = serialize_structure(s);
        StructureInput {
            digest: sha256_hex(&text),
            text,
        }
    }

    pub fn load(&self) -> Result<Structure> {
        if sha256_hex(&self.text) != self.digest {
            return Err(Error::InvalidInput("embedded structure does not match its digest".into()));
        }
        parse_structure(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgeInput {
    pub digest: String,
    pub spec: AgeSpec,
}

impl AgeInput {
    pub fn new(spec: &AgeSpec) -> Self {
        AgeInput {
            digest: age_digest(spec),
            spec: spec.clone(),
        }
    }

    pub fn load(&self) -> Result<AgeSpec> {
        if age_digest(&self.spec) != self.digest {
            return Err(Error::InvalidInput("embedded age does not match its digest".into()));
        }
        Ok(self.spec.clone())
    }
}

pub fn age_digest(spec: &AgeSpec) -> String {
    sha256_hex(&spec.to_text())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Body {
    ClassicalArrow {
        age: Option<AgeInput>,
        a: StructureInput,
        b: StructureInput,
        c: StructureInput,
        outcome: ClassicalOutcome,
    },
    ArrowSearch {
        age: AgeInput,
        a: StructureInput,
        b: StructureInput,
        colors: usize,
        outcome: ArrowSearchOutcome,
    },
    DefinableArrow {
        age: AgeInput,
        a: StructureInput,
        b: StructureInput,
        c: StructureInput,
        zs: Vec<StructureInput>,
        outcome: DefinableOutcome,
    },
    StableArrow {
        age: AgeInput,
        a: StructureInput,
        b: StructureInput,
        c: StructureInput,
        zs: Vec<StructureInput>,
        outcome: DefinableOutcome,
    },
    RoelckeWitness {
        age: AgeInput,
        a: StructureInput,
        b: StructureInput,
        z: StructureInput,
        max_n: usize,
        outcome: RoelckeOutcome,
    },
    Stability {
        age: AgeInput,
        a: StructureInput,
        z: StructureInput,
        report: StabilityReport,
    },
    ProximalCheck {
        age: AgeInput,
        u: StructureInput,
        a: StructureInput,
        coloring: Coloring,
        report: ProximalReport,
    },
    ProximalArrow {
        age: AgeInput,
        u: StructureInput,
        a: StructureInput,
        b: StructureInput,
        coloring: Coloring,
        report: ProximalReport,
        witness: Option<Embedding>,
    },
    ConvexArrow {
        age: Option<AgeInput>,
        a: StructureInput,
        b: StructureInput,
        c: StructureInput,
        outcome: ConvexOutcome,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    #[serde(flatten)]
    pub body: Body,
}

impl Certificate {
    pub fn new(body: Body) -> Self {
        Certificate {
            version: CERTIFICATE_VERSION,
            body,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            Body::ClassicalArrow { .. } => "classical-arrow",
            Body::ArrowSearch { .. } => "arrow-search",
            Body::DefinableArrow { .. } => "definable-arrow",
            Body::StableArrow { .. } => "stable-arrow",
            Body::RoelckeWitness { .. } => "roelcke-witness",
            Body::Stability { .. } => "stability",
            Body::ProximalCheck { .. } => "proximal-check",
            Body::ProximalArrow { .. } => "proximal-arrow",
            Body::ConvexArrow { .. } => "convex-arrow",
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cert: Certificate = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed certificate: {e}")))?;
        if cert.version != CERTIFICATE_VERSION {
            return Err(Error::InvalidInput(format!(
                "certificate version {} is not supported",
                cert.version
            )));
        }
        Ok(cert)
    }

    /// Digests of the embedded inputs by role (`age`, `a`, `b`, `c`, `z`,
    /// `u`), for comparison with files supplied on the command line.
    pub fn input_digests(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut s = |role: &'static str, x: &StructureInput| out.push((role, x.digest.clone()));
        match &self.body {
            Body::ClassicalArrow { a, b, c, .. } | Body::ConvexArrow { a, b, c, .. } => {
                s("a", a);
                s("b", b);
                s("c", c);
            }
            Body::ArrowSearch { a, b, .. } => {
                s("a", a);
                s("b", b);
            }
            Body::DefinableArrow { a, b, c, zs, .. } | Body::StableArrow { a, b, c, zs, .. } => {
                s("a", a);
                s("b", b);
                s("c", c);
                for z in zs {
                    s("z", z);
                }
            }
            Body::RoelckeWitness { a, b, z, .. } => {
                s("a", a);
                s("b", b);
                s("z", z);
            }
            Body::Stability { a, z, .. } => {
                s("a", a);
                s("z", z);
            }
            Body::ProximalCheck { u, a, .. } => {
                s("c", u);
                s("a", a);
            }
            Body::ProximalArrow { u, a, b, .. } => {
                s("c", u);
                s("a", a);
                s("b", b);
            }
        }
        match &self.body {
            Body::ArrowSearch { age, .. }
            | Body::DefinableArrow { age, .. }
            | Body::StableArrow { age, .. }
            | Body::RoelckeWitness { age, .. }
            | Body::Stability { age, .. }
            | Body::ProximalCheck { age, .. }
            | Body::ProximalArrow { age, .. } => out.push(("age", age.digest.clone())),
            Body::ClassicalArrow { age: Some(age), .. } | Body::ConvexArrow { age: Some(age), .. } => {
                out.push(("age", age.digest.clone()))
            }
            _ => {}
        }
        out
    }
}

/// Result of re-checking a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub detail: String,
}

impl Verification {
    fn from(r: std::result::Result<(), String>) -> Self {
        match r {
            Ok(()) => Verification {
                valid: true,
                detail: "all claims re-checked".into(),
            },
            Err(detail) => Verification { valid: false, detail },
        }
    }
}

fn check_classical(c: &Structure, a: &Structure, b: &Structure, o: &ClassicalOutcome, budget: &Budget) -> Result<Result<(), String>> {
    let copies = embeddings(b, c)?;
    let inner = embeddings(a, b)?;
    Ok(match o.verdict {
        Verdict::Fails if o.reason.as_deref() == Some("no copy of B") => {
            if copies.is_empty() {
                Ok(())
            } else {
                Err("B embeds in C".into())
            }
        }
        Verdict::Fails => match &o.coloring {
            Some(col) => check_bad_coloring(c, a, b, o.colors, col),
            None => Err("failing outcome without a coloring".into()),
        },
        Verdict::DegenerateHolds => {
            if inner.is_empty() && !copies.is_empty() {
                Ok(())
            } else {
                Err("outcome is not degenerate".into())
            }
        }
        Verdict::Holds => {
            if copies.is_empty() {
                Err("B does not embed in C".into())
            } else {
                match find_bad_coloring_plain(c, a, b, o.colors, budget)? {
                    None => Ok(()),
                    Some(col) => Err(format!("plain search found the bad coloring {col:?}")),
                }
            }
        }
        Verdict::PreconditionFailed => Err("unexpected verdict".into()),
    })
}

/// Re-check every claim of `cert` without consulting any cache.
pub fn verify(cert: &Certificate, budget: &Budget) -> Result<Verification> {
    let r = match &cert.body {
        Body::ClassicalArrow { age, a, b, c, outcome } => {
            let (a, b, c) = (a.load()?, b.load()?, c.load()?);
            match check_age(age, &[&a, &b, &c])? {
                Ok(()) => check_classical(&c, &a, &b, outcome, budget)?,
                Err(e) => Err(e),
            }
        }
        Body::ArrowSearch {
            age,
            a,
            b,
            colors,
            outcome,
        } => {
            let (spec, a, b) = (age.load()?, a.load()?, b.load()?);
            verify_search(&spec, &a, &b, *colors, outcome, budget)?
        }
        Body::DefinableArrow { age, a, b, c, zs, outcome } | Body::StableArrow { age, a, b, c, zs, outcome } => {
            let spec = age.load()?;
            let zs: Vec<Structure> = zs.iter().map(StructureInput::load).collect::<Result<_>>()?;
            let (a, b, c) = (a.load()?, b.load()?, c.load()?);
            let mut r = verify_definable(&spec, &c, &a, &b, &zs, outcome, budget);
            if r.is_ok() && outcome.verdict.holds() {
                if let Some(depth) = outcome.depth {
                    r = recheck_stability(&spec, &a, &zs, depth, &outcome.stability, budget)?;
                }
            }
            r
        }
        Body::RoelckeWitness {
            age,
            a,
            b,
            z,
            max_n,
            outcome,
        } => {
            let (spec, a, b, z) = (age.load()?, a.load()?, b.load()?, z.load()?);
            match &outcome.witness {
                Some(w) => roelcke_valid(&spec, &a, &b, &z, w).and_then(|()| {
                    if w.union.size() <= outcome.max_size {
                        Ok(())
                    } else {
                        Err("witness exceeds the size bound".into())
                    }
                }),
                None => {
                    let again = roelcke_witness(&spec, &a, &b, &z, *max_n, budget)?;
                    if again.witness.is_none() {
                        Ok(())
                    } else {
                        Err("a witness exists".into())
                    }
                }
            }
        }
        Body::Stability { age, a, z, report } => {
            let (spec, a, z) = (age.load()?, a.load()?, z.load()?);
            match &report.witness {
                Some(w) if w.depth == report.depth && w.host.size() <= report.max_host => w.verify(&spec, &a, &z),
                Some(_) => Err("witness does not match the recorded bounds".into()),
                None => {
                    let again = stable_up_to(&spec, &a, &z, report.depth, report.max_host, budget)?;
                    if again.stable_up_to_depth {
                        Ok(())
                    } else {
                        Err("an unstable witness exists".into())
                    }
                }
            }
        }
        Body::ProximalCheck {
            age,
            u,
            a,
            coloring,
            report,
        } => verify_proximal(&age.load()?, &u.load()?, &a.load()?, coloring, report, budget),
        Body::ProximalArrow {
            age,
            u,
            a,
            b,
            coloring,
            report,
            witness,
        } => {
            let (spec, u, a, b) = (age.load()?, u.load()?, a.load()?, b.load()?);
            verify_proximal(&spec, &u, &a, coloring, report, budget).and_then(|()| {
                if !report.all_pass || report.entries.is_empty() {
                    return Err("proximality was not established".into());
                }
                let sys = crate::arrows::CopySystem::new(&a, &b, &u).map_err(|e| e.to_string())?;
                let constant = |set: &Vec<usize>| set.iter().all(|&i| coloring.value(i) == coloring.value(set[0]));
                match witness {
                    Some(w) => match sys.copies.iter().position(|x| x == w) {
                        Some(i) if constant(&sys.sets[i]) => Ok(()),
                        _ => Err("witness copy is not constant".into()),
                    },
                    None => {
                        if sys.sets.iter().any(constant) {
                            Err("a constant copy exists".into())
                        } else {
                            Ok(())
                        }
                    }
                }
            })
        }
        Body::ConvexArrow { age, a, b, c, outcome } => {
            let (a, b, c) = (a.load()?, b.load()?, c.load()?);
            check_age(age, &[&a, &b, &c])?.and_then(|()| verify_convex(&c, &a, &b, outcome, budget))
        }
    };
    Ok(Verification::from(r))
}

fn check_age(age: &Option<AgeInput>, structures: &[&Structure]) -> Result<Result<(), String>> {
    if let Some(age) = age {
        let spec = age.load()?;
        for s in structures {
            if spec.check_signature(s).is_err() || !spec.member(s)? {
                return Ok(Err("an input is not a member of the recorded age".into()));
            }
        }
    }
    Ok(Ok(()))
}

fn recheck_stability(
    spec: &AgeSpec,
    a: &Structure,
    zs: &[Structure],
    depth: usize,
    reports: &[StabilityReport],
    budget: &Budget,
) -> Result<Result<(), String>> {
    if reports.len() != zs.len() {
        return Ok(Err("missing stability reports".into()));
    }
    for z in zs {
        let again = stable_up_to(spec, a, z, depth, depth * (a.size() + z.size()), budget)?;
        if !again.stable_up_to_depth {
            return Ok(Err("a pair (A, Z) is unstable at the recorded depth".into()));
        }
    }
    Ok(Ok(()))
}

fn verify_search(
    spec: &AgeSpec,
    a: &Structure,
    b: &Structure,
    k: usize,
    outcome: &ArrowSearchOutcome,
    budget: &Budget,
) -> Result<Result<(), String>> {
    let mut expected = Vec::new();
    'levels: for n in b.size()..=outcome.max_n {
        for c in enumerate_structures(spec, n, budget)? {
            let stop = outcome.found.as_ref().is_some_and(|f| f == &c);
            expected.push(c);
            if stop {
                break 'levels;
            }
        }
    }
    let mut listed: Vec<&Structure> = outcome.rejected.iter().map(|r| &r.c).collect();
    if let Some(f) = &outcome.found {
        listed.push(f);
    }
    if listed.len() != expected.len()
        || listed.iter().zip(&expected).any(|(x, y)| canonical_form(x) != canonical_form(y))
    {
        return Ok(Err("scanned candidates differ from the enumeration of the age".into()));
    }
    for r in &outcome.rejected {
        if r.outcome.verdict.holds() {
            return Ok(Err("a rejected candidate is marked as holding".into()));
        }
        if r.outcome.colors != k {
            return Ok(Err("color count mismatch".into()));
        }
        if let Err(e) = check_classical(&r.c, a, b, &r.outcome, budget)? {
            return Ok(Err(format!("rejected candidate: {e}")));
        }
    }
    if let (Some(f), Some(o)) = (&outcome.found, &outcome.outcome) {
        if !o.verdict.holds() {
            return Ok(Err("found candidate does not hold".into()));
        }
        return check_classical(f, a, b, o, budget);
    }
    Ok(Ok(()))
}
