use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fraisse", version, about = "Ramsey-type properties of classes of finite structures")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Bypass the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Maximum number of search nodes.
    #[arg(long, global = true, value_name = "N")]
    pub node_budget: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long, global = true, value_name = "SECONDS")]
    pub time_budget: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and normalize structure files.
    Parse(ParseArgs),
    /// List the members of an age by size, up to isomorphism.
    Enumerate(EnumerateArgs),
    /// List the embeddings of A into B.
    Embeddings(EmbeddingsArgs),
    /// One joint embedding of A and the Zs per pattern.
    Patterns(PatternsArgs),
    /// Number of joint embedding patterns of A and Z.
    PatternCount(PatternCountArgs),
    /// Decide C -> (B)^A_k.
    Arrow(ArrowArgs),
    /// Find the least C in the age with C -> (B)^A_k.
    ArrowSearch(ArrowSearchArgs),
    /// Decide C -> (B)^A_Z.
    DefinableArrow(DefinableArgs),
    /// Decide the definable arrow for several Zs under a stability check.
    StableArrow(StableArgs),
    /// Find a union of B and Z on which all copies of A have one pattern.
    RoelckeWitness(RoelckeArgs),
    /// Search for an unstable sequence of (A, Z) patterns.
    Stability(StabilityArgs),
    /// Test the proximality condition of a coloring of a finite universe.
    ProximalCheck(ProximalArgs),
    /// Find a monochromatic copy of B for a proximal coloring.
    ProximalArrow(ProximalArrowArgs),
    /// Decide the convex Ramsey arrow with tolerance epsilon.
    ConvexArrow(ConvexArgs),
    /// Orbits of Aut(C) on the embeddings of A.
    Orbits(OrbitsArgs),
    /// Partitions of the embeddings of A into unions of Aut(C)-orbits.
    InvariantPartitions(PartitionArgs),
    /// Coherent families of invariant partitions along a chain.
    CoherentPartitions(CoherentArgs),
    /// Bounded probe of joint embedding and amalgamation properties.
    Amalgamation(AmalgamationArgs),
    /// Re-check a certificate.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct AgeArg {
    /// Catalog name or age file.
    #[arg(long, value_name = "AGE")]
    pub age: Option<String>,
}

/// Certificate output and replay.
#[derive(Debug, Args)]
pub struct CertArgs {
    /// Write the certificate to this file.
    #[arg(long, value_name = "FILE")]
    pub certificate: Option<PathBuf>,
    /// Re-check this certificate instead of deciding.
    #[arg(long, value_name = "FILE")]
    pub verify: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[command(flatten)]
    pub age: AgeArg,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long, value_name = "N")]
    pub max_n: usize,
    /// Print counts only.
    #[arg(long)]
    pub counts: bool,
}

#[derive(Debug, Args)]
pub struct EmbeddingsArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
}

#[derive(Debug, Args)]
pub struct PatternsArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long = "z", required = true)]
    pub zs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PatternCountArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub z: PathBuf,
}

#[derive(Debug, Args)]
pub struct ArrowArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub colors: usize,
    /// Write a counterexample coloring to this file.
    #[arg(long, value_name = "FILE")]
    pub coloring_out: Option<PathBuf>,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct ArrowSearchArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub colors: usize,
    #[arg(long, value_name = "N", default_value_t = 6)]
    pub max_n: usize,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct DefinableArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    #[arg(long)]
    pub z: Option<PathBuf>,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct StableArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    #[arg(long = "z")]
    pub zs: Vec<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct RoelckeArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub z: Option<PathBuf>,
    /// Largest union size searched (default |B|+|Z|).
    #[arg(long, value_name = "N")]
    pub max_n: Option<usize>,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub z: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Largest host size searched (default depth·(|A|+|Z|)).
    #[arg(long, value_name = "N")]
    pub max_host: Option<usize>,
    /// Write the witness host to this structure file.
    #[arg(long, value_name = "FILE")]
    pub witness_out: Option<PathBuf>,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct ProximalArgs {
    #[command(flatten)]
    pub age: AgeArg,
    /// The finite universe U.
    #[arg(long, visible_alias = "u")]
    pub c: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<PathBuf>,
    /// Coloring of embeddings(A, U).
    #[arg(long, value_name = "FILE")]
    pub coloring: Option<PathBuf>,
    /// Largest D tested.
    #[arg(long, value_name = "N", default_value_t = 2)]
    pub max_n: usize,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct ProximalArrowArgs {
    #[command(flatten)]
    pub proximal: ProximalArgs,
    #[arg(long)]
    pub b: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvexArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Colorings of the adversary use this many colors.
    #[arg(long, default_value_t = 2)]
    pub colors: usize,
    #[command(flatten)]
    pub cert: CertArgs,
}

#[derive(Debug, Args)]
pub struct OrbitsArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub c: PathBuf,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub c: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub max_blocks: usize,
}

#[derive(Debug, Args)]
pub struct CoherentArgs {
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: PathBuf,
    /// Comma-separated structure files F_1, F_2, ...
    #[arg(long, value_delimiter = ',', required = true)]
    pub chain: Vec<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub max_blocks: usize,
}

#[derive(Debug, Args)]
pub struct AmalgamationArgs {
    #[command(flatten)]
    pub age: AgeArg,
    /// joint-embedding, amalgamation or free-amalgamation.
    #[arg(long, default_value = "amalgamation")]
    pub property: String,
    /// Largest size of A, B and C.
    #[arg(long, value_name = "N", default_value_t = 3)]
    pub max_n: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
    #[command(flatten)]
    pub age: AgeArg,
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub c: Option<PathBuf>,
    #[arg(long = "z")]
    pub zs: Vec<PathBuf>,
}
