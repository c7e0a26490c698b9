//! `parselet`: learn models once (cached), then evaluate them.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 malformed input, 5 bad parameters.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use parselet_archive::{describe, dump_model, extract, kompress, Cache, Item};
use parselet_core::{Dictionary, Exec, LetterSet};
use parselet_deflate::DeflateParams;
use parselet_inference::{model_from_prior, score_all};
use parselet_measures::{distance_matrix, ncd_matrix, pc_skeleton, Corpus, Denom, Distance, Measure, Universe};
use parselet_rd::{Norm, RdParams};
use parselet_serialize::{read_archive, write_archive, write_costs, SerializeError};

#[derive(Debug)]
enum CliError {
    Io(String),
    Format(String),
    Param(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 3,
            CliError::Format(_) => 4,
            CliError::Param(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Format(m) => write!(f, "malformed input: {m}"),
            CliError::Param(m) => write!(f, "invalid parameter: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<SerializeError> for CliError {
    fn from(e: SerializeError) -> Self {
        CliError::Format(e.to_string())
    }
}

impl From<parselet_archive::ArchiveError> for CliError {
    fn from(e: parselet_archive::ArchiveError) -> Self {
        use parselet_archive::ArchiveError as E;
        match e {
            E::Io(e) => CliError::Io(e.to_string()),
            e => CliError::Format(e.to_string()),
        }
    }
}

impl From<parselet_measures::MeasureError> for CliError {
    fn from(e: parselet_measures::MeasureError) -> Self {
        use parselet_measures::MeasureError as E;
        match e {
            E::Archive(a) => a.into(),
            e => CliError::Param(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "parselet", version, about = "Grammar-based compression and information calculus")]
struct Cli {
    /// Worker threads; 1 runs everything sequentially.  Defaults to the logical cores.
    #[arg(short = 'j', long, global = true)]
    jobs: Option<usize>,
    /// Cache directory (default: $PARSELET_CACHE, else the user cache directory).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Learn {
    /// Minimum occurrences for a conjunction.
    #[arg(long, default_value_t = 6)]
    tsig: u32,
    /// Cost threshold for options in bits (0 disables).
    #[arg(long, default_value_t = 0.0)]
    topt: f64,
    /// Cost threshold for disjunctions in bits (0 disables).
    #[arg(long, default_value_t = 0.0)]
    talt: f64,
    /// Sets the option and disjunction thresholds to 2 bits where they are 0.
    #[arg(long)]
    generalize: bool,
    /// Tokenizer separators: `none`, `auto` (non-alphanumeric bytes) or the bytes of SET.
    #[arg(long, default_value = "none")]
    seps: String,
    /// Contraction steps past the codelength minimum, or `inf`.
    #[arg(long, default_value = "250")]
    patience: String,
    /// Skips the rate-distortion search.
    #[arg(long)]
    lossless: bool,
    /// Distortion norm: l1 or l2.
    #[arg(long, default_value = "l1")]
    norm: String,
    /// Hard cap on contraction steps.
    #[arg(long)]
    max_steps: Option<usize>,
}

impl Learn {
    fn deflate(&self) -> Result<DeflateParams> {
        if self.tsig == 0 {
            return Err(CliError::Param("--tsig must be at least 1".into()));
        }
        if self.topt < 0.0 || self.talt < 0.0 || !self.topt.is_finite() || !self.talt.is_finite() {
            return Err(CliError::Param("thresholds must be finite and non-negative".into()));
        }
        let mut p = DeflateParams { t_sig: self.tsig, t_opt: self.topt, t_alt: self.talt, separators: None };
        if self.generalize {
            if p.t_opt == 0.0 {
                p.t_opt = 2.0;
            }
            if p.t_alt == 0.0 {
                p.t_alt = 2.0;
            }
        }
        p.separators = match self.seps.as_str() {
            "none" => None,
            "auto" => Some(LetterSet::non_alphanumeric()),
            "" => return Err(CliError::Param("empty separator set".into())),
            set => Some(LetterSet::from_bytes(set.as_bytes())),
        };
        Ok(p)
    }

    fn rd(&self) -> Result<RdParams> {
        let deflate = self.deflate()?;
        if self.lossless {
            return Ok(RdParams { max_steps: self.max_steps, ..RdParams::lossless(deflate) });
        }
        let patience = match self.patience.as_str() {
            "inf" => None,
            n => Some(n.parse().map_err(|_| CliError::Param(format!("--patience {n}")))?),
        };
        let norm = match self.norm.to_ascii_lowercase().as_str() {
            "l1" => Norm::L1,
            "l2" => Norm::L2,
            n => return Err(CliError::Param(format!("--norm {n}"))),
        };
        Ok(RdParams { deflate, patience, norm, max_steps: self.max_steps })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Compresses one file into a single-string archive and prints its costs.
    Compress {
        file: PathBuf,
        /// Output archive (default: FILE.mpz).
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        learn: Learn,
    },
    /// Restores the files of an archive.
    Decompress {
        archive: PathBuf,
        /// Writes the denoised strings instead of the originals.
        #[arg(long)]
        lossy: bool,
        /// Output file (one string) or directory (several); stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compresses each file on its own and stores the merged models.
    Archive {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        learn: Learn,
    },
    /// Manages the compression cache.
    Cache {
        #[arg(value_parser = ["list", "clear", "path"])]
        action: String,
    },
    /// Dumps the structure and accounting of an archive.
    Inspect {
        archive: PathBuf,
        /// Also lists every model entry.
        #[arg(long)]
        model: bool,
    },
    /// Scores a target string against hypotheses (`empty`, an archive, or a file).
    Score {
        target: PathBuf,
        #[arg(long = "hypothesis", required = true)]
        hypotheses: Vec<String>,
        /// Builds models of hypothesis files losslessly with T_sig = 1 instead of compressing them.
        #[arg(long)]
        prior: bool,
        #[command(flatten)]
        learn: Learn,
    },
    /// Pairwise distance matrix as CSV.
    Dist {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = "nid")]
        metric: String,
        #[arg(long, default_value = "kstar")]
        measure: String,
        #[command(flatten)]
        learn: Learn,
    },
    /// Probabilities of files against a universe of strings.
    Prob {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Directory whose files make up the universe.
        #[arg(long)]
        universe: PathBuf,
        #[command(flatten)]
        learn: Learn,
    },
    /// Conditional mutual information and independence statistic of X and Y given Z.
    Indep {
        #[arg(short = 'x', required = true, num_args = 1..)]
        x: Vec<PathBuf>,
        #[arg(short = 'y', required = true, num_args = 1..)]
        y: Vec<PathBuf>,
        #[arg(short = 'z', num_args = 1..)]
        z: Vec<PathBuf>,
        #[arg(long, default_value = "kstar")]
        measure: String,
        #[arg(long, default_value = "sqrtsum")]
        denom: String,
        #[command(flatten)]
        learn: Learn,
    },
    /// Skeleton of the PC algorithm over the files.
    Pc {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value = "kstar")]
        measure: String,
        #[arg(long, default_value = "sqrtsum")]
        denom: String,
        /// Prints DOT instead of an edge list.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        learn: Learn,
    },
    /// Full rate-distortion profile of one file as CSV.
    RdProfile {
        file: PathBuf,
        #[command(flatten)]
        learn: Learn,
    },
}

fn read(p: &Path) -> Result<Vec<u8>> {
    fs::read(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

fn write(p: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

fn name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn out(s: &str) -> Result<()> {
    let mut o = std::io::stdout().lock();
    o.write_all(s.as_bytes())?;
    Ok(())
}

struct Ctx {
    exec: Exec,
    cache: Option<Cache>,
}

impl Ctx {
    fn cache(&self) -> Option<&Cache> {
        self.cache.as_ref()
    }

    fn items(&self, files: &[PathBuf]) -> Result<Vec<Item>> {
        files.iter().map(|f| Ok(Item::from_file(&read(f)?, self.exec))).collect()
    }

    fn corpus(&self, files: &[PathBuf], learn: &Learn) -> Result<Corpus> {
        let names = files.iter().map(|f| name(f)).collect();
        Ok(Corpus::compress(names, &self.items(files)?, &learn.rd()?, self.cache(), self.exec)?)
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e: T::Err| CliError::Param(e.to_string()))
}

fn run(cli: Cli) -> Result<()> {
    let exec = match cli.jobs {
        Some(0) => return Err(CliError::Param("--jobs must be at least 1".into())),
        Some(1) => Exec::Sequential,
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .map_err(|e| CliError::Param(e.to_string()))?;
            Exec::default()
        }
        None => Exec::default(),
    };
    let cache = if cli.no_cache { None } else { Some(cli.cache.map_or_else(Cache::from_env, Cache::new)) };
    let ctx = Ctx { exec, cache };
    match cli.cmd {
        Cmd::Compress { file, output, learn } => {
            let params = learn.rd()?;
            let item = Item::from_file(&read(&file)?, exec);
            let (c, hit) = parselet_archive::compress_one(&item, &params, ctx.cache())?;
            let costs = write_costs(&c.dict, &c.data, &c.original)?;
            let depth = parselet_rd::logical_depth(&c.data, &c.dict)?;
            let a = parselet_serialize::Archive {
                dict: c.dict.clone(),
                strings: vec![parselet_serialize::container::ArchiveString {
                    data: c.data.clone(),
                    original: c.original.clone(),
                    dtype: c.dtype,
                }],
            };
            let (bytes, report) = write_archive(&a)?;
            let output = output.unwrap_or_else(|| {
                let mut o = file.clone().into_os_string();
                o.push(".mpz");
                o.into()
            });
            write(&output, &bytes)?;
            out(&format!(
                "input      {} bytes\nrate       {} bits\ncodelength {:.1} bits\nentries    {}\ndepth      {}\ndiffs      {}\narchive    {} bytes -> {}\ncache      {}\n",
                c.original.len(),
                costs.rate(),
                costs.codelength(),
                c.dict.len(),
                depth,
                costs.n_diffs,
                report.file_bytes,
                output.display(),
                if ctx.cache.is_none() { "off" } else if hit { "hit" } else { "miss" },
            ))
        }
        Cmd::Decompress { archive, lossy, output } => {
            let files = extract(&read(&archive)?, lossy, exec)?;
            match (output, files.len()) {
                (None, _) => {
                    let mut o = std::io::stdout().lock();
                    for f in &files {
                        o.write_all(f)?;
                    }
                    Ok(())
                }
                (Some(p), 1) => write(&p, &files[0]),
                (Some(dir), _) => {
                    fs::create_dir_all(&dir)?;
                    for (i, f) in files.iter().enumerate() {
                        write(&dir.join(format!("{i:04}")), f)?;
                    }
                    Ok(())
                }
            }
        }
        Cmd::Archive { files, output, learn } => {
            let k = kompress(&ctx.items(&files)?, &learn.rd()?, ctx.cache(), exec)?;
            let (bytes, report) = write_archive(&k.to_archive())?;
            write(&output, &bytes)?;
            out(&format!(
                "{} strings, {} entries, {} bytes ({} compressed, {} cache hits)\n",
                files.len(),
                report.entries,
                report.file_bytes,
                k.compressions,
                k.cache_hits
            ))
        }
        Cmd::Cache { action } => {
            let c = ctx.cache.ok_or_else(|| CliError::Param("the cache is disabled".into()))?;
            match action.as_str() {
                "path" => out(&format!("{}\n", c.dir().display())),
                "clear" => out(&format!("removed {} entries\n", c.clear()?)),
                _ => {
                    let mut s = String::new();
                    for (k, size) in c.entries()? {
                        s.push_str(&format!("{k}\t{size}\n"));
                    }
                    out(&s)
                }
            }
        }
        Cmd::Inspect { archive, model } => {
            let a = read_archive(&read(&archive)?)?;
            let (_, report) = write_archive(&a)?;
            let mut s = describe(&a, &report);
            if model {
                s.push_str("\n<Entries>\n\n");
                s.push_str(&dump_model(&a.dict));
            }
            out(&s)
        }
        Cmd::Score { target, hypotheses, prior, learn } => {
            let params = learn.rd()?;
            let x = read(&target)?;
            let mut labels = vec!["empty".to_string()];
            let mut models = vec![Dictionary::new()];
            for h in &hypotheses {
                if h == "empty" {
                    continue;
                }
                let bytes = read(Path::new(h))?;
                let d = if h.ends_with(".mpz") {
                    read_archive(&bytes)?.dict
                } else if prior {
                    model_from_prior(&bytes, &params.deflate)
                } else {
                    parselet_archive::compress_one(&Item::bytes(bytes), &params, ctx.cache())?.0.dict
                };
                labels.push(h.clone());
                models.push(d);
            }
            let scores = score_all(&x, &models, &params, ctx.cache(), exec)?;
            let mut order: Vec<usize> = (0..scores.len()).collect();
            order.sort_by_key(|&i| (scores[i].bits(), i));
            let mut s = String::from("rank\tbits\tmodel\tstring\treuse\thypothesis\n");
            for (r, &i) in order.iter().enumerate() {
                let sc = &scores[i];
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{:.3}\t{}\n",
                    r + 1,
                    sc.bits(),
                    sc.model_bits,
                    sc.string_bits,
                    sc.reuse,
                    labels[i]
                ));
            }
            out(&s)
        }
        Cmd::Dist { files, metric, measure, learn } => {
            let which: Distance = parse(&metric)?;
            let m = if which == Distance::Ncd {
                let strings = files.iter().map(|f| read(f)).collect::<Result<Vec<_>>>()?;
                ncd_matrix(files.iter().map(|f| name(f)).collect(), &strings, &learn.deflate()?, exec)
            } else {
                let c = ctx.corpus(&files, &learn)?;
                distance_matrix(&c, which, parse(&measure)?, exec)?
            };
            out(&m.to_csv())
        }
        Cmd::Prob { files, universe, learn } => {
            let mut uni: Vec<PathBuf> = fs::read_dir(&universe)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<Vec<_>>>()?
                .into_iter()
                .filter(|p| p.is_file())
                .collect();
            uni.sort();
            let n = files.len();
            let all: Vec<PathBuf> = files.iter().cloned().chain(uni.iter().cloned()).collect();
            let c = ctx.corpus(&all, &learn)?;
            let omega: Vec<usize> = (n..all.len()).collect();
            let u = Universe::new(&c, &omega)?;
            let mut s = format!("# universe: {} strings, {} entries\nname,p", uni.len(), u.size());
            for f in &files {
                s.push_str(&format!(",p(.|{})", name(f)));
            }
            s.push('\n');
            for (i, f) in files.iter().enumerate() {
                s.push_str(&format!("{},{}", name(f), u.p(&[i])));
                for j in 0..n {
                    match u.p_given(&[i], &[j]) {
                        Ok(v) => s.push_str(&format!(",{v}")),
                        Err(_) => s.push_str(",nan"),
                    }
                }
                s.push('\n');
            }
            out(&s)
        }
        Cmd::Indep { x, y, z, measure, denom, learn } => {
            let m: Measure = parse(&measure)?;
            let d: Denom = parse(&denom)?;
            let all: Vec<PathBuf> = x.iter().chain(&y).chain(&z).cloned().collect();
            let c = ctx.corpus(&all, &learn)?;
            let xs: Vec<usize> = (0..x.len()).collect();
            let ys: Vec<usize> = (x.len()..x.len() + y.len()).collect();
            let zs: Vec<usize> = (x.len() + y.len()..all.len()).collect();
            out(&format!(
                "K(X|Z)   = {}\nK(X|YZ)  = {}\nI(X:Y|Z) = {}\nI_nd     = {:.6}\nsyntactically independent: {}\n",
                c.relative(&xs, &zs, m),
                c.relative(&xs, &[ys.as_slice(), zs.as_slice()].concat(), m),
                c.cond_mutual(&xs, &ys, &zs, m),
                c.i_nd(&xs, &ys, &zs, m, d),
                c.syntactic_independent(&xs, &ys, &zs)
            ))
        }
        Cmd::Pc { files, eta, measure, denom, dot, learn } => {
            if !eta.is_finite() {
                return Err(CliError::Param("--eta must be finite".into()));
            }
            let c = ctx.corpus(&files, &learn)?;
            let sk = pc_skeleton(&c, eta, parse(&measure)?, parse(&denom)?, exec);
            if dot {
                return out(&sk.to_dot());
            }
            let mut s = String::new();
            for &(a, b) in &sk.edges {
                s.push_str(&format!("{} -- {}\n", sk.names[a], sk.names[b]));
            }
            out(&s)
        }
        Cmd::RdProfile { file, learn } => {
            let item = Item::from_file(&read(&file)?, exec);
            let (_, profile) = parselet_rd::compress(&item.data, &learn.rd()?)?;
            out(&profile.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("parselet: {e}");
            ExitCode::from(e.code())
        }
    }
}
