use clap::{Parser, Subcommand, ValueEnum};
use sslab_core::analysis::{self, Options};
use sslab_core::catalog::{self, CatalogEntry, Params};
use sslab_core::intersect::self_intersection_scan;
use sslab_core::locus::{fourpi_scan, scan, LocusFinding, Window};
use sslab_core::mesh::{export_mesh, sample_mesh, Projection};
use sslab_core::mfun::fmt_cplx;
use sslab_core::{suite, Config, Error, Result, C64};
use std::fmt::Write;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sslab", version, about = "Spacelike surfaces in R^4_1 from Weierstrass data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Catalog operations
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Full report for a catalog entry or data file
    Analyze {
        name: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value_t = Fmt::Text)]
        format: Fmt,
        /// skip the area exhaustion
        #[arg(long)]
        no_area: bool,
        /// skip the singular-locus scan
        #[arg(long)]
        no_locus: bool,
    },
    /// Sample a mesh and write it as OBJ or PLY (chosen by extension)
    Mesh {
        name: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long)]
        res: Option<usize>,
        #[arg(long, default_value = "drop-x4")]
        proj: Projection,
        #[arg(long)]
        out: PathBuf,
        /// also run the self-intersection scan
        #[arg(long)]
        scan: bool,
    },
    /// Solutions of phi = conj(psi) in a window, as CSV
    Locus {
        name: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        /// disc:R, annulus:R0,R1 or rect:X0,X1,Y0,Y1
        #[arg(long)]
        window: Window,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Singular-locus scan of the candidate -4 pi family
    #[command(name = "scan-4pi")]
    Scan4pi {
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// RE,IM
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, value_enum, default_value_t = Fmt::Text)]
        format: Fmt,
        /// run a single criterion
        #[arg(long)]
        only: Option<u32>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Names, parameters and descriptions
    List,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Text,
    Kv,
}

/// A catalog name, or a path to a data file when one exists.
fn resolve(name: &str, params: &[String]) -> Result<CatalogEntry> {
    let p = Path::new(name);
    if p.is_file() {
        if !params.is_empty() {
            return Err(Error::Param("data files take no --param".into()));
        }
        return catalog::from_data_file(p);
    }
    catalog::build(name, &Params::parse_pairs(params)?)
}

fn parse_re_im(s: &str) -> Result<C64> {
    let (re, im) = s.split_once(',').ok_or_else(|| Error::Parse(format!("expected RE,IM, got {s}")))?;
    let f = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {t}")));
    Ok(C64::new(f(re)?, f(im)?))
}

fn locus_csv(f: &LocusFinding) -> String {
    let mut s = String::from("kind,chain,re,im,residual,m,n,winding\n");
    let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_default();
    for p in &f.points {
        let _ = writeln!(
            s,
            "point,,{:.15e},{:.15e},{:.3e},{},{},{}",
            p.z.re,
            p.z.im,
            p.residual,
            opt(p.m.map(i64::from)),
            opt(p.n.map(i64::from)),
            opt(p.winding.map(i64::from))
        );
    }
    for (k, chain) in f.curves.iter().enumerate() {
        for z in chain {
            let _ = writeln!(s, "curve,{k},{:.15e},{:.15e},,,,", z.re, z.im);
        }
    }
    s
}

macro_rules! outln {
    ($o:expr, $($t:tt)*) => {{ let _ = writeln!($o, $($t)*); }};
}
macro_rules! out {
    ($o:expr, $($t:tt)*) => {{ let _ = write!($o, $($t)*); }};
}

fn run(cli: Cli, o: &mut String) -> Result<bool> {
    match cli.cmd {
        Cmd::Catalog { cmd: CatalogCmd::List } => {
            for it in catalog::list() {
                outln!(o, "{:<17} {}\n{:<17} params: {}", it.name, it.about, "", it.params);
            }
            Ok(true)
        }
        Cmd::Analyze { name, params, format, no_area, no_locus } => {
            let cfg = Config::load()?;
            let e = resolve(&name, &params)?;
            let a = analysis::analyze(&e, &cfg, Options { area: !no_area, locus: !no_locus });
            out!(o, "{}", if format == Fmt::Kv { analysis::to_kv(&a) } else { analysis::to_text(&a) });
            Ok(a.ok())
        }
        Cmd::Mesh { name, params, res, proj, out, scan } => {
            let cfg = Config::load()?;
            let e = resolve(&name, &params)?;
            let m = sample_mesh(&e.data, e.chart, res.unwrap_or(cfg.mesh_res), &cfg)?;
            export_mesh(&m, proj, &out)?;
            outln!(o, "wrote {} ({} vertices, {} faces, {proj})", out.display(), m.vertices.len(), m.faces.len());
            outln!(o, "isometry defect {:.3e}", m.isometry_defect());
            for c in &m.cuts {
                let off: Vec<String> = c.offset.iter().map(|v| format!("{v:.12e}")).collect();
                outln!(o, "cut at theta {:.6}: offset {}", c.theta, off.join(" "));
            }
            if scan {
                let r = self_intersection_scan(&e.data, &m, true, &cfg);
                outln!(o, "self-intersections: {} clusters from {} candidates", r.clusters.len(), r.candidates);
                for c in &r.clusters {
                    let pre: Vec<String> = c.preimages.iter().map(|z| fmt_cplx(*z)).collect();
                    let x: Vec<String> = c.position.iter().map(|v| format!("{v:.9}")).collect();
                    outln!(o, "  x = ({}) at z = {} (residual {:.1e})", x.join(", "), pre.join(", "), c.residual);
                }
            }
            Ok(true)
        }
        Cmd::Locus { name, params, window, grid } => {
            let cfg = Config::load()?;
            let e = resolve(&name, &params)?;
            let f = scan(&e.data, window, grid.unwrap_or(cfg.locus_grid))?;
            eprintln!("{}: {:?} in {}", e.name, f.kind, f.window);
            out!(o, "{}", locus_csv(&f));
            Ok(true)
        }
        Cmd::Scan4pi { m, a } => {
            let cfg = Config::load()?;
            let a = parse_re_im(&a)?;
            let f = fourpi_scan(m, a, &cfg)?;
            outln!(o, "m={m} a={} b={} window {}: {:?}", fmt_cplx(a), fmt_cplx(C64::new(1.0, 0.0) - a), f.window, f.kind);
            out!(o, "{}", locus_csv(&f));
            Ok(true)
        }
        Cmd::Verify { format, only } => {
            let cfg = Config::load()?;
            let outs = match only {
                Some(i) if (1..=suite::CRITERIA.len() as u32).contains(&i) => vec![suite::run_one(i, &cfg)],
                Some(i) => return Err(Error::Param(format!("no criterion {i}"))),
                None => suite::run_all(&cfg),
            };
            for t in &outs {
                let v = if t.pass { "PASS" } else { "FAIL" };
                match format {
                    Fmt::Text => outln!(o, "{v} {:>2} {}: {}", t.id, t.name, t.detail.trim_end()),
                    Fmt::Kv => outln!(o, "criterion.{}={v}", t.id),
                }
            }
            let pass = outs.iter().all(|o| o.pass);
            match format {
                Fmt::Text => outln!(o, "{}/{} criteria pass", outs.iter().filter(|o| o.pass).count(), outs.len()),
                Fmt::Kv => outln!(o, "ok={pass}"),
            }
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    let mut o = String::new();
    let r = run(Cli::parse(), &mut o);
    // a closed pipe downstream is not an error here
    let _ = std::io::stdout().write_all(o.as_bytes());
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(2)
        }
    }
}
