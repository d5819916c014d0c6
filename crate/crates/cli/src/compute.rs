//! `compute`: Gram table, strip boundaries, zeros and strips, each loaded
//! from the cache when a matching entry exists.

use anyhow::{Context, Result};
use rayon::ThreadPoolBuilder;
use zeta_strips::contour::{BoundaryCrossing, ContourTracer, Direction};
use zeta_strips::gram::{gram_points_below, GramPoint};
use zeta_strips::strips::{strips_from_boundaries, trace_boundaries, Strip};
use zeta_strips::{Error, STRIP_PERIOD};

use crate::cache::{write_atomic, Cache, Kind, Lookup};
use crate::config::{ensure_dir, RunConfig};
use crate::exit::{coded, ExitKind};
use crate::records;

/// Largest excursion of a strip bottom from `2mπ / ln 2` expected in range;
/// boundaries up to `t_max − BOTTOM_SLACK` are traced in one parallel batch.
const BOTTOM_SLACK: f64 = 2.5;

#[derive(Debug, Clone)]
pub struct ComputeOutput {
    pub gram: Vec<GramPoint>,
    pub boundaries: Vec<BoundaryCrossing>,
    pub strips: Vec<Strip>,
    pub loaded: Vec<Kind>,
    pub computed: Vec<Kind>,
}

/// Runs `f` on a pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building the worker pool")?;
    Ok(pool.install(f))
}

fn note_stale(kind: Kind, lookup: &Lookup) {
    match lookup {
        Lookup::Stale(why) | Lookup::Corrupt(why) => {
            eprintln!("note: recomputing {}: {why}", kind.name())
        }
        _ => {}
    }
}

/// Boundaries whose crossing lies at or below `t_max`, capped at
/// `m_max + 1`.
pub fn trace_needed(tracer: &ContourTracer, t_max: f64, m_max: Option<usize>) -> Result<Vec<BoundaryCrossing>> {
    let cap = m_max.map(|m| m + 1);
    let batch = (((t_max - BOTTOM_SLACK) / STRIP_PERIOD).floor().max(0.0) as usize)
        .min(cap.unwrap_or(usize::MAX));
    let mut out = trace_boundaries(tracer, batch)?;
    loop {
        if out.last().is_some_and(|b| b.crossing_t > t_max) || cap.is_some_and(|c| out.len() >= c) {
            break;
        }
        let m = out.len() + 1;
        let b = match tracer.boundary(m) {
            Ok(b) => b,
            Err(Error::WindowExceeded { .. }) => break,
            Err(e) => return Err(e).with_context(|| format!("strip boundary {m}")),
        };
        if let Some(prev) = out.last() {
            if b.crossing_t <= prev.crossing_t {
                return Err(Error::BoundaryOrder {
                    m,
                    t: b.crossing_t,
                    previous: prev.crossing_t,
                }
                .into());
            }
        }
        out.push(b);
    }
    let keep = out.partition_point(|b| b.crossing_t <= t_max);
    out.truncate(keep);
    Ok(out)
}

pub fn compute(cfg: &RunConfig) -> Result<ComputeOutput> {
    let tracer = ContourTracer::new(cfg.strict_eval()?, cfg.trace)?;
    let cache = Cache::new(&cfg.cache_dir);
    let fp = cfg.fingerprint();
    let mut loaded = Vec::new();
    let mut computed = Vec::new();

    with_threads(cfg.threads, || -> Result<ComputeOutput> {
        let gram = match cache.load(Kind::Gram, &fp) {
            Lookup::Hit(text) => {
                loaded.push(Kind::Gram);
                records::parse_gram_cache(&text)?
            }
            other => {
                note_stale(Kind::Gram, &other);
                let table = gram_points_below(cfg.t_max)?;
                cache.store(Kind::Gram, &fp, &records::gram_cache(&table)?, table.len())?;
                computed.push(Kind::Gram);
                table
            }
        };

        let boundaries = match cache.load(Kind::Boundaries, &fp) {
            Lookup::Hit(text) => {
                loaded.push(Kind::Boundaries);
                records::parse_boundaries_cache(&text)?
            }
            other => {
                note_stale(Kind::Boundaries, &other);
                let b = trace_needed(&tracer, cfg.t_max, cfg.m_max)?;
                cache.store(Kind::Boundaries, &fp, &records::boundaries_cache(&b)?, b.len())?;
                computed.push(Kind::Boundaries);
                b
            }
        };
        if boundaries.len() < 2 {
            return Err(coded(
                ExitKind::Usage,
                format!("t_max = {} is too small to contain a whole strip", cfg.t_max),
            ));
        }

        let strips = match (cache.load(Kind::Strips, &fp), cache.load(Kind::Zeros, &fp)) {
            (Lookup::Hit(s), Lookup::Hit(z)) => {
                loaded.extend([Kind::Strips, Kind::Zeros]);
                records::parse_strips(&s, &z)?
            }
            (s, z) => {
                note_stale(Kind::Strips, &s);
                note_stale(Kind::Zeros, &z);
                let strips = strips_from_boundaries(&boundaries, &tracer)?;
                let n_zeros = strips.iter().map(Strip::n_zeros).sum();
                cache.store(Kind::Zeros, &fp, &records::zeros_cache(&strips)?, n_zeros)?;
                cache.store(Kind::Strips, &fp, &records::strips_cache(&strips)?, strips.len())?;
                computed.extend([Kind::Strips, Kind::Zeros]);
                strips
            }
        };

        Ok(ComputeOutput {
            gram,
            boundaries,
            strips,
            loaded: std::mem::take(&mut loaded),
            computed: std::mem::take(&mut computed),
        })
    })?
}

/// Writes `gram.csv`, `strips.csv` and `zeros.csv` into the output directory.
pub fn write_outputs(cfg: &RunConfig, out: &ComputeOutput) -> Result<()> {
    ensure_dir(&cfg.out_dir)?;
    write_atomic(&cfg.out_path("gram.csv"), records::gram_output(&out.gram)?.as_bytes())?;
    write_atomic(&cfg.out_path("strips.csv"), records::strips_output(&out.strips)?.as_bytes())?;
    write_atomic(&cfg.out_path("zeros.csv"), records::zeros_output(&out.strips)?.as_bytes())?;
    Ok(())
}

/// Traces the level curve launched at index `k` leftwards and writes
/// `contour_k<k>.csv`.
pub fn write_contour(cfg: &RunConfig, k: i64) -> Result<std::path::PathBuf> {
    let tracer = ContourTracer::new(cfg.strict_eval()?, cfg.trace)?;
    let start = tracer.launch_point(k)?;
    let path = tracer.trace(start, Direction::Leftward)?;
    ensure_dir(&cfg.out_dir)?;
    let file = cfg.out_path(&format!("contour_k{k}.csv"));
    write_atomic(&file, records::contour_output(&path)?.as_bytes())?;
    Ok(file)
}
