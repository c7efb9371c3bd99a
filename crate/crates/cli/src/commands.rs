//! Execution of the resolved configuration. Every command renders into one
//! or more named parts, each carrying the provenance of the run.

use std::fmt::Write as _;

use noble_means::diffraction::{ac_density, fourier_module_points, pp_table, uniform_grid, SpectrumDocument};
use noble_means::exact::{entropy_series, exact_words, word_length};
use noble_means::geometry::{histogram_export, meyer_check, realize, strip_export, super_window};
use noble_means::measure::{birkhoff_check, build_induced};
use noble_means::ring::lambda;
use noble_means::subst::{legal_words_for, DEFAULT_MAX_ROUNDS};
use noble_means::{Error, Letter, RandomSubst, Word};
use serde::Serialize;
use serde_json::json;

use crate::config::{
    BirkhoffParams, CommandConfig, DiffractParams, EntropyParams, Format, FreqsParams, LegalParams,
    LiftParams, RunConfig, StripParams, WordsParams,
};
use crate::error::CliError;
use crate::svg::{Chart, StackedBar};

/// Longest random word the CLI will grow.
pub const LETTER_LIMIT: u128 = 50_000_000;
/// Largest patch exported point by point or scanned for the Meyer summary.
pub const POINT_LIMIT: usize = 5_000_000;
/// Letters of the patch prefix used for the Meyer summary.
pub const MEYER_PREFIX: usize = 1_000_000;
/// Largest lattice box half-width for `strip`.
pub const STRIP_BOUND_LIMIT: i128 = 1000;

/// One rendered output: written to `--out` (or `<stem>_<name>.<ext>` when a
/// command renders several parts) or to standard output.
#[derive(Clone, Debug, PartialEq)]
pub struct Part {
    pub name: Option<&'static str>,
    pub content: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub config: RunConfig,
}

impl Provenance {
    pub fn of(cfg: &RunConfig) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: cfg.hash(),
            config: cfg.clone(),
        }
    }

    fn line(&self) -> String {
        format!("{} {} config-sha256={}", self.tool, self.version, self.config_sha256)
    }

    fn csv(&self, name: Option<&'static str>, body: String) -> Part {
        let config = serde_json::to_string(&self.config).expect("configuration serialises");
        Part { name, content: format!("# {}\n# config={config}\n{body}", self.line()) }
    }

    fn json<T: Serialize>(&self, data: &T) -> Part {
        let doc = json!({ "provenance": self, "data": data });
        let mut content = serde_json::to_string_pretty(&doc).expect("results serialise");
        content.push('\n');
        Part { name: None, content }
    }

    fn svg(&self, name: Option<&'static str>, chart: &Chart) -> Part {
        let config = serde_json::to_string(&self.config).expect("configuration serialises");
        Part { name, content: chart.render(&format!("{} config={config}", self.line())) }
    }
}

fn no_svg(command: &str) -> CliError {
    CliError::Config(format!("`{command}` has no SVG rendering; use csv or json"))
}

fn parse_word(s: &str) -> Result<Word, CliError> {
    s.parse::<Word>().map_err(|_| CliError::Config(format!("not a word over {{a, b}}: {s:?}")))
}

/// Length of `ζ^k(w)`: `a` grows like `ℓ_{k+2}`, `b` like `ℓ_{k+1}`.
fn grown_length(m: u32, w: &Word, k: usize) -> u128 {
    w.count_a() as u128 * word_length(m, k + 2) + w.count_b() as u128 * word_length(m, k + 1)
}

fn grow(cfg: &RunConfig, seed_word: &Word, iters: usize) -> Result<Word, CliError> {
    let len = grown_length(cfg.m, seed_word, iters);
    if len > LETTER_LIMIT {
        return Err(Error::SizeLimit { what: "random word", lower_bound: len, limit: LETTER_LIMIT }.into());
    }
    let mut rs = RandomSubst::new(cfg.probabilities()?, cfg.seed);
    Ok(rs.iterate(seed_word, iters))
}

pub fn execute(cfg: &RunConfig) -> Result<Vec<Part>, CliError> {
    let prov = Provenance::of(cfg);
    match &cfg.command {
        CommandConfig::Words(p) => words(cfg, p, &prov),
        CommandConfig::Legal(p) => legal(cfg, p, &prov),
        CommandConfig::Entropy(p) => entropy(cfg, p, &prov),
        CommandConfig::Freqs(p) => freqs(cfg, p, &prov),
        CommandConfig::Birkhoff(p) => birkhoff(cfg, p, &prov),
        CommandConfig::Lift(p) => lift(cfg, p, &prov),
        CommandConfig::Strip(p) => strip(cfg, p, &prov),
        CommandConfig::Diffract(p) => diffract(cfg, p, &prov),
    }
}

fn words(cfg: &RunConfig, p: &WordsParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    if cfg.format == Format::Svg {
        return Err(no_svg("words"));
    }
    if p.exact {
        let record = exact_words(cfg.m, p.gen)?.record(p.list_threshold);
        return Ok(vec![match cfg.format {
            Format::Json => prov.json(&record),
            _ => {
                let mut body = format!(
                    "# m={} n={} length={} count={}\nindex,word\n",
                    record.m, record.n, record.length, record.count
                );
                for (i, w) in record.words.iter().flatten().enumerate() {
                    let _ = writeln!(body, "{i},{w}");
                }
                prov.csv(None, body)
            }
        }]);
    }
    let w = grow(cfg, &parse_word(&p.seed_word)?, p.iters)?;
    let word = w.to_string();
    Ok(vec![match cfg.format {
        Format::Json => prov.json(&json!({
            "seed_word": p.seed_word,
            "iters": p.iters,
            "length": w.len(),
            "count_a": w.count_a(),
            "count_b": w.count_b(),
            "word": word,
        })),
        _ => prov.csv(
            None,
            format!("length,count_a,count_b,word\n{},{},{},{word}\n", w.len(), w.count_a(), w.count_b()),
        ),
    }])
}

fn legal(cfg: &RunConfig, p: &LegalParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    let set = legal_words_for(&cfg.probabilities()?, p.ell, DEFAULT_MAX_ROUNDS)?;
    let words = set.as_strings();
    Ok(vec![match cfg.format {
        Format::Json => prov.json(&json!({
            "m": cfg.m, "ell": p.ell, "count": words.len(), "words": words,
        })),
        Format::Csv => {
            let mut body = String::from("word\n");
            for w in &words {
                let _ = writeln!(body, "{w}");
            }
            prov.csv(None, body)
        }
        Format::Svg => return Err(no_svg("legal")),
    }])
}

fn entropy(cfg: &RunConfig, p: &EntropyParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    let m_max = p.m_max.unwrap_or(cfg.m);
    if m_max < cfg.m {
        return Err(CliError::Config(format!("m_max = {m_max} is below m = {}", cfg.m)));
    }
    let rows = (cfg.m..=m_max).map(|m| entropy_series(m, p.truncation)).collect::<Result<Vec<_>, _>>()?;
    Ok(vec![match cfg.format {
        Format::Json => prov.json(&rows),
        Format::Csv => {
            let mut body = String::from("m,value,tail_bound,truncation\n");
            for r in &rows {
                let _ = writeln!(body, "{},{},{},{}", r.m, r.value, r.tail_bound, r.truncation);
            }
            prov.csv(None, body)
        }
        Format::Svg => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.value)).collect();
            let chart = Chart {
                title: "topological entropy".into(),
                x_label: "m".into(),
                y_label: "entropy (nats per letter)".into(),
                points: pts.iter().map(|&xy| (xy, "black")).collect(),
                polylines: vec![(pts, "steelblue")],
                ..Chart::default()
            };
            prov.svg(None, &chart)
        }
    }])
}

fn freqs(cfg: &RunConfig, p: &FreqsParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    let sys = build_induced(&cfg.probabilities()?, p.ell)?;
    let table = sys.measure_table();
    Ok(vec![match cfg.format {
        Format::Json => prov.json(&sys.export()),
        Format::Csv => {
            let mut body = String::from("word,frequency\n");
            for (w, f) in &table {
                let _ = writeln!(body, "{w},{f}");
            }
            prov.csv(None, body)
        }
        Format::Svg => {
            let chart = Chart {
                title: format!("frequencies of legal {}-words", p.ell),
                x_label: "word index (alphabetical)".into(),
                y_label: "frequency".into(),
                bars: table
                    .iter()
                    .enumerate()
                    .map(|(i, (_, f))| StackedBar {
                        lo: i as f64 + 0.1,
                        hi: i as f64 + 0.9,
                        parts: vec![(*f, "steelblue")],
                    })
                    .collect(),
                ..Chart::default()
            };
            prov.svg(None, &chart)
        }
    }])
}

fn birkhoff(cfg: &RunConfig, p: &BirkhoffParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    let w = parse_word(&p.word)?;
    let report = birkhoff_check(&cfg.probabilities()?, cfg.seed, w.letters(), p.window, p.trials, p.offset)?;
    Ok(vec![match cfg.format {
        Format::Json => prov.json(&report),
        Format::Csv => prov.csv(
            None,
            format!(
                "word,window,trials,offset,expected,mean,std_error,deviation,passed\n{},{},{},{},{},{},{},{},{}\n",
                report.word,
                report.window,
                report.trials,
                report.offset,
                report.expected,
                report.mean,
                report.std_error,
                report.deviation,
                report.passed
            ),
        ),
        Format::Svg => return Err(no_svg("birkhoff")),
    }])
}

fn lift(cfg: &RunConfig, p: &LiftParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    if p.hist_bins == 0 {
        return Err(CliError::Config("hist_bins must be positive".into()));
    }
    let w = grow(cfg, &Word::new(vec![Letter::B]), p.iters)?;
    if p.points {
        if w.len() > POINT_LIMIT {
            return Err(Error::SizeLimit {
                what: "point export",
                lower_bound: w.len() as u128,
                limit: POINT_LIMIT as u128,
            }
            .into());
        }
        let ps = realize(&w, cfg.m, 0)?;
        return Ok(vec![match cfg.format {
            Format::Csv => {
                let mut body = Vec::new();
                ps.write_csv(&mut body).expect("writing to memory");
                prov.csv(None, String::from_utf8(body).expect("ASCII output"))
            }
            Format::Json => {
                let rows: Vec<_> = ps
                    .coords
                    .iter()
                    .zip(&ps.letters)
                    .map(|(x, l)| json!([x.value(), x.star(), l.as_char().to_string()]))
                    .collect();
                prov.json(&json!({ "columns": ["physical", "internal", "letter"], "points": rows }))
            }
            Format::Svg => {
                let chart = Chart {
                    title: "control points in the strip".into(),
                    x_label: "physical".into(),
                    y_label: "internal".into(),
                    points: ps
                        .coords
                        .iter()
                        .zip(&ps.letters)
                        .map(|(x, l)| ((x.value(), x.star()), letter_colour(*l)))
                        .collect(),
                    ..Chart::default()
                };
                prov.svg(None, &chart)
            }
        }]);
    }
    let hist = histogram_export(w.letters(), cfg.m, 0, p.hist_bins);
    Ok(vec![match cfg.format {
        Format::Csv => {
            let mut body = format!(
                "# points={} a_fraction={} outside={}\n",
                hist.total(),
                hist.a_fraction(),
                hist.outside
            );
            let mut rows = Vec::new();
            hist.write_csv(&mut rows).expect("writing to memory");
            body.push_str(&String::from_utf8(rows).expect("ASCII output"));
            prov.csv(None, body)
        }
        Format::Json => {
            let prefix = w.factor(0, w.len().min(MEYER_PREFIX));
            let meyer = meyer_check(&realize(&prefix, cfg.m, 0)?, p.meyer_cap);
            prov.json(&json!({
                "points": hist.total(),
                "a_fraction": hist.a_fraction(),
                "outside": hist.outside,
                "super_window": super_window(cfg.m),
                "histogram": hist.bins,
                "meyer_prefix": meyer,
            }))
        }
        Format::Svg => {
            let chart = Chart {
                title: "internal-space histogram (a red, b blue)".into(),
                x_label: "internal coordinate".into(),
                y_label: "count".into(),
                bars: hist
                    .bins
                    .iter()
                    .map(|b| StackedBar {
                        lo: b.lo,
                        hi: b.hi,
                        parts: vec![(b.count_a as f64, "firebrick"), (b.count_b as f64, "steelblue")],
                    })
                    .collect(),
                ..Chart::default()
            };
            prov.svg(None, &chart)
        }
    }])
}

fn letter_colour(l: Letter) -> &'static str {
    match l {
        Letter::A => "firebrick",
        Letter::B => "steelblue",
    }
}

fn strip(cfg: &RunConfig, p: &StripParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    if !(0..=STRIP_BOUND_LIMIT).contains(&p.bound) {
        return Err(CliError::Config(format!("bound must lie in 0..={STRIP_BOUND_LIMIT}")));
    }
    let data = strip_export(cfg.m, p.bound);
    Ok(match cfg.format {
        Format::Json => vec![prov.json(&data)],
        Format::Csv => {
            let (mut lattice, mut windows) = (Vec::new(), Vec::new());
            data.write_lattice_csv(&mut lattice).expect("writing to memory");
            data.write_windows_csv(&mut windows).expect("writing to memory");
            vec![
                prov.csv(Some("lattice"), String::from_utf8(lattice).expect("ASCII output")),
                prov.csv(Some("windows"), String::from_utf8(windows).expect("ASCII output")),
            ]
        }
        Format::Svg => {
            let sup = &data.super_window;
            let chart = Chart {
                title: format!("lattice points and windows, m = {}", cfg.m),
                x_label: "physical".into(),
                y_label: "internal".into(),
                points: data.lattice.iter().map(|&(_, _, x, xs)| ((x, xs), "black")).collect(),
                bands: std::iter::once((sup.lo_value(), sup.hi_value(), "gray"))
                    .chain(data.windows.iter().map(|w| (w.lo_value(), w.hi_value(), "steelblue")))
                    .collect(),
                ..Chart::default()
            };
            vec![prov.svg(None, &chart)]
        }
    })
}

fn diffract(cfg: &RunConfig, p: &DiffractParams, prov: &Provenance) -> Result<Vec<Part>, CliError> {
    let probs = cfg.probabilities()?;
    if cfg.m != 1 {
        return Err(Error::InvalidParameter(format!("diffraction needs m = 1, got m = {}", cfg.m)).into());
    }
    if p.kmin.is_nan() || p.kmax.is_nan() || p.kmin > p.kmax {
        return Err(CliError::Config(format!("kmin = {} exceeds kmax = {}", p.kmin, p.kmax)));
    }
    let pp = if p.pp {
        let kbound = p.kmax.abs().max(p.kmin.abs());
        let points: Vec<_> = fourier_module_points(p.pq_max, kbound)?
            .into_iter()
            .filter(|pt| (p.kmin..=p.kmax).contains(&pt.k))
            .collect();
        Some(pp_table(&points, p.steps, &probs)?)
    } else {
        None
    };
    let ac = if p.ac {
        Some(ac_density(&uniform_grid(p.kmin, p.kmax, p.kstep)?, p.truncation, &probs)?)
    } else {
        None
    };
    let doc =
        SpectrumDocument { probs: probs.as_slice().to_vec(), point_density: lambda(1) / 5f64.sqrt(), ac, pp };
    Ok(match cfg.format {
        Format::Json => vec![prov.json(&doc)],
        Format::Csv => {
            let both = doc.ac.is_some() && doc.pp.is_some();
            let mut parts = Vec::new();
            if let Some(ac) = &doc.ac {
                let mut body = Vec::new();
                ac.write_csv(&mut body).expect("writing to memory");
                parts.push(prov.csv(both.then_some("ac"), String::from_utf8(body).expect("ASCII output")));
            }
            if let Some(pp) = &doc.pp {
                let mut body = Vec::new();
                pp.write_csv(&mut body).expect("writing to memory");
                parts.push(prov.csv(both.then_some("pp"), String::from_utf8(body).expect("ASCII output")));
            }
            parts
        }
        Format::Svg => {
            let chart = Chart {
                title: "diffraction: Bragg peaks (stems) and continuous density (line)".into(),
                x_label: "k".into(),
                y_label: "intensity".into(),
                stems: doc
                    .pp
                    .iter()
                    .flat_map(|t| t.peaks.iter().map(|e| ((e.point.k, e.amplitude), "firebrick")))
                    .collect(),
                polylines: doc
                    .ac
                    .iter()
                    .map(|a| (a.kgrid.iter().copied().zip(a.phi.iter().copied()).collect(), "steelblue"))
                    .collect(),
                ..Chart::default()
            };
            vec![prov.svg(None, &chart)]
        }
    })
}
