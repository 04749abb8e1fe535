//! Execution of each subcommand.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use eulerist::builders::{
    cech, codensity, default_bandwidth, function_extension, rips, VertexFunction,
};
use eulerist::complex::validate;
use eulerist::euler::{compute_ecp, l1_window_norm, quantile_grid_pooled, GridSpec};
use eulerist::formats::{
    parse_attribute_csv, parse_edge_list, parse_filtration, parse_point_cloud_csv,
    write_filtration, write_point_cloud_csv, write_profile_csv, ProfileKind, ProfileSidecar,
};
use eulerist::graph::{
    closeness_centrality, edge_betweenness, forman_curvature, graph_lower_star, hks,
    EdgeFunction, Graph,
};
use eulerist::persistence::{reduce, w1_diagram_distance};
use eulerist::signed::{signed_barcode, signed_w1};
use eulerist::synth::{
    sample_clutter, sample_orbit, sample_poisson, sample_sphere, sample_torus, ClutterParams,
};
use eulerist::transforms::{
    hybrid_transform, ht_quantile_grid_pooled, DualGridSpec,
};
use eulerist::MultiFiltration;
use rayon::prelude::*;
use serde_json::json;

use crate::args::*;
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn check_output_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(CliError::Usage(format!(
            "output name `{name}` must be a plain file name"
        )));
    }
    Ok(())
}

/// Rejects filtrations that are not closed under faces or not monotone.
fn ensure_valid(f: &MultiFiltration, origin: &Path) -> Result<()> {
    let report = validate(f);
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{}:\n{report}", origin.display())))
    }
}

pub fn load_filtration(path: &Path) -> Result<MultiFiltration> {
    let f = parse_filtration(&read(path)?).map_err(|e| CliError::input(path, e))?;
    ensure_valid(&f, path)?;
    Ok(f)
}

fn vertex_function(g: &Graph, spec: &str) -> Result<VertexFunction> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let number = |what: &str| -> Result<&str> {
        param.ok_or_else(|| CliError::Usage(format!("vertex function `{name}` needs {what}")))
    };
    match name {
        "hks" => {
            let t: f64 = number("a time, e.g. hks:1.0")?
                .parse()
                .map_err(|_| CliError::Usage(format!("bad HKS time in `{spec}`")))?;
            Ok(hks(g, t)?)
        }
        "closeness" => Ok(closeness_centrality(g)),
        "attr" => {
            let k: usize = number("a column, e.g. attr:0")?
                .parse()
                .map_err(|_| CliError::Usage(format!("bad attribute column in `{spec}`")))?;
            Ok(g.attribute_function(k)?)
        }
        _ => Err(CliError::Usage(format!(
            "unknown vertex function `{spec}` (expected hks:<t>, closeness, attr:<column>)"
        ))),
    }
}

fn edge_function(g: &Graph, spec: &str) -> Result<EdgeFunction> {
    match spec {
        "forman" => Ok(forman_curvature(g)),
        "betweenness" => Ok(edge_betweenness(g)),
        _ => Err(CliError::Usage(format!(
            "unknown edge function `{spec}` (expected forman, betweenness)"
        ))),
    }
}

fn check_builder_flags(b: &BuilderArgs) -> Result<()> {
    let graph_only = !b.vertex_functions.is_empty()
        || !b.edge_functions.is_empty()
        || b.attributes.is_some();
    if graph_only && b.input_type != InputType::Graph {
        return Err(CliError::Usage(
            "--vf, --ef and --attributes apply to --type graph only".into(),
        ));
    }
    if (b.codensity || b.bandwidth.is_some()) && b.input_type != InputType::Points {
        return Err(CliError::Usage(
            "--codensity and --bandwidth apply to --type points only".into(),
        ));
    }
    if b.bandwidth.is_some() && !b.codensity {
        return Err(CliError::Usage("--bandwidth requires --codensity".into()));
    }
    Ok(())
}

/// Turns one input file into a filtration as directed by `b`.
pub fn build_filtration(path: &Path, b: &BuilderArgs) -> Result<MultiFiltration> {
    let text = read(path)?;
    let input = |e| CliError::input(path, e);
    let f = match b.input_type {
        InputType::Filtration => parse_filtration(&text).map_err(input)?,
        InputType::Points => {
            let cloud = parse_point_cloud_csv(&text, None).map_err(input)?;
            let scale = b.max_scale.unwrap_or(f64::INFINITY);
            let base = match b.builder {
                BuilderKind::Rips => rips(&cloud, b.max_dim, scale)?,
                BuilderKind::Cech => cech(&cloud, b.max_dim, scale)?,
            };
            if b.codensity {
                let h = match b.bandwidth {
                    Some(h) => h,
                    None => default_bandwidth(&cloud)?,
                };
                function_extension(&base, &codensity(&cloud, h, b.post)?)?
            } else {
                base
            }
        }
        InputType::Graph => {
            let mut g = parse_edge_list(&text).map_err(input)?;
            if let Some(attr) = &b.attributes {
                let rows = parse_attribute_csv(&read(attr)?).map_err(|e| CliError::input(attr, e))?;
                g = g.with_attributes(rows).map_err(|e| CliError::input(attr, e))?;
            }
            let vfs = b
                .vertex_functions
                .iter()
                .map(|s| vertex_function(&g, s))
                .collect::<Result<Vec<_>>>()?;
            let efs = b
                .edge_functions
                .iter()
                .map(|s| edge_function(&g, s))
                .collect::<Result<Vec<_>>>()?;
            if vfs.is_empty() && efs.is_empty() {
                return Err(CliError::Usage(
                    "graph inputs need at least one --vf or --ef".into(),
                ));
            }
            graph_lower_star(&g, &vfs, &efs)?
        }
    };
    ensure_valid(&f, path)?;
    Ok(f)
}

fn broadcast<T: Clone>(values: &[T], m: usize, flag: &str) -> Result<Vec<T>> {
    match values.len() {
        1 => Ok(vec![values[0].clone(); m]),
        n if n == m => Ok(values.to_vec()),
        n => Err(CliError::Usage(format!(
            "{flag} gives {n} axes but the filtration has {m} parameters"
        ))),
    }
}

fn common_m(filtrations: &[&MultiFiltration]) -> Result<usize> {
    let m = filtrations
        .first()
        .ok_or_else(|| CliError::Usage("no inputs".into()))?
        .m();
    if filtrations.iter().any(|f| f.m() != m) {
        return Err(CliError::Validation(
            "inputs have different numbers of parameters".into(),
        ));
    }
    Ok(m)
}

fn ecp_grid(
    grid: &EcpGridArgs,
    resolution: &Resolution,
    filtrations: &[&MultiFiltration],
) -> Result<(GridSpec, ProfileSidecar)> {
    let m = common_m(filtrations)?;
    let res = broadcast(&resolution.0, m, "--resolution")?;
    let spec = match (&grid.bounds, &grid.quantiles) {
        (Some(b), None) => GridSpec::from_bounds(&broadcast(&b.0, m, "--bounds")?, &res)?,
        (None, Some(q)) => {
            quantile_grid_pooled(filtrations, &broadcast(&q.0, m, "--quantiles")?, &res)?
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --bounds or --quantiles is required".into(),
            ))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--bounds and --quantiles are mutually exclusive".into(),
            ))
        }
    };
    let sidecar = ProfileSidecar::for_grid(&spec, ProfileKind::Ecp);
    Ok((spec, sidecar))
}

fn ht_grid(
    grid: &HtGridArgs,
    resolution: &Resolution,
    filtrations: &[&MultiFiltration],
) -> Result<(DualGridSpec, ProfileSidecar)> {
    let m = common_m(filtrations)?;
    let kernel = grid
        .kernel
        .as_ref()
        .ok_or_else(|| CliError::Usage("--kernel is required".into()))?
        .kernel();
    let res = broadcast(&resolution.0, m, "--resolution")?;
    let (spec, alpha, quantiles) = match (&grid.xi_bounds, &grid.quantile, grid.alpha) {
        (Some(b), None, None) => (
            DualGridSpec::from_bounds(&broadcast(&b.0, m, "--xi-bounds")?, &res)?,
            None,
            None,
        ),
        (None, Some(q), Some(alpha)) => {
            let q = broadcast(&q.0, m, "--quantile")?;
            (
                ht_quantile_grid_pooled(filtrations, &q, alpha, &res)?,
                Some(alpha),
                Some(q),
            )
        }
        (None, None, None) => {
            return Err(CliError::Usage(
                "one of --xi-bounds or --quantile with --alpha is required".into(),
            ))
        }
        _ => {
            return Err(CliError::Usage(
                "use either --xi-bounds, or --quantile together with --alpha".into(),
            ))
        }
    };
    let mut sidecar = ProfileSidecar::for_grid(spec.grid(), ProfileKind::Ht);
    sidecar.kernel = Some(kernel.name().to_string());
    sidecar.p = kernel.param();
    sidecar.alpha = alpha;
    sidecar.quantiles = quantiles;
    Ok((spec, sidecar))
}

fn build(cli: &Cli, a: &BuildArgs) -> Result<()> {
    check_output_name(&a.output)?;
    check_builder_flags(&a.builder)?;
    let f = build_filtration(&a.input, &a.builder)?;
    write(&cli.out_dir.join(&a.output), &write_filtration(&f))
}

fn ecp(cli: &Cli, a: &EcpArgs) -> Result<()> {
    check_output_name(&a.output)?;
    let f = load_filtration(&a.input)?;
    let (spec, sidecar) = ecp_grid(&a.grid, &a.resolution, &[&f])?;
    let grid = compute_ecp(&f, &spec)?;
    write(&cli.out_dir.join(format!("{}.csv", a.output)), &write_profile_csv(&grid))?;
    write(&cli.out_dir.join(format!("{}.json", a.output)), &sidecar.to_json())
}

fn ht(cli: &Cli, a: &HtArgs) -> Result<()> {
    check_output_name(&a.output)?;
    let f = load_filtration(&a.input)?;
    let (spec, sidecar) = ht_grid(&a.grid, &a.resolution, &[&f])?;
    let kernel = a.grid.kernel.as_ref().expect("checked by ht_grid").kernel();
    let grid = hybrid_transform(&f, &kernel, &spec)?;
    write(&cli.out_dir.join(format!("{}.csv", a.output)), &write_profile_csv(&grid))?;
    write(&cli.out_dir.join(format!("{}.json", a.output)), &sidecar.to_json())
}

/// One dataset entry: its path relative to the dataset root and its label.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub label: String,
    pub path: PathBuf,
}

fn sorted_dir(dir: &Path) -> Result<Vec<(String, PathBuf, bool)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        let is_dir = entry.file_type().map_err(|e| CliError::io(dir, e))?.is_dir();
        out.push((name, entry.path(), is_dir));
    }
    out.sort();
    Ok(out)
}

/// Files directly in `root` (unlabelled) and in its sub-directories
/// (labelled by the sub-directory name), sorted by relative path.
pub fn list_dataset(root: &Path) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    for (name, path, is_dir) in sorted_dir(root)? {
        if is_dir {
            for (file, fpath, sub_dir) in sorted_dir(&path)? {
                if !sub_dir {
                    entries.push(Entry {
                        name: format!("{name}/{file}"),
                        label: name.clone(),
                        path: fpath,
                    });
                }
            }
        } else {
            entries.push(Entry {
                name,
                label: String::new(),
                path,
            });
        }
    }
    entries.sort_by(|a, b| a.name.cmp(&b.name));
    if entries.is_empty() {
        return Err(CliError::Usage(format!(
            "dataset directory {} contains no files",
            root.display()
        )));
    }
    Ok(entries)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn featurize(cli: &Cli, a: &FeaturizeArgs) -> Result<()> {
    check_output_name(&a.output)?;
    check_builder_flags(&a.builder)?;
    if a.builder.attributes.is_some() {
        return Err(CliError::Usage(
            "--attributes is per-graph and cannot be shared across a dataset".into(),
        ));
    }
    let entries = list_dataset(&a.input)?;
    let filtrations = entries
        .par_iter()
        .map(|e| build_filtration(&e.path, &a.builder))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&MultiFiltration> = filtrations.iter().collect();

    let (rows, sidecar): (Vec<Vec<String>>, ProfileSidecar) = match a.descriptor {
        Descriptor::Ecp => {
            let (spec, sidecar) = ecp_grid(&a.ecp_grid, &a.resolution, &refs)?;
            let rows = filtrations
                .par_iter()
                .map(|f| {
                    let g = compute_ecp(f, &spec)?;
                    Ok(g.data.iter().map(i64::to_string).collect())
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, sidecar)
        }
        Descriptor::Ht => {
            let (spec, sidecar) = ht_grid(&a.ht_grid, &a.resolution, &refs)?;
            let kernel = a.ht_grid.kernel.as_ref().expect("checked by ht_grid").kernel();
            let rows = filtrations
                .par_iter()
                .map(|f| {
                    let g = hybrid_transform(f, &kernel, &spec)?;
                    Ok(g.data.iter().map(f64::to_string).collect())
                })
                .collect::<Result<Vec<_>>>()?;
            (rows, sidecar)
        }
    };

    let width = rows.first().map_or(0, Vec::len);
    let mut out = String::from("name,label");
    for j in 0..width {
        out.push_str(&format!(",f{j}"));
    }
    out.push('\n');
    for (e, row) in entries.iter().zip(&rows) {
        out.push_str(&csv_field(&e.name));
        out.push(',');
        out.push_str(&csv_field(&e.label));
        for v in row {
            out.push(',');
            out.push_str(v);
        }
        out.push('\n');
    }
    write(&cli.out_dir.join(format!("{}.csv", a.output)), &out)?;
    write(&cli.out_dir.join(format!("{}.json", a.output)), &sidecar.to_json())
}

/// Computes the requested distance between two filtration files.
pub fn distance_value(a: &DistanceArgs) -> Result<f64> {
    let f = load_filtration(&a.first)?;
    let g = load_filtration(&a.second)?;
    if f.m() != g.m() {
        return Err(CliError::Validation(format!(
            "filtrations have {} and {} parameters",
            f.m(),
            g.m()
        )));
    }
    Ok(match a.metric {
        Metric::SignedW1 => signed_w1(&signed_barcode(&f), &signed_barcode(&g))?,
        Metric::L1Window(m) => l1_window_norm(&f, &g, m)?,
        Metric::W1Diagram => {
            if f.m() != 1 {
                return Err(CliError::Usage(
                    "w1-diagram needs one-parameter filtrations".into(),
                ));
            }
            let (df, dg) = (reduce(&f)?, reduce(&g)?);
            (0..df.num_degrees().max(dg.num_degrees()))
                .map(|k| w1_diagram_distance(df.degree(k), dg.degree(k)))
                .sum()
        }
    })
}

fn distance(a: &DistanceArgs, stdout: &mut dyn Write) -> Result<()> {
    let d = distance_value(a)?;
    writeln!(stdout, "{d}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn require<T: Copy>(v: Option<T>, flag: &str, generator: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("generator {generator} requires {flag}")))
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<()> {
    check_output_name(&a.output)?;
    let cloud = match a.generator {
        Generator::Orbit => sample_orbit(
            require(a.rho, "--rho", "orbit")?,
            require(a.n, "--n", "orbit")?,
            a.seed,
        )?,
        Generator::Poisson => sample_poisson(
            require(a.intensity, "--intensity", "poisson")?,
            a.side,
            a.dim,
            a.seed,
        )?,
        Generator::Torus => sample_torus(require(a.n, "--n", "torus")?, a.uniform, a.seed),
        Generator::Sphere => sample_sphere(require(a.n, "--n", "sphere")?, a.uniform, a.seed),
        Generator::Clutter => sample_clutter(
            &ClutterParams {
                n_noise: a.n_noise,
                n_line: a.n_line,
                lines: a.lines,
                jitter: a.jitter,
            },
            a.seed,
        )?,
    };
    write(&cli.out_dir.join(&a.output), &write_point_cloud_csv(&cloud))
}

/// Records the resolved configuration next to the outputs.
fn write_run_json(cli: &Cli) -> Result<()> {
    let doc = json!({
        "tool": "eulerist",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cli,
    });
    let text = serde_json::to_string_pretty(&doc).expect("config serializes") + "\n";
    write(&cli.out_dir.join("run.json"), &text)
}

/// Runs one command; `stdout` receives the distance value.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    fs::create_dir_all(&cli.out_dir).map_err(|e| CliError::io(&cli.out_dir, e))?;
    write_run_json(cli)?;
    match &cli.command {
        Command::Build(a) => build(cli, a),
        Command::Ecp(a) => ecp(cli, a),
        Command::Ht(a) => ht(cli, a),
        Command::Featurize(a) => featurize(cli, a),
        Command::Distance(a) => distance(a, stdout),
        Command::Sample(a) => sample(cli, a),
    }
}
