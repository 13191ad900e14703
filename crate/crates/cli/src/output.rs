//! File helpers shared by the subcommands.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::args::Cli;

/// Files written by a subcommand, relative to its output directory.
#[derive(Debug, Default)]
pub struct RunInfo {
    pub outputs: Vec<String>,
}

/// Writes artifacts into one output directory and remembers their names.
pub struct OutDir {
    root: PathBuf,
    pub info: RunInfo,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            info: RunInfo::default(),
        })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.info.outputs.push(name.to_owned());
        self.root.join(name)
    }

    pub fn file(&mut self, name: &str) -> Result<BufWriter<File>> {
        let p = self.path(name);
        let f = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        Ok(BufWriter::new(f))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn csv(&mut self, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
        Ok(csv::Writer::from_writer(self.file(name)?))
    }
}

/// Lossless decimal form of a float.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).with_context(|| format!("reading {}", path.display()))
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: &'a Cli,
    outputs: &'a [String],
    timings: Timings,
}

#[derive(Serialize)]
struct Timings {
    total_seconds: f64,
}

pub fn write_meta(cli: &Cli, run: RunInfo, elapsed: Duration) -> Result<()> {
    let root = cli.command.out();
    if !root.is_dir() {
        bail!("output directory {} is missing", root.display());
    }
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        seed: cli.command.seed(),
        config: cli,
        outputs: &run.outputs,
        timings: Timings {
            total_seconds: elapsed.as_secs_f64(),
        },
    };
    let mut w = BufWriter::new(File::create(root.join("meta.json"))?);
    serde_json::to_writer_pretty(&mut w, &meta)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
