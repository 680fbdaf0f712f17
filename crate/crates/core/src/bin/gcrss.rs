use clap::Parser;
use gcrss::cli::{main_with, workers_from_env, RunSpec};

fn main() {
    let spec = RunSpec::parse();
    if let Some(n) = workers_from_env() {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    std::process::exit(main_with(&spec));
}
