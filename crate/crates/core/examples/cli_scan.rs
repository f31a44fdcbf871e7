//! Drives the batch runner in-process: a short scan written as CSV to stdout.

fn main() -> std::process::ExitCode {
    hifi_core::cli::run(["hifi", "scan", "--n-range", "10:50:10", "--profile", "linear"])
}
