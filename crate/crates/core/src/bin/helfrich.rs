use env_logger::Env;

fn main() {
    env_logger::Builder::from_env(Env::new().filter("HELFRICH_LOG")).init();
    std::process::exit(helfrich::cli::run_from(std::env::args_os()));
}
