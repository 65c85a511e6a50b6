fn main() { std::process::exit(fns2d::cli::run_default()); }
