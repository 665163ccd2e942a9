fn main() { std::process::exit(lchi::cli::run()); }
