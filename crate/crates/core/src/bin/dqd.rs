fn main() {
    std::process::exit(dqd_thermal::cli::run(std::env::args_os()));
}
