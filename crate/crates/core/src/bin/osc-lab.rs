fn main() {
    std::process::exit(osc_lab::cli::run(std::env::args_os()));
}
