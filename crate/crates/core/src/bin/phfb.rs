fn main() {
    std::process::exit(ph_feedback::cli::run(std::env::args_os()));
}
