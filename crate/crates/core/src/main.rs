fn main() {
    std::process::exit(singseries::cli::dispatch(std::env::args_os()));
}
