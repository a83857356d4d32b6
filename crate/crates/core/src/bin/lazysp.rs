fn main() {
    std::process::exit(lazysp::cli::dispatch(std::env::args_os()));
}
