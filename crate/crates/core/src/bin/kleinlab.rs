fn main() {
    std::process::exit(kleinlab::cli::run(std::env::args_os()));
}
