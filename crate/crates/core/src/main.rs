fn main() {
    std::process::exit(orderstat::cli::cli_dispatch(std::env::args_os()));
}
