fn main() {
    std::process::exit(mecpath::app::main_with_args(std::env::args_os()));
}
