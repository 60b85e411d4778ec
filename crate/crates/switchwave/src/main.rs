fn main() {
    std::process::exit(switchwave::run_command(std::env::args_os()));
}
