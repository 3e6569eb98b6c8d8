fn main() -> std::process::ExitCode {
    mrip::cli::main()
}
