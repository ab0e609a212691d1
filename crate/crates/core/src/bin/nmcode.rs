fn main() -> std::process::ExitCode {
    nmcode::cli::main()
}
