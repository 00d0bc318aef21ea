fn main() -> std::process::ExitCode {
    jobpulse::cli::main()
}
