fn main() -> std::process::ExitCode {
    ash_core::cli::main()
}
