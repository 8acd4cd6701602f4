fn main() -> std::process::ExitCode {
    wreath_core::cli::main()
}
