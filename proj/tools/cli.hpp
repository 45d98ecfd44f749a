#pragma once

/// Runs the command line; returns the process exit code
/// (0 success, 1 internal error, 2 usage error).
int run_cli(int argc, char** argv);
