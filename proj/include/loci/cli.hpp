#pragma once

namespace loci {

/// Entry point for the `loci` command line tool.
/// Exit codes: 0 success / validation pass, 1 validation fail,
/// 2 parse error, 3 trace did not close within max_detours.
int cli_run(int argc, const char* const* argv);

} // namespace loci
