#pragma once

namespace pgmerge {

/// Entry point behind the pgmerge binary. Returns 0 on success, 1 on
/// usage errors, 2 on format/environment errors.
int run_cli(int argc, const char* const* argv);

} // namespace pgmerge
