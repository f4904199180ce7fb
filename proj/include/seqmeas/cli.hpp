#pragma once

#include <iosfwd>

namespace seqmeas::cli {

/// Parses and executes one command line against the given streams.
/// Returns the process exit status: 0 on success, 1 when the requested
/// selection is physically forbidden, 2 on malformed arguments.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace seqmeas::cli
