#pragma once

#include <ostream>

namespace mongealign::cli {

/// Exit codes: 0 success, 1 data or runtime error, 2 usage error.
/// Reports go to `out` as JSON (CSV for experiment-biasvar), errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mongealign::cli
